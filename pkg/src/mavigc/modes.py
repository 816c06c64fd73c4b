"""Eigenvalue classification into named aircraft dynamic modes.

Modes are assigned by participation factors (elementwise products of right
and left eigenvectors), which are invariant under diagonal state scaling,
so mixed units do not skew the dominance ranking.  Eigenvalues that cannot
be attributed cleanly are labeled ``unclassified`` rather than guessed.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .igc import IGC_STATE_LABELS

# state groups used for dominance attribution
STATE_GROUPS = {
    "longitudinal": ("u", "w", "q", "theta"),
    "altitude": ("h",),
    "lateral": ("v", "p", "r", "phi"),
    "guidance": ("x1", "x2"),
    "elevator_servo": ("de_p", "de_p1"),
    "rudder_servo": ("dr_p", "dr_p1"),
}

ORIGIN_TOL = 1e-6  # |lambda| below which a pole belongs to the origin chain


@dataclass
class Mode:
    name: str
    eigenvalues: tuple          # continuous-domain eigenvalue(s)
    group: str
    omega: float | None = None  # natural frequency (rad/s), pairs only
    zeta: float | None = None   # damping ratio, pairs only
    real: float | None = None   # real poles only

    @property
    def max_real(self) -> float:
        return max(ev.real for ev in self.eigenvalues)

    def describe(self) -> str:
        if self.omega is not None:
            return (f"{self.name}: omega={self.omega:.3f} rad/s, "
                    f"zeta={self.zeta:.3f}")
        if self.real is not None:
            return f"{self.name}: {self.real:+.4f}"
        evs = ", ".join(f"{ev.real:+.3g}" for ev in self.eigenvalues)
        return f"{self.name}: [{evs}]"


@dataclass
class ModeTable:
    modes: list = field(default_factory=list)

    def find(self, name: str) -> Mode | None:
        for m in self.modes:
            if m.name == name:
                return m
        return None

    def find_all(self, name: str) -> list:
        return [m for m in self.modes if m.name == name]

    @property
    def eigenvalues(self) -> np.ndarray:
        return np.array([ev for m in self.modes for ev in m.eigenvalues])

    def max_real(self) -> float:
        return float(self.eigenvalues.real.max())

    def origin_count(self) -> int:
        return sum(len(m.eigenvalues) for m in self.modes
                   if m.name == "origin_chain")

    def min_damping(self, exclude=("origin_chain", "guidance"),
                    include_unclassified: bool = False) -> float:
        """Smallest damping ratio among classified oscillatory modes."""
        zetas = [m.zeta for m in self.modes
                 if m.zeta is not None and m.group not in exclude
                 and (include_unclassified or m.name != "unclassified")]
        return min(zetas) if zetas else float("nan")

    def rows(self):
        out = []
        for m in self.modes:
            for ev in m.eigenvalues:
                out.append((m.name, m.group, ev.real, ev.imag,
                            m.omega if m.omega is not None else "",
                            m.zeta if m.zeta is not None else ""))
        return out

    def to_csv(self, path) -> None:
        with open(path, "w") as fh:
            fh.write("mode,group,real,imag,omega,zeta\n")
            for name, group, re, im, om, ze in self.rows():
                om_s = f"{om:.9g}" if om != "" else ""
                ze_s = f"{ze:.9g}" if ze != "" else ""
                fh.write(f"{name},{group},{re:.9g},{im:.9g},{om_s},{ze_s}\n")


def _participation(A: np.ndarray):
    w, V = np.linalg.eig(A)
    try:
        Vi = np.linalg.inv(V)
        P = np.abs(V * Vi.T)  # participation of state i in mode k
    except np.linalg.LinAlgError:
        P = np.abs(V) ** 2
    col = P.sum(axis=0)
    col[col == 0.0] = 1.0
    return w, P / col


def classify_modes(A: np.ndarray, Ts: float | None = None,
                   state_labels=IGC_STATE_LABELS) -> ModeTable:
    """Group eigenvalues of ``A`` into named modes.

    With ``Ts`` given, ``A`` is a discrete-time matrix and eigenvalues are
    first mapped to the continuous domain via log(z)/Ts (principal branch).
    """
    w, P = _participation(np.asarray(A, dtype=float))
    if Ts is not None:
        wc = np.empty_like(w)
        for i, z in enumerate(w):
            if abs(z) < 1e-300:
                wc[i] = -np.inf
            else:
                wc[i] = np.log(z) / Ts
        w = wc

    labels = list(state_labels)
    group_idx = {g: [labels.index(s) for s in states if s in labels]
                 for g, states in STATE_GROUPS.items()}

    n = len(w)
    used = np.zeros(n, dtype=bool)
    entries = []  # (eigs tuple, participation vector)
    for i in range(n):
        if used[i]:
            continue
        if abs(w[i].imag) > 1e-7 * max(1.0, abs(w[i])):
            # find the conjugate partner
            best, best_d = None, np.inf
            for j in range(i + 1, n):
                if used[j]:
                    continue
                dist = abs(w[j] - w[i].conjugate())
                if dist < best_d:
                    best, best_d = j, dist
            if best is not None and best_d < 1e-6 * max(1.0, abs(w[i])):
                used[i] = used[best] = True
                entries.append(((w[i], w[best]), 0.5 * (P[:, i] + P[:, best])))
                continue
        used[i] = True
        entries.append(((w[i],), P[:, i]))

    def dominant_group(pvec):
        scores = {g: pvec[idx].sum() for g, idx in group_idx.items() if idx}
        return max(scores, key=scores.get), scores

    origin, classified = [], []
    for eigs, pvec in entries:
        if all(abs(ev) < ORIGIN_TOL for ev in eigs):
            origin.extend(eigs)
        else:
            classified.append((eigs, pvec))

    table = ModeTable()
    if origin:
        table.modes.append(Mode(name="origin_chain", group="origin",
                                eigenvalues=tuple(origin)))

    lateral_reals = []
    lon_pairs = []
    for eigs, pvec in classified:
        group, _ = dominant_group(pvec)
        if len(eigs) == 2:
            om = abs(eigs[0])
            ze = -eigs[0].real / om
            if group == "longitudinal":
                lon_pairs.append(Mode(name="", group=group, eigenvalues=eigs,
                                      omega=om, zeta=ze))
            elif group == "lateral":
                table.modes.append(Mode(name="dutch_roll", group=group,
                                        eigenvalues=eigs, omega=om, zeta=ze))
            elif group == "guidance":
                table.modes.append(Mode(name="guidance", group=group,
                                        eigenvalues=eigs, omega=om, zeta=ze))
            elif group in ("elevator_servo", "rudder_servo"):
                table.modes.append(Mode(name=group, group=group,
                                        eigenvalues=eigs, omega=om, zeta=ze))
            else:
                table.modes.append(Mode(name="unclassified", group=group,
                                        eigenvalues=eigs, omega=om, zeta=ze))
        else:
            ev = eigs[0]
            if group == "lateral":
                lateral_reals.append(Mode(name="", group=group,
                                          eigenvalues=eigs, real=ev.real))
            elif group == "altitude":
                table.modes.append(Mode(name="altitude", group=group,
                                        eigenvalues=eigs, real=ev.real))
            elif group == "guidance":
                table.modes.append(Mode(name="guidance_real", group=group,
                                        eigenvalues=eigs, real=ev.real))
            else:
                table.modes.append(Mode(name="unclassified", group=group,
                                        eigenvalues=eigs, real=ev.real))

    # longitudinal pairs: faster one is the short period
    lon_pairs.sort(key=lambda m: -m.omega)
    for k, m in enumerate(lon_pairs):
        m.name = "short_period" if k == 0 else (
            "phugoid" if k == 1 else "unclassified")
        table.modes.append(m)

    # lateral reals: larger magnitude is roll subsidence, smaller is spiral
    lateral_reals.sort(key=lambda m: -abs(m.real))
    for k, m in enumerate(lateral_reals):
        m.name = "roll_subsidence" if k == 0 else (
            "spiral" if k == 1 else "unclassified")
        table.modes.append(m)
    if len(lateral_reals) == 1:
        # a single lateral real pole: decide by magnitude
        m = lateral_reals[0]
        m.name = "spiral" if abs(m.real) < 5.0 else "roll_subsidence"

    return table
