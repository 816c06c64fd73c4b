"""Static-output-feedback synthesis for the discrete IGC plant.

The generalized plant wires frequency weights around the 15-state model:
a first-order low-pass W1 on the tracking error of (h, x1), a first-order
high-pass W2 on the measured outputs, and a constant W3 on the inputs.
The controller is a constant gain U = F_d [E; Y2] with
E = Yr - [h, x1] and Y2 = [q, theta, p, r, phi].

Feasibility is certified through the slack-variable LMI

    [ -P_d                  -(A + B F C)^T N_d^T ]
    [ -N_d (A + B F C)       P_d - N_d - N_d^T   ]  < 0 ,   P_d > 0

which is jointly convex in (P_d, F_d) once N_d is fixed.  The solver
minimizes the smoothed maximum eigenvalue of that block (stacked with the
positivity block eps I - P_d) with analytic adjoint gradients; a genetic
search over N_d shapes the closed-loop damping and the spiral mode.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import solve_discrete_are, solve_discrete_lyapunov
from scipy.optimize import minimize

from .config import ConfigError
from .igc import DiscreteModel, IgcLinearModel
from .modes import ModeTable, classify_modes

FEEDBACK_LABELS = ("h_err", "x1_err", "q", "theta", "p", "r", "phi")

# 15-state indices of the measured signals feeding the gain
_IDX_H, _IDX_X1 = 4, 9
_IDX_Y2 = (2, 3, 6, 7, 8)  # q, theta, p, r, phi


class SynthesisError(RuntimeError):
    pass


def feedback_output_matrix(n_states: int = 15) -> np.ndarray:
    """Map 15 states to the gain input [Yr - Y1; Y2] (reference part left
    out): rows (-h, -x1, q, theta, p, r, phi)."""
    C = np.zeros((7, n_states))
    C[0, _IDX_H] = -1.0
    C[1, _IDX_X1] = -1.0
    for row, idx in enumerate(_IDX_Y2, start=2):
        C[row, idx] = 1.0
    return C


@dataclass
class WeightConfig:
    w1_tau: float = 0.1      # low-pass time constant on tracking error (s)
    w1_gain: float = 1.0
    w2_tau: float = 0.0205   # high-pass corner near the servo bandwidth (s)
    w2_gain: float = 0.1
    w3_gain: float = 0.1     # constant weight on the inputs

    def validate(self) -> None:
        if self.w1_tau <= 0.0 or self.w2_tau <= 0.0:
            raise ConfigError("weight time constants must be positive "
                              "(improper/unstable weight)")
        if min(self.w1_gain, self.w2_gain, self.w3_gain) < 0.0:
            raise ConfigError("weight gains must be non-negative")


@dataclass
class GeneralizedPlant:
    A_dg: np.ndarray
    B_du: np.ndarray
    B_dw: np.ndarray
    C_d1: np.ndarray
    C_d2: np.ndarray
    C_d3: np.ndarray
    D_d11: np.ndarray
    D_d12: np.ndarray
    D_d21: np.ndarray
    D_d22: np.ndarray
    D_d31: np.ndarray
    D_d32: np.ndarray
    C_d: np.ndarray
    # direct reference feedthrough into the measured vector; not part of
    # the printed plant equations but required to close the loop exactly
    D_yw: np.ndarray
    weights: WeightConfig | None = None
    dm: DiscreteModel | None = None

    @property
    def n_states(self) -> int:
        return self.A_dg.shape[0]

    @classmethod
    def stabilization(cls, A, B, C) -> "GeneralizedPlant":
        """Bare stabilization plant (no weights, no disturbance channel)."""
        A = np.atleast_2d(np.asarray(A, dtype=float))
        B = np.atleast_2d(np.asarray(B, dtype=float))
        C = np.atleast_2d(np.asarray(C, dtype=float))
        n, m = B.shape
        p = C.shape[0]
        z = np.zeros
        return cls(A_dg=A, B_du=B, B_dw=z((n, 1)),
                   C_d1=z((1, n)), C_d2=z((1, n)), C_d3=z((1, n)),
                   D_d11=z((1, m)), D_d12=z((1, 1)),
                   D_d21=z((1, m)), D_d22=z((1, 1)),
                   D_d31=z((1, m)), D_d32=z((1, 1)),
                   C_d=C, D_yw=z((p, 1)))


def build_generalized_plant(dm: DiscreteModel,
                            weights: WeightConfig) -> GeneralizedPlant:
    """Assemble the weighted discrete plant around the 15-state model.

    Plant state: [X (15); x_W1 (2); x_W2 (7)].  The weights are first-order
    filters discretized at the controller period; W1 integrates the
    tracking error E = Yr - Y1, W2 high-passes the full measured output
    vector, W3 scales the inputs directly.
    """
    weights.validate()
    Ts = dm.Ts
    A_d, B_d, C_y = dm.A_d, dm.B_d, dm.C
    n, m = B_d.shape
    ny = C_y.shape[0]
    nw1, nw2 = 2, ny
    N = n + nw1 + nw2

    # selectors over the 15 states
    S1 = np.zeros((2, n))
    S1[0, _IDX_H] = 1.0
    S1[1, _IDX_X1] = 1.0

    a1 = math.exp(-Ts / weights.w1_tau)
    b1 = 1.0 - a1
    a2 = math.exp(-Ts / weights.w2_tau)
    b2 = 1.0 - a2

    A_dg = np.zeros((N, N))
    A_dg[:n, :n] = A_d
    A_dg[n:n + nw1, :n] = -b1 * S1
    A_dg[n:n + nw1, n:n + nw1] = a1 * np.eye(nw1)
    A_dg[n + nw1:, :n] = b2 * C_y
    A_dg[n + nw1:, n + nw1:] = a2 * np.eye(nw2)

    B_du = np.zeros((N, m))
    B_du[:n] = B_d
    B_dw = np.zeros((N, 2))
    B_dw[n:n + nw1] = b1 * np.eye(2)

    # Z1 = w1_gain * x_W1
    C_d1 = np.zeros((2, N))
    C_d1[:, n:n + nw1] = weights.w1_gain * np.eye(nw1)
    D_d11 = np.zeros((2, m))
    D_d12 = np.zeros((2, 2))

    # Z2 = w2_gain * (Y_I - x_W2)
    C_d2 = np.zeros((ny, N))
    C_d2[:, :n] = weights.w2_gain * C_y
    C_d2[:, n + nw1:] = -weights.w2_gain * np.eye(nw2)
    D_d21 = np.zeros((ny, m))
    D_d22 = np.zeros((ny, 2))

    # Z3 = w3_gain * U
    C_d3 = np.zeros((m, N))
    D_d31 = weights.w3_gain * np.eye(m)
    D_d32 = np.zeros((m, 2))

    C_fb = feedback_output_matrix(n)
    C_d = np.zeros((7, N))
    C_d[:, :n] = C_fb
    D_yw = np.zeros((7, 2))
    D_yw[:2, :2] = np.eye(2)

    return GeneralizedPlant(A_dg=A_dg, B_du=B_du, B_dw=B_dw,
                            C_d1=C_d1, C_d2=C_d2, C_d3=C_d3,
                            D_d11=D_d11, D_d12=D_d12,
                            D_d21=D_d21, D_d22=D_d22,
                            D_d31=D_d31, D_d32=D_d32,
                            C_d=C_d, D_yw=D_yw,
                            weights=weights, dm=dm)


@dataclass
class SofGain:
    F: np.ndarray                      # gain over [E; Y2]
    input_labels: tuple = FEEDBACK_LABELS

    @property
    def F1(self) -> np.ndarray:
        """First printed partition (columns 1..3)."""
        return self.F[:, :3]

    @property
    def F2(self) -> np.ndarray:
        """Second printed partition (columns 4..end)."""
        return self.F[:, 3:]


@dataclass
class LmiCertificate:
    P: np.ndarray
    N: np.ndarray
    min_eig_P: float
    max_eig_block: float


def paper_gain() -> SofGain:
    """Published 3x7 gain fixture (regression/IO-shape reference only;
    it corresponds to an externally identified vehicle model)."""
    F1 = np.array([
        [-0.0060, -0.3378, -0.8032],
        [0.0, 0.0987, 0.0],
        [-1.152, 36.54, 0.0042],
    ])
    F2 = np.array([
        [0.0002, -0.0007, 0.0, -0.1008],
        [-0.0528, 0.0008, -0.0937, -0.0002],
        [-5.325, -19.1, 0.0004, 0.0091],
    ])
    return SofGain(F=np.hstack([F1, F2]))


def lmi_block(plant: GeneralizedPlant, N_d, P_d, F_d) -> np.ndarray:
    """Assemble the symmetric 2n x 2n slack-variable LMI block."""
    N_d = np.atleast_2d(np.asarray(N_d, dtype=float))
    P_d = np.atleast_2d(np.asarray(P_d, dtype=float))
    F = F_d.F if isinstance(F_d, SofGain) else np.atleast_2d(np.asarray(F_d, dtype=float))
    A_cl = plant.A_dg + plant.B_du @ F @ plant.C_d
    off = -(A_cl.T @ N_d.T)
    return np.block([[-P_d, off], [off.T, P_d - N_d - N_d.T]])


def lmi_residual(plant: GeneralizedPlant, N_d, P_d, F_d) -> float:
    """Largest eigenvalue of the LMI block; feasible iff < 0 with P_d > 0."""
    M = lmi_block(plant, N_d, P_d, F_d)
    return float(np.linalg.eigvalsh(0.5 * (M + M.T)).max())


def verify_certificate(plant: GeneralizedPlant, gain: SofGain,
                       cert: LmiCertificate,
                       tol: float = 1e-9) -> bool:
    """Re-check a certificate with plain eigenvalue routines."""
    res = lmi_residual(plant, cert.N, cert.P, gain)
    pmin = float(np.linalg.eigvalsh(0.5 * (cert.P + cert.P.T)).min())
    A_cl = plant.A_dg + plant.B_du @ gain.F @ plant.C_d
    rho = float(np.abs(np.linalg.eigvals(A_cl)).max())
    return res < -tol and pmin > tol and rho < 1.0


def _balance_scales(A: np.ndarray) -> np.ndarray:
    """Diagonal similarity scales from matrix balancing (powers of two)."""
    from scipy.linalg import matrix_balance
    _, (scale, _) = matrix_balance(A, permute=False, separate=True)
    scale = np.asarray(scale, dtype=float)
    scale[scale <= 0.0] = 1.0
    return scale


def _solve_fixed_slack(plant: GeneralizedPlant, N_d: np.ndarray,
                       margin: float, p_floor: float,
                       max_rounds: int, iters_per_round: int,
                       warm=None):
    """Convex spectral minimization over (P, F) for fixed N_d.

    Returns (P, F, residual, pmin) where residual is the exact max
    eigenvalue of the LMI block at the returned point (not the smoothed
    objective).  ``warm`` optionally provides a (P0, F0) starting pair.
    """
    A, B, C = plant.A_dg, plant.B_du, plant.C_d
    n = A.shape[0]
    m, p = B.shape[1], C.shape[0]
    N = np.asarray(N_d, dtype=float)
    Nt = N.T

    iu = np.triu_indices(n)
    n_p = iu[0].size
    # off-diagonal vech entries appear twice in P
    mult = np.where(iu[0] == iu[1], 1.0, 2.0)

    def unpack(theta):
        P = np.zeros((n, n))
        P[iu] = theta[:n_p]
        P = P + np.triu(P, 1).T
        F = theta[n_p:].reshape(m, p)
        return P, F

    def pack(P, F):
        return np.concatenate([P[iu], F.ravel()])

    eye_floor = p_floor * np.eye(n)

    def exact_residuals(P, F):
        A_cl = A + B @ F @ C
        off = -(A_cl.T @ Nt)
        M = np.block([[-P, off], [off.T, P - N - Nt]])
        lam_m = np.linalg.eigvalsh(M)
        lam_p = np.linalg.eigvalsh(P)
        return lam_m.max(), lam_p.min()

    def objective(theta, mu):
        P, F = unpack(theta)
        A_cl = A + B @ F @ C
        off = -(A_cl.T @ Nt)
        M = np.block([[-P, off], [off.T, P - N - Nt]])
        lam_m, V_m = np.linalg.eigh(M)
        lam_q, V_q = np.linalg.eigh(eye_floor - P)
        lam = np.concatenate([lam_m, lam_q])
        mx = lam.max()
        ex = np.exp((lam - mx) / mu)
        s = ex.sum()
        f = mx + mu * math.log(s)
        wts = ex / s
        G_m = (V_m * wts[:2 * n]) @ V_m.T
        G_q = (V_q * wts[2 * n:]) @ V_q.T
        G11 = G_m[:n, :n]
        G21 = G_m[n:, :n]
        G22 = G_m[n:, n:]
        gP = -G11 + G22 - G_q
        gF = -2.0 * B.T @ Nt @ G21 @ C.T
        grad = np.concatenate([(gP[iu] * mult), gF.ravel()])
        return f, grad

    if warm is not None:
        theta = pack(np.asarray(warm[0], dtype=float),
                     np.asarray(warm[1], dtype=float))
    else:
        # start from the symmetric part of N (projected positive definite)
        P0 = 0.5 * (N + Nt)
        lam0, V0 = np.linalg.eigh(P0)
        scale = max(1e-3, float(np.abs(lam0).max()))
        P0 = (V0 * np.maximum(lam0, 1e-3 * scale)) @ V0.T
        theta = pack(P0, np.zeros((m, p)))

    best = None
    f_exact, pmin = exact_residuals(*unpack(theta))
    mu = max(1e-6, 0.3 * abs(f_exact))
    for _ in range(max_rounds):
        result = minimize(objective, theta, args=(mu,), jac=True,
                          method="L-BFGS-B",
                          options={"maxiter": iters_per_round,
                                   "ftol": 1e-14, "gtol": 1e-12})
        theta = result.x
        P, F = unpack(theta)
        f_exact, pmin = exact_residuals(P, F)
        if best is None or f_exact < best[2]:
            best = (P.copy(), F.copy(), f_exact, pmin)
        if f_exact < -margin and pmin > p_floor * 0.5:
            break
        mu = max(1e-7, 0.2 * mu)
    P, F, f_exact, pmin = best
    return P, F, f_exact, pmin


def _solve_scaled(plant: GeneralizedPlant, N_d, margin, p_floor,
                  max_rounds, iters_per_round, warm=None):
    """Run the convex solve in balanced coordinates.

    The plant is transformed by a diagonal similarity D (states only; the
    gain is unit-invariant under it), N_d is carried along by congruence,
    and the returned P is mapped back so the certificate holds for the
    original plant.  Returns (P, F, residual, pmin) in original
    coordinates.
    """
    d = _balance_scales(plant.A_dg)
    Dinv = 1.0 / d
    A_s = plant.A_dg * np.outer(Dinv, d)
    B_s = plant.B_du * Dinv[:, None]
    C_s = plant.C_d * d[None, :]
    scaled = GeneralizedPlant.stabilization(A_s, B_s, C_s)
    N_s = np.asarray(N_d, dtype=float) * np.outer(d, d)
    warm_s = None
    if warm is not None:
        warm_s = (np.asarray(warm[0], dtype=float) * np.outer(d, d), warm[1])
    inner_margin = max(margin, 1e-6)
    P_s, F, _, _ = _solve_fixed_slack(scaled, N_s, inner_margin, p_floor,
                                      max_rounds, iters_per_round,
                                      warm=warm_s)
    P = P_s * np.outer(Dinv, Dinv)
    res = lmi_residual(plant, N_d, P, F)
    pmin = float(np.linalg.eigvalsh(0.5 * (P + P.T)).min())
    return P, F, res, pmin


def solve_sof(plant: GeneralizedPlant, N_d,
              margin: float = 1e-9, p_floor: float = 1e-4,
              max_rounds: int = 6, iters_per_round: int = 400,
              warm=None):
    """Solve the SOF LMI for fixed N_d.

    Returns (SofGain, LmiCertificate) when a strictly feasible pair is
    found and verified by an independent eigenvalue check, else None.
    """
    result, _, _ = solve_sof_detailed(plant, N_d, margin=margin,
                                      p_floor=p_floor, max_rounds=max_rounds,
                                      iters_per_round=iters_per_round,
                                      warm=warm)
    return result


def solve_sof_detailed(plant: GeneralizedPlant, N_d,
                       margin: float = 1e-9, p_floor: float = 1e-4,
                       max_rounds: int = 6, iters_per_round: int = 400,
                       warm=None):
    """Like :func:`solve_sof` but returns (result, residual, F_last, P_last).

    ``F_last``/``P_last`` are the solver's final iterate even when the LMI
    is infeasible for this N_d; callers use them to build better slack
    candidates (the classic N <- P iteration, and the discounted-Lyapunov
    construction when F_last happens to stabilize the loop).
    """
    N = np.atleast_2d(np.asarray(N_d, dtype=float))
    if N.shape != (plant.n_states, plant.n_states):
        raise ValueError("N_d must be square with the plant state dimension")
    P, F, res, pmin = _solve_scaled(plant, N, margin, p_floor,
                                    max_rounds, iters_per_round, warm=warm)
    if res < -margin and pmin > margin:
        gain = SofGain(F=F)
        cert = LmiCertificate(P=P, N=N, min_eig_P=pmin, max_eig_block=res)
        if verify_certificate(plant, gain, cert, tol=1e-9):
            return (gain, cert), res, F, P
    return None, res, F, P


def bootstrap_slack(plant: GeneralizedPlant, max_iters: int = 10):
    """Deterministic slack-iteration bootstrap.

    Repeatedly solves the convex problem and feeds the returned P back as
    the next N until the iterate's gain stabilizes the loop, at which
    point a feasible-by-construction slack is returned as (N, warm).
    Returns None if the iteration never produces a stabilizing gain.
    """
    candidates = _seed_slacks(plant)
    N = candidates[0]
    for _ in range(max_iters):
        result, _, F_last, P_last = solve_sof_detailed(plant, N)
        if result is not None:
            gain, cert = result
            return cert.N, (cert.P, gain.F)
        built = slack_from_loop(plant, F_last)
        if built is not None:
            return built
        N = 0.5 * (P_last + P_last.T)
    return None


# worst-case measurement magnitudes at tracking engagement (h error m,
# clamped miss distance m, q, theta, p, r, phi in rad or rad/s) and the
# actuator authority left around trim, used by the gain-saturation budget
ENGAGE_SCALE = np.array([3.0, 20.0, 0.3, 0.2, 0.5, 0.3, 0.35])
AUTHORITY = np.array([0.40, 0.35, 0.12])


@dataclass
class GaConfig:
    population: int = 6
    generations: int = 4
    mutation_scale: float = 0.15
    seed: int = 7
    damping_target: float = 0.30   # minimum closed-loop damping ratio
    damping_weight: float = 10.0
    spiral_target: float = -1.0    # continuous-equivalent spiral pole (1/s)
    spiral_weight: float = 2.0
    alt_target: float = -0.3       # altitude-mode pole target (1/s)
    alt_weight: float = 5.0
    saturation_weight: float = 5.0  # penalty on exceeding actuator authority
    validation_weight: float = 50.0  # off-design operating-point stability
    validation_damping: float = 0.15
    elite: int = 2

    def validate(self) -> None:
        if self.population < 2:
            raise ConfigError("GA population must be at least 2")
        if self.generations < 1:
            raise ConfigError("GA needs at least one generation")


@dataclass
class SynthesisResult:
    gain: SofGain
    certificate: LmiCertificate
    modes: ModeTable
    fitness: float
    evaluations: int


def closed_loop_modes(dm: DiscreteModel, gain: SofGain) -> ModeTable:
    """Continuous-equivalent modes of the 15-state loop closed by the gain."""
    C_fb = feedback_output_matrix(dm.A_d.shape[0])
    A_cl = dm.A_d + dm.B_d @ gain.F @ C_fb
    return classify_modes(A_cl, Ts=dm.Ts)


def spectral_radius(M) -> float:
    return float(np.abs(np.linalg.eigvals(M)).max())


def slack_from_loop(plant: GeneralizedPlant, F: np.ndarray):
    """Construct a slack/warm pair from a stabilizing gain.

    If A_cl = A + B F C is Schur, the discounted Lyapunov solution
    P = dlyap((A_cl/gamma)') with rho < gamma < 1 makes (N, P, F) = (P, P, F)
    a strictly feasible point of the LMI, so a solve seeded this way is
    feasible by construction.  Returns (N, (P, F)) or None.
    """
    A_cl = plant.A_dg + plant.B_du @ np.asarray(F, float) @ plant.C_d
    rho = spectral_radius(A_cl)
    if rho >= 1.0 - 1e-9:
        return None
    gamma = 0.5 * (1.0 + rho)
    try:
        P = solve_discrete_lyapunov((A_cl / gamma).T,
                                    np.eye(A_cl.shape[0]))
    except (np.linalg.LinAlgError, ValueError):
        return None
    P = 0.5 * (P + P.T)
    return P, (P.copy(), np.asarray(F, float).copy())


def _seed_slacks(plant: GeneralizedPlant):
    """Deterministic N_d starting candidates from full-information designs.

    Discounted Riccati designs give state-feedback loops of graded depth;
    their Lyapunov matrices are natural slack candidates for the output
    feedback problem.
    """
    A, B = plant.A_dg, plant.B_du
    n = A.shape[0]
    d = _balance_scales(A)
    Dinv = 1.0 / d
    A_s = A * np.outer(Dinv, d)
    B_s = B * Dinv[:, None]
    seeds = []
    for gamma in (1.0, 0.95, 0.88):
        try:
            X = solve_discrete_are(A_s / gamma, B_s / gamma,
                                   np.eye(n), np.eye(B.shape[1]))
            K = np.linalg.solve(np.eye(B.shape[1]) + B_s.T @ X @ B_s / gamma ** 2,
                                B_s.T @ X @ A_s / gamma ** 2)
            A_sf = (A_s - B_s @ K) / gamma
            P_sf = solve_discrete_lyapunov(A_sf.T, np.eye(n))
            seeds.append(P_sf * np.outer(Dinv, Dinv))
        except (np.linalg.LinAlgError, ValueError):
            continue
    scale = max(1.0, float(np.abs(A).max()))
    seeds.append(np.eye(n) * scale)
    return seeds


def _fitness_from_gain(plant: GeneralizedPlant, gain: SofGain,
                       cfg: GaConfig, validation=()):
    """Performance index over the certified gain; 0 means all targets met.

    ``validation`` holds additional discrete models (off-design operating
    points) whose closed loops must also be Schur with modest damping.
    """
    if plant.dm is not None:
        table = closed_loop_modes(plant.dm, gain)
    else:
        A_cl = plant.A_dg + plant.B_du @ gain.F @ plant.C_d
        table = classify_modes(A_cl, Ts=1.0,
                               state_labels=tuple(
                                   f"s{i}" for i in range(plant.n_states)))
    penalty = 0.0
    if table.max_real() >= 0.0:
        penalty += 1e3 + table.max_real()
    spiral = table.find("spiral")
    if spiral is None:
        penalty += 1.0
    else:
        penalty += cfg.spiral_weight * max(0.0, spiral.real - cfg.spiral_target)
    altitude = table.find("altitude")
    if altitude is None:
        penalty += 0.5
    else:
        penalty += cfg.alt_weight * max(0.0, altitude.real - cfg.alt_target)
    zmin = table.min_damping(exclude=("origin_chain",),
                             include_unclassified=True)
    if not math.isnan(zmin):
        penalty += cfg.damping_weight * max(0.0, cfg.damping_target - zmin)
    if gain.F.shape == (3, 7):
        demand = np.abs(gain.F) @ ENGAGE_SCALE
        penalty += cfg.saturation_weight * float(
            np.maximum(demand / AUTHORITY - 1.0, 0.0).sum())
    for dm_v in validation:
        table_v = closed_loop_modes(dm_v, gain)
        worst = table_v.max_real()
        penalty += cfg.validation_weight * max(0.0, worst + 0.05)
        zv = table_v.min_damping(exclude=("origin_chain",),
                                 include_unclassified=True)
        if not math.isnan(zv):
            penalty += 0.5 * cfg.damping_weight * max(
                0.0, cfg.validation_damping - zv)
    return penalty, table


def _refine_gain(plant: GeneralizedPlant, gain: SofGain,
                 cert: LmiCertificate, table: ModeTable, fitness: float,
                 cfg: GaConfig, rng: np.random.Generator,
                 validation=(), iters: int = 3000):
    """Certificate-preserving local search on the gain itself.

    A (1+1)-style evolution step on F: candidates that lower the
    performance index are accepted only after a fresh discounted-Lyapunov
    certificate for them verifies, so every intermediate result remains a
    valid solution of the feasibility LMI.
    """
    best_F = gain.F.copy()
    best_fit, best_table, best_cert = fitness, table, cert
    sigma = 0.15
    scale = np.maximum(np.abs(best_F), 0.05)
    for _ in range(iters):
        if best_fit <= 0.0:
            break
        F_try = best_F + sigma * scale * rng.standard_normal(best_F.shape)
        A_cl = plant.A_dg + plant.B_du @ F_try @ plant.C_d
        if spectral_radius(A_cl) >= 1.0 - 1e-9:
            sigma = max(0.01, sigma * 0.98)
            continue
        fit, tab = _fitness_from_gain(plant, SofGain(F=F_try), cfg,
                                      validation=validation)
        if fit < best_fit - 1e-12:
            built = slack_from_loop(plant, F_try)
            if built is None:
                continue
            N_new, (P_new, _) = built
            res = lmi_residual(plant, N_new, P_new, F_try)
            pmin = float(np.linalg.eigvalsh(0.5 * (P_new + P_new.T)).min())
            if res >= -1e-9 or pmin <= 1e-9:
                continue
            best_F, best_fit, best_table = F_try, fit, tab
            best_cert = LmiCertificate(P=P_new, N=N_new, min_eig_P=pmin,
                                       max_eig_block=res)
            scale = np.maximum(np.abs(best_F), 0.05)
            sigma = min(0.5, sigma * 1.25)
        else:
            sigma = max(0.01, sigma * 0.995)
    return SofGain(F=best_F), best_cert, best_table, best_fit


def ga_search(plant: GeneralizedPlant, cfg: GaConfig,
              validation=()) -> SynthesisResult:
    """Genetic search over the slack matrix N_d.

    Individuals are full N_d matrices (optionally carrying a warm start).
    Each evaluation solves the convex (P, F) problem; feasible ones are
    scored on closed-loop damping and spiral-mode depth, and two kinds of
    refinement candidates are queued: the returned P_d (the classic slack
    iteration) and, whenever a solve's final gain stabilizes the loop even
    without certifying, a discounted-Lyapunov slack built from that loop,
    which is feasible by construction.  Deterministic for a fixed seed.

    Raises :class:`SynthesisError` when no individual certifies.
    """
    cfg.validate()
    rng = np.random.default_rng(cfg.seed)
    n = plant.n_states

    def norm_scale(N):
        return max(1e-6, float(np.linalg.norm(N, "fro")) / n)

    def mutate(N):
        noise = rng.standard_normal((n, n))
        return N + cfg.mutation_scale * norm_scale(N) * noise / math.sqrt(n)

    population = []
    boot = bootstrap_slack(plant)
    if boot is not None:
        population.append(boot)
    population.extend((N, None) for N in _seed_slacks(plant))
    while len(population) < cfg.population:
        base = population[len(population) % len(population)][0]
        population.append((mutate(base), None))
    population = population[:cfg.population]

    best = None
    evaluations = 0
    queue = []  # refinement candidates (N, warm)

    for _ in range(cfg.generations):
        scored = []
        for N, warm in population:
            result, residual, F_last, P_last = solve_sof_detailed(
                plant, N, warm=warm)
            evaluations += 1
            if result is None:
                scored.append((1e6 + min(residual, 1e6), N))
                built = slack_from_loop(plant, F_last)
                if built is not None:
                    queue.append(built)
                else:
                    queue.append((0.5 * (P_last + P_last.T), None))
                continue
            gain, cert = result
            fitness, table = _fitness_from_gain(plant, gain, cfg,
                                                validation=validation)
            scored.append((fitness, N))
            queue.append((cert.P, (cert.P.copy(), gain.F.copy())))
            if best is None or fitness < best[0]:
                best = (fitness, gain, cert, table)
        scored.sort(key=lambda item: item[0])
        if best is not None and best[0] <= 0.0:
            break
        # next generation: elites, queued refinements, mutated children
        nxt = [(item[1], None) for item in scored[:cfg.elite]]
        nxt.extend(queue[:2])
        queue = queue[2:]
        while len(nxt) < cfg.population:
            i, j = rng.integers(0, len(scored), size=2)
            alpha = rng.uniform(0.2, 0.8)
            child = alpha * scored[i][1] + (1.0 - alpha) * scored[j][1]
            nxt.append((mutate(child), None))
        population = nxt[:cfg.population]

    if best is None:
        raise SynthesisError(
            f"no feasible static output feedback found after "
            f"{evaluations} LMI solves")
    fitness, gain, cert, table = best
    gain, cert, table, fitness = _refine_gain(plant, gain, cert, table,
                                              fitness, cfg, rng,
                                              validation=validation)
    return SynthesisResult(gain=gain, certificate=cert, modes=table,
                           fitness=fitness, evaluations=evaluations)
