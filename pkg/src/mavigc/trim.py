"""Trim solver: find the steady flight condition for commanded airspeed,
turn rate and climb rate.

The unknowns are (u, v, w, phi, theta, delta_e, delta_r, thrust); the body
rates follow from the steady-turn kinematic relation

    p = -psi_dot sin(theta)
    q =  psi_dot sin(phi) cos(theta)
    r =  psi_dot cos(phi) cos(theta)

which makes the Euler-angle-rate constraints hold exactly.  The reported
residual is the 9-vector of body accelerations plus the airspeed, climb
rate and turn rate errors, driven to zero by a damped Gauss-Newton
iteration with a central finite-difference Jacobian.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .config import AeroConfig
from .dynamics import sixdof_derivative
from .state import RigidBodyState


class TrimError(RuntimeError):
    """Trim failure; carries the best point found and its residual."""

    def __init__(self, message: str, best: "TrimPoint"):
        super().__init__(message)
        self.best = best


@dataclass
class TrimTargets:
    Va: float        # airspeed (m/s)
    psi_dot: float   # turn rate (rad/s)
    h_dot: float     # climb rate (m/s)


@dataclass
class TrimPoint:
    state: RigidBodyState
    delta_e: float   # elevator deflection (rad)
    delta_r: float   # rudder deflection (rad)
    thrust: float    # N
    targets: TrimTargets
    residual_norm: float
    converged: bool

    @property
    def alpha(self) -> float:
        return self.state.alpha()

    @property
    def beta(self) -> float:
        return self.state.beta()

    def controls(self):
        return (self.delta_e, self.delta_r, self.thrust)


def turn_rates(phi: float, theta: float, psi_dot: float):
    """Body rates of a steady turn at the given attitude."""
    return (-psi_dot * math.sin(theta),
            psi_dot * math.sin(phi) * math.cos(theta),
            psi_dot * math.cos(phi) * math.cos(theta))


def _state_from_unknowns(z, targets: TrimTargets, altitude: float) -> tuple:
    u, v, w, phi, theta, de, dr, thr = (float(c) for c in z)
    p, q, r = turn_rates(phi, theta, targets.psi_dot)
    state = RigidBodyState(u=u, v=v, w=w, p=p, q=q, r=r,
                           phi=phi, theta=theta, psi=0.0,
                           x=0.0, y=0.0, h=altitude)
    return state, de, dr, thr


def trim_residual(z, targets: TrimTargets, cfg: AeroConfig,
                  altitude: float = 20.0) -> np.ndarray:
    """9-component residual: body accelerations and target errors."""
    state, de, dr, thr = _state_from_unknowns(z, targets, altitude)
    d = sixdof_derivative(state, de, dr, thr, cfg)
    return np.array([
        d.u, d.v, d.w, d.p, d.q, d.r,
        state.airspeed() - targets.Va,
        d.h - targets.h_dot,
        d.psi - targets.psi_dot,
    ])


_UNKNOWN_SCALES = np.array([1.0, 1.0, 1.0, 0.1, 0.1, 0.05, 0.05, 0.05])


def trim_solve(Va: float, psi_dot: float, h_dot: float, cfg: AeroConfig,
               tol: float = 1e-8, max_iter: int = 100,
               altitude: float = 20.0) -> TrimPoint:
    """Solve for the trim state and controls.

    Parameters
    ----------
    Va, psi_dot, h_dot : commanded airspeed (m/s), turn rate (rad/s) and
        climb rate (m/s).
    cfg : vehicle configuration.
    tol : residual norm at which the iteration is declared converged.
    max_iter : damped Gauss-Newton iteration budget.
    altitude : altitude datum stored in the trim state (does not affect
        the dynamics).

    Raises
    ------
    TrimError
        If the iteration does not converge, or the trimmed controls fall
        outside the actuator limits.  The exception carries the best point.
    """
    if Va <= 0.0:
        raise ValueError("trim airspeed must be positive")
    targets = TrimTargets(Va=Va, psi_dot=psi_dot, h_dot=h_dot)

    alpha0 = 0.1
    gamma0 = math.asin(max(-1.0, min(1.0, h_dot / Va)))
    phi0 = math.atan2(Va * psi_dot, cfg.gravity)
    z = np.array([Va * math.cos(alpha0), 0.0, Va * math.sin(alpha0),
                  phi0, alpha0 + gamma0, -0.05, 0.0, 0.15])

    def res(zz):
        return trim_residual(zz, targets, cfg, altitude)

    r = res(z)
    rn = np.linalg.norm(r)
    for _ in range(max_iter):
        if rn <= tol:
            break
        jac = np.empty((r.size, z.size))
        for j in range(z.size):
            hstep = 1e-7 * _UNKNOWN_SCALES[j] + 1e-9
            zp, zm = z.copy(), z.copy()
            zp[j] += hstep
            zm[j] -= hstep
            jac[:, j] = (res(zp) - res(zm)) / (2.0 * hstep)
        step, *_ = np.linalg.lstsq(jac, -r, rcond=None)
        lam = 1.0
        improved = False
        for _ in range(25):
            z_try = z + lam * step
            r_try = res(z_try)
            rn_try = np.linalg.norm(r_try)
            if rn_try < rn:
                z, r, rn = z_try, r_try, rn_try
                improved = True
                break
            lam *= 0.5
        if not improved:
            break

    state, de, dr, thr = _state_from_unknowns(z, targets, altitude)
    point = TrimPoint(state=state, delta_e=de, delta_r=dr, thrust=thr,
                      targets=targets, residual_norm=float(rn),
                      converged=bool(rn <= tol))
    if not point.converged:
        raise TrimError(
            f"trim did not converge: residual {rn:.3e} after {max_iter} "
            f"iterations", point)

    lim = cfg.limits
    violations = []
    if not (lim.elevator_min <= de <= lim.elevator_max):
        violations.append(f"elevator {math.degrees(de):.1f} deg")
    if not (lim.rudder_min <= dr <= lim.rudder_max):
        violations.append(f"rudder {math.degrees(dr):.1f} deg")
    if not (lim.thrust_min <= thr <= lim.thrust_max):
        violations.append(f"thrust {thr:.3f} N")
    if violations:
        raise TrimError(
            "trim targets need controls outside the actuator limits: "
            + ", ".join(violations), point)
    return point
