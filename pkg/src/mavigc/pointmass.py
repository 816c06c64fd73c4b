"""Constant-speed 2D point-mass kinematics under the PPN-equivalent
guidance law.

Used as the desk-scale validation vehicle for the guidance theory: the
state is (x, y, chi) with x' = Va cos chi, y' = Va sin chi and
chi' = a_c / Va, so the applied acceleration is perpendicular to the
velocity by construction.  A batch RK4 integrator propagates many runs at
once for the convergence studies.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .guidance import PpnParams


@dataclass
class PointMassRun:
    """Sampled trajectory of one kinematic run (arrays over time)."""
    t: np.ndarray
    x: np.ndarray
    y: np.ndarray
    chi: np.ndarray
    r_a: np.ndarray
    rho: np.ndarray
    d: np.ndarray
    a_c: np.ndarray
    reached: bool


def _geometry_arrays(x, y, chi, xf, yf):
    dx, dy = xf - x, yf - y
    r_a = np.hypot(dx, dy)
    sigma = np.arctan2(dx, dy)
    rho = np.mod(0.5 * np.pi - (chi + sigma) + np.pi, 2.0 * np.pi) - np.pi
    d = r_a * np.sin(rho)
    return r_a, rho, d


def simulate_batch(x0, y0, chi0, xf, yf, params: PpnParams, Va: float,
                   dt: float = 0.02, t_max: float = 120.0):
    """Propagate a batch of point-mass runs toward per-run waypoints.

    Returns (reached, r_a_final, steps): boolean array marking runs whose
    range dropped below ``params.r_t`` within ``t_max``, the final range,
    and the number of steps taken.
    """
    x = np.array(x0, dtype=float).copy()
    y = np.array(y0, dtype=float).copy()
    chi = np.array(chi0, dtype=float).copy()
    xf = np.asarray(xf, dtype=float)
    yf = np.asarray(yf, dtype=float)
    n = x.size
    active = np.ones(n, dtype=bool)
    n_steps = int(round(t_max / dt))

    def rates(x_, y_, chi_):
        r_a, rho, d = _geometry_arrays(x_, y_, chi_, xf, yf)
        safe = np.maximum(r_a, 1e-9)
        a_c = params.N * Va * Va / (safe * safe) * d
        return Va * np.cos(chi_), Va * np.sin(chi_), a_c / Va

    for _ in range(n_steps):
        if not active.any():
            break
        k1 = rates(x, y, chi)
        k2 = rates(x + 0.5 * dt * k1[0], y + 0.5 * dt * k1[1], chi + 0.5 * dt * k1[2])
        k3 = rates(x + 0.5 * dt * k2[0], y + 0.5 * dt * k2[1], chi + 0.5 * dt * k2[2])
        k4 = rates(x + dt * k3[0], y + dt * k3[1], chi + dt * k3[2])
        step = [dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]) for i in range(3)]
        x = np.where(active, x + step[0], x)
        y = np.where(active, y + step[1], y)
        chi = np.where(active, chi + step[2], chi)
        r_a = np.hypot(xf - x, yf - y)
        active &= r_a >= params.r_t

    r_a = np.hypot(xf - x, yf - y)
    return ~active, r_a, n_steps


def simulate_run(x0: float, y0: float, chi0: float, xf: float, yf: float,
                 params: PpnParams, Va: float, dt: float = 0.002,
                 t_max: float = 120.0) -> PointMassRun:
    """Single run with full time histories (finer default step for the
    finite-difference oracles)."""
    n_steps = int(round(t_max / dt))
    ts, xs, ys, chis = [], [], [], []
    x, y, chi = float(x0), float(y0), float(chi0)
    reached = False

    def rates(x_, y_, chi_):
        dx, dy = xf - x_, yf - y_
        r_a = max(np.hypot(dx, dy), 1e-9)
        sigma = np.arctan2(dx, dy)
        rho = (0.5 * np.pi - (chi_ + sigma) + np.pi) % (2.0 * np.pi) - np.pi
        d = r_a * np.sin(rho)
        a_c = params.N * Va * Va / (r_a * r_a) * d
        return Va * np.cos(chi_), Va * np.sin(chi_), a_c / Va

    for k in range(n_steps + 1):
        ts.append(k * dt)
        xs.append(x)
        ys.append(y)
        chis.append(chi)
        if np.hypot(xf - x, yf - y) < params.r_t:
            reached = True
            break
        k1 = rates(x, y, chi)
        k2 = rates(x + 0.5 * dt * k1[0], y + 0.5 * dt * k1[1], chi + 0.5 * dt * k1[2])
        k3 = rates(x + 0.5 * dt * k2[0], y + 0.5 * dt * k2[1], chi + 0.5 * dt * k2[2])
        k4 = rates(x + dt * k3[0], y + dt * k3[1], chi + dt * k3[2])
        x += dt / 6.0 * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0])
        y += dt / 6.0 * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1])
        chi += dt / 6.0 * (k1[2] + 2.0 * k2[2] + 2.0 * k3[2] + k4[2])

    t = np.array(ts)
    x_arr, y_arr, chi_arr = np.array(xs), np.array(ys), np.array(chis)
    r_a, rho, d = _geometry_arrays(x_arr, y_arr, chi_arr, xf, yf)
    a_c = params.N * Va * Va / np.maximum(r_a, 1e-9) ** 2 * d
    return PointMassRun(t=t, x=x_arr, y=y_arr, chi=chi_arr,
                        r_a=r_a, rho=rho, d=d, a_c=a_c, reached=reached)


def sample_feasible_geometry(rng: np.random.Generator, params: PpnParams,
                             n_required: float | None = None,
                             r_range=(30.0, 200.0),
                             rho_limit: float = np.radians(150.0)):
    """Draw a random start (at the origin, heading north) and waypoint whose
    initial geometry passes the turn-radius test.

    ``n_required`` switches the test to the pre-substitution inequality
    r_a > N R_min sin(rho) for the given navigation constant; by default
    the published N = 2 form is used.
    """
    n_eff = 2.0 if n_required is None else float(n_required)
    while True:
        r_a = rng.uniform(*r_range)
        rho = rng.uniform(-rho_limit, rho_limit)
        if r_a <= n_eff * params.R_min * np.sin(rho):
            continue
        # heading north (chi = 0): rho = pi/2 - sigma  =>  sigma = pi/2 - rho
        sigma = 0.5 * np.pi - rho
        xfw = r_a * np.sin(sigma)
        yfw = r_a * np.cos(sigma)
        return 0.0, 0.0, 0.0, float(xfw), float(yfw)
