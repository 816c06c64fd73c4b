"""Planar miss-distance guidance: waypoint geometry, the PPN-equivalent
acceleration law, the minimum-turn-radius feasibility test, and the bridge
from commanded acceleration to the vehicle's yaw/sideslip rates.

Conventions: the inertial frame has x north and y east.  sigma is the
bearing of the line of sight measured from the east axis via
``atan2(xf - x, yf - y)``; chi is the velocity-vector heading from north;
``rho = pi/2 - (chi + sigma)`` (wrapped to (-pi, pi]) is the angle between
velocity and line of sight.  The miss distance ``d = r_a sin(rho)`` is
signed: its sign encodes the turn direction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .config import AeroConfig, GRAVITY
from .dynamics import beta_rate, psi_rate, dynamic_pressure
from .state import RigidBodyState


class WaypointReached(Exception):
    """Arrival signal: range below threshold (or coincident points)."""


def wrap_angle(a: float) -> float:
    """Wrap to (-pi, pi]."""
    a = math.fmod(a + math.pi, 2.0 * math.pi)
    if a <= 0.0:
        a += 2.0 * math.pi
    return a - math.pi


def default_min_turn_radius(Va: float, phi_max: float = math.radians(30.0),
                            g: float = GRAVITY) -> float:
    """Coordinated-turn radius at the bank limit: Va^2 / (g tan phi_max)."""
    return Va * Va / (g * math.tan(phi_max))


@dataclass
class GuidanceGeometry:
    sigma: float  # line-of-sight bearing from east axis (rad)
    rho: float    # velocity-to-LOS angle (rad), in (-pi, pi]
    r_a: float    # range to waypoint (m)
    d: float      # signed miss distance (m)
    chi: float    # velocity heading from north (rad)


@dataclass
class PpnParams:
    N: float = 3.0                            # navigation constant
    R_min: float = 11.3                       # minimum turn radius (m)
    r_t: float = 5.0                          # arrival threshold (m)
    rho_max: float = math.radians(20.0)       # small-angle mode gate (rad)

    def validate(self) -> None:
        if self.N < 2.0:
            raise ValueError("navigation constant must satisfy N >= 2")
        if self.R_min <= 0.0 or self.r_t <= 0.0:
            raise ValueError("R_min and r_t must be positive")

    @classmethod
    def for_airspeed(cls, Va: float, **kw) -> "PpnParams":
        return cls(R_min=default_min_turn_radius(Va), **kw)


@dataclass
class GuidanceState:
    x1: float = 0.0  # miss distance (m)
    x2: float = 0.0  # miss distance rate (m/s)


def geometry(x: float, y: float, xf: float, yf: float,
             chi: float) -> GuidanceGeometry:
    """Waypoint geometry from current position and velocity heading.

    Raises :class:`WaypointReached` when the points coincide, where the
    bearing is undefined.
    """
    dx, dy = xf - x, yf - y
    r_a = math.hypot(dx, dy)
    if r_a < 1e-12:
        raise WaypointReached("coincident with waypoint")
    sigma = math.atan2(dx, dy)
    rho = wrap_angle(0.5 * math.pi - (chi + sigma))
    return GuidanceGeometry(sigma=sigma, rho=rho, r_a=r_a,
                            d=r_a * math.sin(rho), chi=chi)


def ppn_gain(N: float, Va: float, r_a: float) -> float:
    """Miss-distance gain k1 = N Va^2 / r_a^2 (the PPN-equivalent choice)."""
    if r_a <= 0.0:
        raise WaypointReached("zero range: arrival, not a gain")
    return N * Va * Va / (r_a * r_a)


def ppn_accel(geom: GuidanceGeometry, params: PpnParams, Va: float) -> float:
    """Commanded acceleration a_c = k1 d, perpendicular to the velocity.

    Positive a_c turns the velocity vector clockwise (toward east).
    Raises :class:`WaypointReached` once the range drops to the arrival
    threshold.
    """
    if geom.r_a <= params.r_t:
        raise WaypointReached(
            f"range {geom.r_a:.2f} m inside threshold {params.r_t:.2f} m")
    return ppn_gain(params.N, Va, geom.r_a) * geom.d


def turn_feasible(r_a: float, rho: float, R_min: float) -> bool:
    """Minimum-turn-radius feasibility: r_a > 2 R_min sin(rho).

    Uses the worst admissible navigation constant N = 2; a waypoint
    failing this test cannot be captured without violating the turn
    radius.
    """
    if r_a < 0.0:
        raise ValueError("range must be non-negative")
    return r_a > 2.0 * R_min * math.sin(rho)


def guidance_derivative(gs: GuidanceState, a_c: float, N: float):
    """Small-angle guidance state equations: x1' = x2, x2' = (N-1) a_c."""
    return gs.x2, (N - 1.0) * a_c


def accel_from_dynamics(state: RigidBodyState, cfg: AeroConfig,
                        delta_r: float) -> float:
    """Realized turn acceleration a_c = Va (psi_dot + beta_dot) (m/s^2)."""
    Va = state.airspeed()
    if Va <= 0.0:
        raise ValueError("acceleration bridge requires positive airspeed")
    return Va * (psi_rate(state.q, state.r, state.phi, state.theta)
                 + beta_rate(state, delta_r, cfg))


def accel_gradient(state: RigidBodyState, cfg: AeroConfig, delta_r: float):
    """Analytic gradient of ``accel_from_dynamics``.

    Returns (grad9, d_ddr) where grad9 holds the partials over the
    9-state ordering (u, w, q, theta, h, v, p, r, phi) and d_ddr is the
    partial with respect to the rudder deflection.  Used to assemble the
    linearized guidance rows; the finite-difference oracle in the tests
    checks it.
    """
    u, v, w = state.u, state.v, state.w
    p, q, r = state.p, state.q, state.r
    phi, theta = state.phi, state.theta
    Va = state.airspeed()
    if Va <= 0.0:
        raise ValueError("gradient requires positive airspeed")
    g = cfg.gravity
    m = cfg.mass
    sphi, cphi = math.sin(phi), math.cos(phi)
    sth, cth = math.sin(theta), math.cos(theta)
    sec = 1.0 / cth

    beta = math.asin(max(-1.0, min(1.0, v / Va)))
    cbeta = math.cos(beta)
    dva = (u / Va, v / Va, w / Va)
    # beta = asin(v/Va): partials via the chain rule
    db_du = -v * dva[0] / (Va * Va * cbeta)
    db_dv = (Va - v * dva[1]) / (Va * Va * cbeta)
    db_dw = -v * dva[2] / (Va * Va * cbeta)

    psid = (q * sphi + r * cphi) * sec

    # side force Y = 0.5 rho S [Va^2 Cyb beta + (b/2) Va (Cyp p + Cyr r)
    #                           + Va^2 Cydr dr]
    halfRhoS = 0.5 * cfg.rho_air * cfg.S
    rate_term = 0.5 * cfg.b * (cfg.Cyp * p + cfg.Cyr * r)
    y = halfRhoS * (Va * Va * (cfg.Cyb * beta + cfg.Cydr * delta_r)
                    + Va * rate_term)

    def dy_duvw(dva_i, db_i):
        return halfRhoS * (2.0 * Va * dva_i * (cfg.Cyb * beta + cfg.Cydr * delta_r)
                           + Va * Va * cfg.Cyb * db_i + dva_i * rate_term)

    dy_dp = halfRhoS * Va * 0.5 * cfg.b * cfg.Cyp
    dy_dr = halfRhoS * Va * 0.5 * cfg.b * cfg.Cyr
    dy_ddr = halfRhoS * Va * Va * cfg.Cydr

    # a_c = Va psid + G,  G = p w - r u + g cth sphi + Y/m
    d_du = psid * dva[0] + (-r + dy_duvw(dva[0], db_du) / m)
    d_dv = psid * dva[1] + dy_duvw(dva[1], db_dv) / m
    d_dw = psid * dva[2] + (p + dy_duvw(dva[2], db_dw) / m)
    d_dp = w + dy_dp / m
    d_dq = Va * sphi * sec
    d_dr = -u + Va * cphi * sec + dy_dr / m
    d_dphi = Va * (q * cphi - r * sphi) * sec + g * cth * cphi
    d_dtheta = Va * psid * math.tan(theta) - g * sth * sphi

    grad9 = (d_du, d_dw, d_dq, d_dtheta, 0.0, d_dv, d_dp, d_dr, d_dphi)
    return grad9, dy_ddr / m
