"""Nonlinear 6DOF rigid-body dynamics of the MAV.

Forces and moments use a flat-plate-plus-derivative aerodynamic model
driven entirely by the :class:`~mavigc.config.AeroConfig` coefficient set.
The yaw kinematics and the sideslip-rate/side-force relations are the load
bearing pieces for the guidance bridge:

* ``psi_dot = (q sin phi + r cos phi) sec theta``
* ``beta_dot = (p w - r u + g cos theta sin phi + Y_a / m) / Va``
* ``Y_a = Qbar S (Cyb beta + Cyp (b/2Va) p + Cyr (b/2Va) r + Cydr dr)``

Cross coupling between the longitudinal and lateral axes comes from the
propeller counter torque (roll moment per newton of thrust), the
asymmetric wake yaw moment, the propeller gyroscopic momentum, and the
Ixz inertia product, all configurable.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .config import AeroConfig
from .state import RigidBodyState, GimbalLockError, THETA_LIMIT


@dataclass
class StateDerivative:
    u: float
    v: float
    w: float
    p: float
    q: float
    r: float
    phi: float
    theta: float
    psi: float
    x: float
    y: float
    h: float

    def body_acceleration_norm(self) -> float:
        return math.sqrt(self.u ** 2 + self.v ** 2 + self.w ** 2
                         + self.p ** 2 + self.q ** 2 + self.r ** 2)


def dynamic_pressure(Va: float, cfg: AeroConfig) -> float:
    return 0.5 * cfg.rho_air * Va * Va


def side_force(beta: float, p: float, r: float, delta_r: float,
               Va: float, cfg: AeroConfig) -> float:
    """Aerodynamic side force Y_a = Qbar S Cy (N).

    Cy collects the sideslip, roll-rate, yaw-rate and rudder contributions
    with the b/(2 Va) rate normalization.
    """
    if Va <= 0.0:
        raise ValueError("side force requires positive airspeed")
    bn = 0.5 * cfg.b / Va
    cy = (cfg.Cyb * beta + cfg.Cyp * bn * p + cfg.Cyr * bn * r
          + cfg.Cydr * delta_r)
    return dynamic_pressure(Va, cfg) * cfg.S * cy


def psi_rate(q: float, r: float, phi: float, theta: float) -> float:
    """Yaw-angle Euler kinematic rate; singular at |theta| = 90 deg."""
    ct = math.cos(theta)
    if abs(theta) >= THETA_LIMIT:
        raise GimbalLockError(
            f"sec(theta) unbounded at theta = {math.degrees(theta):.1f} deg")
    return (q * math.sin(phi) + r * math.cos(phi)) / ct


def beta_rate(state: RigidBodyState, delta_r: float, cfg: AeroConfig) -> float:
    """Sideslip-angle rate from the lateral force balance (rad/s)."""
    Va = state.airspeed()
    if Va <= 0.0:
        raise ValueError("beta rate requires positive airspeed")
    ya = side_force(state.beta(), state.p, state.r, delta_r, Va, cfg)
    return (state.p * state.w - state.r * state.u
            + cfg.gravity * math.cos(state.theta) * math.sin(state.phi)
            + ya / cfg.mass) / Va


def forces_moments(state: RigidBodyState, delta_e: float, delta_r: float,
                   thrust: float, cfg: AeroConfig):
    """Body-axis aerodynamic + propulsive forces (N) and moments (N m)."""
    Va = state.airspeed()
    if Va <= 0.0:
        raise ValueError("aerodynamic forces require positive airspeed")
    alpha = math.atan2(state.w, state.u)
    beta = math.asin(max(-1.0, min(1.0, state.v / Va)))
    qbar = dynamic_pressure(Va, cfg)
    qs = qbar * cfg.S
    bn = 0.5 * cfg.b / Va
    cn_ = 0.5 * cfg.c / Va

    cl_lift = cfg.CL0 + cfg.CLa * alpha + cfg.CLq * cn_ * state.q + cfg.CLde * delta_e
    cd = cfg.CD0 + cfg.k_induced * cl_lift * cl_lift
    lift = qs * cl_lift
    drag = qs * cd

    sa, ca = math.sin(alpha), math.cos(alpha)
    fx = -drag * ca + lift * sa + thrust
    fy = qs * (cfg.Cyb * beta + cfg.Cyp * bn * state.p + cfg.Cyr * bn * state.r
               + cfg.Cydr * delta_r)
    fz = -drag * sa - lift * ca

    ml = qs * cfg.b * (cfg.Clb * beta + cfg.Clp * bn * state.p
                       + cfg.Clr * bn * state.r + cfg.Cldr * delta_r)
    ml -= cfg.counter_torque * thrust
    mm = qs * cfg.c * (cfg.Cm0 + cfg.Cma * alpha + cfg.Cmq * cn_ * state.q
                       + cfg.Cmde * delta_e)
    mn = qs * cfg.b * (cfg.Cnb * beta + cfg.Cnp * bn * state.p
                       + cfg.Cnr * bn * state.r + cfg.Cndr * delta_r)
    mn += cfg.wake_yaw * thrust

    # propeller gyroscopic moment: -omega x H with H = (h_p, 0, 0)
    hp = cfg.prop_momentum
    mm -= hp * state.r
    mn += hp * state.q

    return (fx, fy, fz), (ml, mm, mn)


def sixdof_derivative(state: RigidBodyState, delta_e: float, delta_r: float,
                      thrust: float, cfg: AeroConfig,
                      gravity_only: bool = False) -> StateDerivative:
    """Time derivative of all twelve kinematic/dynamic states.

    ``gravity_only`` switches off aerodynamic and propulsive terms, which
    is useful for force-free kinematic checks.

    Raises :class:`GimbalLockError` near the Euler pitch singularity.
    """
    state.check_pitch()
    g = cfg.gravity
    sphi, cphi = math.sin(state.phi), math.cos(state.phi)
    sth, cth = math.sin(state.theta), math.cos(state.theta)
    spsi, cpsi = math.sin(state.psi), math.cos(state.psi)

    if gravity_only:
        fx = fy = fz = 0.0
        ml = mm = mn = 0.0
        gx = gy = gz = 0.0
    else:
        (fx, fy, fz), (ml, mm, mn) = forces_moments(
            state, delta_e, delta_r, thrust, cfg)
        gx, gy, gz = -g * sth, g * cth * sphi, g * cth * cphi

    m = cfg.mass
    u, v, w = state.u, state.v, state.w
    p, q, r = state.p, state.q, state.r

    du = r * v - q * w + gx + fx / m
    dv = p * w - r * u + gy + fy / m
    dw = q * u - p * v + gz + fz / m

    # Euler rotational dynamics with Ixz product and prop momentum already
    # folded into the moments
    Ixx, Iyy, Izz, Ixz = cfg.Ixx, cfg.Iyy, cfg.Izz, cfg.Ixz
    hx = Ixx * p - Ixz * r
    hy = Iyy * q
    hz = Izz * r - Ixz * p
    tl = ml - (q * hz - r * hy)
    tm = mm - (r * hx - p * hz)
    tn = mn - (p * hy - q * hx)
    # solve [Ixx -Ixz; -Ixz Izz] [dp; dr] = [tl; tn]
    det = Ixx * Izz - Ixz * Ixz
    dp = (Izz * tl + Ixz * tn) / det
    dr = (Ixz * tl + Ixx * tn) / det
    dq = tm / Iyy

    dphi = p + math.tan(state.theta) * (q * sphi + r * cphi)
    dtheta = q * cphi - r * sphi
    dpsi = (q * sphi + r * cphi) / cth

    dx = (cpsi * cth * u + (cpsi * sth * sphi - spsi * cphi) * v
          + (cpsi * sth * cphi + spsi * sphi) * w)
    dy = (spsi * cth * u + (spsi * sth * sphi + cpsi * cphi) * v
          + (spsi * sth * cphi - cpsi * sphi) * w)
    dh = u * sth - v * sphi * cth - w * cphi * cth

    return StateDerivative(du, dv, dw, dp, dq, dr,
                           dphi, dtheta, dpsi, dx, dy, dh)


def integrate_state(state: RigidBodyState, delta_e: float, delta_r: float,
                    thrust: float, cfg: AeroConfig, dt: float,
                    gravity_only: bool = False) -> RigidBodyState:
    """One RK4 step of the 12-state rigid body with frozen controls."""

    def deriv(s):
        return sixdof_derivative(s, delta_e, delta_r, thrust, cfg,
                                 gravity_only=gravity_only)

    def shift(s, d, scale):
        return RigidBodyState(
            u=s.u + scale * d.u, v=s.v + scale * d.v, w=s.w + scale * d.w,
            p=s.p + scale * d.p, q=s.q + scale * d.q, r=s.r + scale * d.r,
            phi=s.phi + scale * d.phi, theta=s.theta + scale * d.theta,
            psi=s.psi + scale * d.psi, x=s.x + scale * d.x,
            y=s.y + scale * d.y, h=s.h + scale * d.h)

    k1 = deriv(state)
    k2 = deriv(shift(state, k1, 0.5 * dt))
    k3 = deriv(shift(state, k2, 0.5 * dt))
    k4 = deriv(shift(state, k3, dt))

    def comb(a, b, c, d):
        return (a + 2.0 * b + 2.0 * c + d) / 6.0

    return RigidBodyState(
        u=state.u + dt * comb(k1.u, k2.u, k3.u, k4.u),
        v=state.v + dt * comb(k1.v, k2.v, k3.v, k4.v),
        w=state.w + dt * comb(k1.w, k2.w, k3.w, k4.w),
        p=state.p + dt * comb(k1.p, k2.p, k3.p, k4.p),
        q=state.q + dt * comb(k1.q, k2.q, k3.q, k4.q),
        r=state.r + dt * comb(k1.r, k2.r, k3.r, k4.r),
        phi=state.phi + dt * comb(k1.phi, k2.phi, k3.phi, k4.phi),
        theta=state.theta + dt * comb(k1.theta, k2.theta, k3.theta, k4.theta),
        psi=state.psi + dt * comb(k1.psi, k2.psi, k3.psi, k4.psi),
        x=state.x + dt * comb(k1.x, k2.x, k3.x, k4.x),
        y=state.y + dt * comb(k1.y, k2.y, k3.y, k4.y),
        h=state.h + dt * comb(k1.h, k2.h, k3.h, k4.h),
    )
