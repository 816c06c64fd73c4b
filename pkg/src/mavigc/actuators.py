"""Second-order control-surface servos and the thrust channel.

Both surface servos are unit-DC-gain second-order systems
``dd'' = omega^2 (cmd - dd) - 2 zeta omega dd'`` whose position output is
hard-clamped to the deflection limits.  Thrust has no dynamics, only the
[0, thrust_max] clamp.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

from .config import ActuatorLimits, ServoParams


@dataclass
class ServoState:
    position: float = 0.0  # deflection (rad)
    rate: float = 0.0      # deflection rate (rad/s)


@dataclass
class ActuatorState:
    elevator: ServoState
    rudder: ServoState
    thrust: float = 0.0  # N

    @classmethod
    def at(cls, delta_e: float, delta_r: float, thrust: float) -> "ActuatorState":
        return cls(elevator=ServoState(delta_e, 0.0),
                   rudder=ServoState(delta_r, 0.0),
                   thrust=thrust)

    def copy(self) -> "ActuatorState":
        return ActuatorState(elevator=replace(self.elevator),
                             rudder=replace(self.rudder),
                             thrust=self.thrust)


def servo_derivative(s: ServoState, cmd: float, params: ServoParams):
    """State derivative of the unit-gain second-order servo."""
    acc = params.omega ** 2 * (cmd - s.position) - 2.0 * params.zeta * params.omega * s.rate
    return s.rate, acc


def servo_step(cmd: float, s: ServoState, params: ServoParams,
               lo: float, hi: float, dt: float) -> ServoState:
    """Advance one servo by ``dt`` with RK4 and clamp the position output.

    The commanded value may lie outside the limits; the clamp absorbs it.
    """
    if dt <= 0.0:
        raise ValueError("dt must be positive")
    p0, r0 = s.position, s.rate

    def f(p, r):
        return r, params.omega ** 2 * (cmd - p) - 2.0 * params.zeta * params.omega * r

    k1p, k1r = f(p0, r0)
    k2p, k2r = f(p0 + 0.5 * dt * k1p, r0 + 0.5 * dt * k1r)
    k3p, k3r = f(p0 + 0.5 * dt * k2p, r0 + 0.5 * dt * k2r)
    k4p, k4r = f(p0 + dt * k3p, r0 + dt * k3r)
    p = p0 + dt / 6.0 * (k1p + 2.0 * k2p + 2.0 * k3p + k4p)
    r = r0 + dt / 6.0 * (k1r + 2.0 * k2r + 2.0 * k3r + k4r)
    if p > hi:
        p, r = hi, min(r, 0.0)
    elif p < lo:
        p, r = lo, max(r, 0.0)
    return ServoState(position=p, rate=r)


def actuator_step(commands, act: ActuatorState, params: ServoParams,
                  limits: ActuatorLimits, dt: float) -> ActuatorState:
    """Advance elevator/rudder servos and clamp the thrust command.

    ``commands`` is (elevator_cmd, rudder_cmd, thrust_cmd).
    """
    de_cmd, dr_cmd, dt_cmd = commands
    return ActuatorState(
        elevator=servo_step(de_cmd, act.elevator, params,
                            limits.elevator_min, limits.elevator_max, dt),
        rudder=servo_step(dr_cmd, act.rudder, params,
                          limits.rudder_min, limits.rudder_max, dt),
        thrust=limits.clamp_thrust(dt_cmd),
    )
