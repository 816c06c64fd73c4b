"""Rigid-body state container for the 6DOF vehicle model.

Body axes follow the usual forward-right-down convention; the inertial
frame is local NED with x north, y east, and h altitude (positive up).
All angles are in radians internally.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace


class GimbalLockError(RuntimeError):
    """Raised when |theta| approaches 90 deg and sec(theta) blows up."""


# Pitch magnitude beyond which the Euler kinematics are considered singular.
THETA_LIMIT = math.radians(85.0)


@dataclass
class RigidBodyState:
    u: float = 0.0      # body-axis forward velocity (m/s)
    v: float = 0.0      # body-axis lateral velocity (m/s)
    w: float = 0.0      # body-axis vertical velocity (m/s)
    p: float = 0.0      # roll rate (rad/s)
    q: float = 0.0      # pitch rate (rad/s)
    r: float = 0.0      # yaw rate (rad/s)
    phi: float = 0.0    # roll angle (rad)
    theta: float = 0.0  # pitch angle (rad)
    psi: float = 0.0    # yaw angle (rad)
    x: float = 0.0      # inertial north position (m)
    y: float = 0.0      # inertial east position (m)
    h: float = 0.0      # altitude (m)

    def airspeed(self) -> float:
        return math.sqrt(self.u * self.u + self.v * self.v + self.w * self.w)

    def alpha(self) -> float:
        """Angle of attack (rad)."""
        return math.atan2(self.w, self.u)

    def beta(self) -> float:
        """Sideslip angle (rad)."""
        va = self.airspeed()
        if va <= 0.0:
            raise ValueError("sideslip undefined at zero airspeed")
        return math.asin(max(-1.0, min(1.0, self.v / va)))

    def copy(self) -> "RigidBodyState":
        return replace(self)

    def as_tuple(self) -> tuple:
        return (self.u, self.v, self.w, self.p, self.q, self.r,
                self.phi, self.theta, self.psi, self.x, self.y, self.h)

    @classmethod
    def from_tuple(cls, t) -> "RigidBodyState":
        return cls(*t)

    def check_pitch(self) -> None:
        if abs(self.theta) >= THETA_LIMIT:
            raise GimbalLockError(
                f"pitch angle {math.degrees(self.theta):.1f} deg exceeds the "
                f"{math.degrees(THETA_LIMIT):.0f} deg Euler singularity guard")


# Ordering of the 9 states used by the linearized vehicle model: the
# longitudinal set (u, w, q, theta, h) followed by the lateral set
# (v, p, r, phi).
NINE_STATE_LABELS = ("u", "w", "q", "theta", "h", "v", "p", "r", "phi")

N_LONGITUDINAL = 5  # u, w, q, theta, h
N_LATERAL = 4       # v, p, r, phi


def nine_state_vector(s: RigidBodyState) -> list:
    """Project a full state onto the 9-state linear-model ordering."""
    return [s.u, s.w, s.q, s.theta, s.h, s.v, s.p, s.r, s.phi]


def apply_nine_state(base: RigidBodyState, vec) -> RigidBodyState:
    """Rebuild a full state from a 9-vector, keeping psi/x/y of ``base``."""
    u, w, q, theta, h, v, p, r, phi = (float(c) for c in vec)
    return RigidBodyState(u=u, v=v, w=w, p=p, q=q, r=r,
                          phi=phi, theta=theta, psi=base.psi,
                          x=base.x, y=base.y, h=h)
