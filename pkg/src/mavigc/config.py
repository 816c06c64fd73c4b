"""Vehicle configuration: mass properties, aerodynamic coefficient set,
propulsion/coupling terms, servo parameters and actuator limits.

All coefficient values live here as data; the dynamics routines never
hard-code them.  The shipped defaults describe a 53 g, 150 mm wingspan
rectangular-planform MAV cruising at 8 m/s, with three cross-coupling
sources (motor-propeller counter torque, asymmetric propeller wake on the
fin, and propeller gyroscopic momentum) so the linearized model has
nonzero off-diagonal blocks and an unstable spiral mode.

Configuration files are plain-text INI (``section`` headers and
``key = value`` pairs, SI units, angles in degrees at this boundary only).
"""

from __future__ import annotations

import configparser
import math
from dataclasses import dataclass, field, fields, replace
from pathlib import Path

import numpy as np

GRAVITY = 9.80665  # m/s^2


class ConfigError(ValueError):
    """Raised for malformed or physically inconsistent configuration."""


@dataclass
class ServoParams:
    omega: float = 48.7  # natural frequency (rad/s)
    zeta: float = 0.742  # damping ratio

    def validate(self) -> None:
        if self.omega <= 0.0 or self.zeta <= 0.0:
            raise ConfigError("servo omega and zeta must be positive")


@dataclass
class ActuatorLimits:
    """Hard deflection/thrust clamps, radians and newtons."""
    elevator_min: float = math.radians(-35.0)
    elevator_max: float = math.radians(15.0)
    rudder_min: float = math.radians(-25.0)
    rudder_max: float = math.radians(25.0)
    thrust_min: float = 0.0
    thrust_max: float = 0.45

    def clamp_elevator(self, d: float) -> float:
        return min(self.elevator_max, max(self.elevator_min, d))

    def clamp_rudder(self, d: float) -> float:
        return min(self.rudder_max, max(self.rudder_min, d))

    def clamp_thrust(self, t: float) -> float:
        return min(self.thrust_max, max(self.thrust_min, t))

    def validate(self) -> None:
        if not (self.elevator_min < self.elevator_max
                and self.rudder_min < self.rudder_max
                and self.thrust_min < self.thrust_max):
            raise ConfigError("actuator limit intervals must be non-empty")


@dataclass
class AeroConfig:
    """Mass properties and dimensionless coefficient set."""

    # mass properties
    mass: float = 0.053    # take-off mass (kg)
    Ixx: float = 1.6e-5    # roll inertia (kg m^2)
    Iyy: float = 9.5e-5    # pitch inertia (kg m^2)
    Izz: float = 1.0e-4    # yaw inertia (kg m^2)
    Ixz: float = 2.0e-6    # roll/yaw product of inertia (kg m^2)

    # geometry
    S: float = 0.0165      # wing reference area (m^2)
    b: float = 0.15        # wing span (m)
    c: float = 0.11        # wing chord (m)

    rho_air: float = 1.225  # air density (kg/m^3)
    gravity: float = GRAVITY

    # longitudinal coefficients
    CL0: float = 0.24
    CLa: float = 2.90      # lift slope, low aspect ratio wing (1/rad)
    CLq: float = 2.5
    CLde: float = 0.35
    CD0: float = 0.055
    k_induced: float = 0.30  # induced drag factor, CD = CD0 + k*CL^2
    Cm0: float = 0.025
    Cma: float = -0.60
    Cmq: float = -3.0
    Cmde: float = -0.55

    # lateral-directional coefficients
    Cyb: float = -0.35
    Cyp: float = -0.02
    Cyr: float = 0.22
    Cydr: float = 0.20
    Clb: float = -0.015
    Clp: float = -0.40
    Clr: float = 0.18
    Cldr: float = 0.030
    Cnb: float = 0.35
    Cnp: float = -0.035
    Cnr: float = -0.055
    Cndr: float = -0.16

    # propulsion and cross-coupling sources
    thrust_max: float = 0.45       # motor thrust ceiling (N)
    counter_torque: float = 0.001  # prop reaction roll moment per N thrust (m)
    wake_yaw: float = 0.006        # asymmetric-wake yaw moment per N thrust (m)
    prop_momentum: float = 4.0e-4  # prop angular momentum about body x (kg m^2/s)

    servo: ServoParams = field(default_factory=ServoParams)
    limits: ActuatorLimits = field(default_factory=ActuatorLimits)

    @property
    def inertia(self) -> np.ndarray:
        return np.array([[self.Ixx, 0.0, -self.Ixz],
                         [0.0, self.Iyy, 0.0],
                         [-self.Ixz, 0.0, self.Izz]])

    def has_coupling(self) -> bool:
        return any(abs(v) > 0.0 for v in
                   (self.counter_torque, self.wake_yaw,
                    self.prop_momentum, self.Ixz))

    def validate(self) -> None:
        if self.mass <= 0.0:
            raise ConfigError("mass must be positive")
        if min(self.S, self.b, self.c, self.rho_air) <= 0.0:
            raise ConfigError("S, b, c and air density must be positive")
        inertia = self.inertia
        if not np.allclose(inertia, inertia.T):
            raise ConfigError("inertia tensor must be symmetric")
        if np.linalg.eigvalsh(inertia).min() <= 0.0:
            raise ConfigError("inertia tensor must be positive definite")
        self.servo.validate()
        self.limits.validate()


def default_config() -> AeroConfig:
    cfg = AeroConfig()
    cfg.validate()
    return cfg


# Config-file keys that are angles and therefore expressed in degrees at the
# file boundary (radians internally).
_DEGREE_LIMIT_KEYS = {
    "elevator_min", "elevator_max", "rudder_min", "rudder_max",
}


def _apply_section(obj, section, degrees=()):
    for key, raw in section.items():
        if not hasattr(obj, key):
            raise ConfigError(f"unknown key '{key}' in section [{section.name}]")
        try:
            value = float(raw)
        except ValueError as exc:
            raise ConfigError(f"value for '{key}' is not a number: {raw!r}") from exc
        if key in degrees:
            value = math.radians(value)
        setattr(obj, key, value)


def load_config(path) -> AeroConfig:
    """Load an :class:`AeroConfig` from an INI-style file.

    Recognized sections: ``[vehicle]`` (mass, inertia, geometry and all
    dimensionless coefficients), ``[servo]`` (omega, zeta) and ``[limits]``
    (deflection bounds in degrees, thrust bounds in newtons).  Keys missing
    from the file keep their default values.
    """
    parser = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"config file not found: {path}")
    try:
        parser.read(path)
    except configparser.Error as exc:
        raise ConfigError(f"cannot parse {path}: {exc}") from exc

    cfg = AeroConfig()
    known = {"vehicle", "servo", "limits", "trim", "guidance", "weights",
             "ga", "scenario"}
    for name in parser.sections():
        if name not in known:
            raise ConfigError(f"unknown section [{name}]")
    if parser.has_section("vehicle"):
        _apply_section(cfg, parser["vehicle"])
    if parser.has_section("servo"):
        _apply_section(cfg.servo, parser["servo"])
    if parser.has_section("limits"):
        _apply_section(cfg.limits, parser["limits"], degrees=_DEGREE_LIMIT_KEYS)
    cfg.validate()
    return cfg


def config_parser(path) -> configparser.ConfigParser:
    """Parse the shared config file once for the non-vehicle sections."""
    parser = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
    parser.read(Path(path))
    return parser


def save_config(cfg: AeroConfig, path) -> None:
    """Write a full config file (all keys explicit, angles in degrees)."""
    parser = configparser.ConfigParser()
    parser["vehicle"] = {
        f.name: repr(getattr(cfg, f.name))
        for f in fields(cfg) if f.name not in ("servo", "limits")
    }
    parser["servo"] = {"omega": repr(cfg.servo.omega),
                       "zeta": repr(cfg.servo.zeta)}
    lim = cfg.limits
    parser["limits"] = {
        "elevator_min": repr(math.degrees(lim.elevator_min)),
        "elevator_max": repr(math.degrees(lim.elevator_max)),
        "rudder_min": repr(math.degrees(lim.rudder_min)),
        "rudder_max": repr(math.degrees(lim.rudder_max)),
        "thrust_min": repr(lim.thrust_min),
        "thrust_max": repr(lim.thrust_max),
    }
    with open(path, "w") as fh:
        parser.write(fh)


def decoupled_config() -> AeroConfig:
    """Symmetric vehicle with every cross-coupling source removed."""
    cfg = default_config()
    return replace(cfg, counter_torque=0.0, wake_yaw=0.0,
                   prop_momentum=0.0, Ixz=0.0)
