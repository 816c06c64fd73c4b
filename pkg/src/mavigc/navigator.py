"""Waypoint navigation state machine.

Mode selection per step: arrival check first, then the small-angle gate
(|rho| above the gate angle commands a constant-roll turn), then the
minimum-turn-radius feasibility test; only when all pass is the
integrated-guidance tracking mode commanded.  A dwell-count hysteresis
gate keeps the angle-gate decision from chattering at the boundary.
"""

from __future__ import annotations

import csv
import enum
import math
from dataclasses import dataclass, field
from pathlib import Path

from .guidance import GuidanceGeometry, PpnParams, turn_feasible


class WaypointStatus(enum.Enum):
    PENDING = "pending"
    ACTIVE = "active"
    REACHED = "reached"
    INFEASIBLE = "infeasible"


class NavMode(enum.Enum):
    ROLL_HOLD = "roll_hold"
    IGC_TRACK = "igc_track"


class NavEventKind(enum.Enum):
    WAYPOINT_REACHED = "waypoint_reached"
    WAYPOINT_INFEASIBLE = "waypoint_infeasible"
    PLAN_COMPLETE = "plan_complete"


@dataclass
class NavEvent:
    kind: NavEventKind
    waypoint_index: int | None = None


@dataclass
class Waypoint:
    x: float  # north (m)
    y: float  # east (m)
    status: WaypointStatus = WaypointStatus.PENDING


@dataclass
class NavCommand:
    mode: NavMode
    phi_ref: float | None = None        # roll reference (rad), roll hold only
    y_ref: tuple | None = None          # (h_ref, x1_ref), tracking only


@dataclass
class WaypointPlan:
    waypoints: list
    r_t: float = 5.0        # arrival threshold (m)
    alt_ref: float = 20.0   # mission altitude reference (m)

    def __post_init__(self):
        self.waypoints = [wp if isinstance(wp, Waypoint) else Waypoint(*wp)
                          for wp in self.waypoints]
        for wp in self.waypoints:
            wp.status = WaypointStatus.PENDING
        if self.waypoints:
            self.waypoints[0].status = WaypointStatus.ACTIVE

    @classmethod
    def from_csv(cls, path, r_t: float = 5.0,
                 alt_ref: float = 20.0) -> "WaypointPlan":
        """Load waypoints from a CSV file with a required ``x,y`` header."""
        path = Path(path)
        with open(path, newline="") as fh:
            reader = csv.reader(fh)
            header = next(reader, None)
            if header is None or [c.strip().lower() for c in header[:2]] != ["x", "y"]:
                raise ValueError(
                    f"{path}: waypoint CSV must start with an 'x,y' header")
            pts = [(float(row[0]), float(row[1])) for row in reader if row]
        return cls(waypoints=pts, r_t=r_t, alt_ref=alt_ref)

    @property
    def active_index(self) -> int | None:
        for i, wp in enumerate(self.waypoints):
            if wp.status is WaypointStatus.ACTIVE:
                return i
        return None

    @property
    def active(self) -> Waypoint | None:
        i = self.active_index
        return None if i is None else self.waypoints[i]

    @property
    def complete(self) -> bool:
        return self.active is None

    def _advance(self, status: WaypointStatus) -> NavEvent:
        i = self.active_index
        self.waypoints[i].status = status
        kind = (NavEventKind.WAYPOINT_REACHED
                if status is WaypointStatus.REACHED
                else NavEventKind.WAYPOINT_INFEASIBLE)
        if i + 1 < len(self.waypoints):
            self.waypoints[i + 1].status = WaypointStatus.ACTIVE
        return NavEvent(kind=kind, waypoint_index=i)


@dataclass
class NavConfig:
    phi_r: float = math.radians(10.0)     # roll-hold reference magnitude (rad)
    phi_max: float = math.radians(30.0)   # bank limit (rad)
    dwell: int = 3                        # hysteresis dwell count (samples)
    x1_limit: float = 20.0                # miss-distance feedback clamp (m)

    def validate(self) -> None:
        if not (0.0 < self.phi_r < self.phi_max):
            raise ValueError("need 0 < phi_r < phi_max")
        if self.dwell < 1:
            raise ValueError("dwell count must be at least 1")
        if self.x1_limit <= 0.0:
            raise ValueError("miss-distance feedback clamp must be positive")


def nav_step(geom: GuidanceGeometry, plan: WaypointPlan, params: PpnParams,
             nav: NavConfig | None = None):
    """One raw decision of the waypoint algorithm (no hysteresis).

    Returns a :class:`NavCommand`, or a :class:`NavEvent` when the active
    waypoint is resolved (reached/infeasible) or the plan is complete.
    Priority: arrival > angle gate > feasibility > tracking.
    """
    nav = nav or NavConfig()
    if plan.complete:
        return NavEvent(kind=NavEventKind.PLAN_COMPLETE)
    if geom.r_a < plan.r_t:
        return plan._advance(WaypointStatus.REACHED)
    if abs(geom.rho) > params.rho_max:
        return NavCommand(mode=NavMode.ROLL_HOLD,
                          phi_ref=math.copysign(nav.phi_r, geom.rho))
    if not turn_feasible(geom.r_a, geom.rho, params.R_min):
        return plan._advance(WaypointStatus.INFEASIBLE)
    return NavCommand(mode=NavMode.IGC_TRACK,
                      y_ref=(plan.alt_ref, 0.0))


def hysteresis_gate(rho_history, rho_max: float, current: NavMode,
                    dwell: int = 3) -> NavMode:
    """Dwell-count gating of the angle-gate mode decision.

    The mode flips only when the last ``dwell`` samples of |rho| agree;
    ``dwell=1`` reproduces the raw switching.
    """
    if not rho_history:
        raise ValueError("rho history must be non-empty")
    recent = list(rho_history)[-dwell:]
    if len(recent) < dwell:
        return current
    if all(abs(r) > rho_max for r in recent):
        return NavMode.ROLL_HOLD
    if all(abs(r) <= rho_max for r in recent):
        return NavMode.IGC_TRACK
    return current


@dataclass
class Navigator:
    """Stateful wrapper combining the plan, the raw algorithm and the
    hysteresis gate; one instance per vehicle.

    The mode re-bootstraps from the raw decision on the first sample after
    each waypoint switch, so the dwell gate never holds a stale tracking
    command outside the small-angle regime.
    """
    plan: WaypointPlan
    params: PpnParams
    nav: NavConfig = field(default_factory=NavConfig)
    mode: NavMode | None = None
    _rho_history: list = field(default_factory=list)

    def _switch(self, status: WaypointStatus, events: list) -> None:
        events.append(self.plan._advance(status))
        self._rho_history.clear()
        self.mode = None
        if self.plan.complete:
            events.append(NavEvent(kind=NavEventKind.PLAN_COMPLETE))

    def step(self, geom: GuidanceGeometry | None):
        """Advance the state machine; returns (NavCommand | None, events).

        A None command with a non-complete plan means the active waypoint
        changed this step; the caller recomputes the geometry and calls
        again.
        """
        events = []
        if self.plan.complete:
            return None, [NavEvent(kind=NavEventKind.PLAN_COMPLETE)]
        if geom is None or geom.r_a < self.plan.r_t:
            self._switch(WaypointStatus.REACHED, events)
            return None, events
        self._rho_history.append(geom.rho)
        if self.mode is None:
            self.mode = (NavMode.ROLL_HOLD
                         if abs(geom.rho) > self.params.rho_max
                         else NavMode.IGC_TRACK)
        else:
            self.mode = hysteresis_gate(self._rho_history,
                                        self.params.rho_max,
                                        self.mode, self.nav.dwell)
        if self.mode is NavMode.ROLL_HOLD:
            return NavCommand(mode=NavMode.ROLL_HOLD,
                              phi_ref=math.copysign(self.nav.phi_r,
                                                    geom.rho)), events
        if not turn_feasible(geom.r_a, geom.rho, self.params.R_min):
            self._switch(WaypointStatus.INFEASIBLE, events)
            return None, events
        return NavCommand(mode=NavMode.IGC_TRACK,
                          y_ref=(self.plan.alt_ref, 0.0)), events
