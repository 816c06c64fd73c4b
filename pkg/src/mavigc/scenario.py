"""Closed-loop nonlinear scenario runner.

Schedule: controller update every 0.02 s, inner fixed-step RK4 at
0.002 s, GPS position held between 1 s updates, all other sensors sampled
at the control rate (noise-free).  The control law adds the static gain's
correction to the trim controls:

    U = U_trim + F [h_ref - h, -d, q - q0, theta - theta0,
                    p - p0, r - r0, phi - phi_ref]

with phi_ref the trim roll in tracking mode and the commanded constant
roll during roll hold (where the miss-distance entry is zeroed).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from pathlib import Path

from .actuators import ActuatorState, actuator_step
from .config import AeroConfig
from .dynamics import integrate_state
from .guidance import (GuidanceGeometry, PpnParams, WaypointReached,
                       accel_from_dynamics, geometry)
from .navigator import (NavConfig, NavEventKind, NavMode, Navigator,
                        WaypointPlan)
from .state import GimbalLockError, RigidBodyState
from .synthesis import SofGain
from .trim import TrimPoint


class DivergenceError(RuntimeError):
    pass


def table_iv_initial_state() -> RigidBodyState:
    """Published initial condition fixture for the nonlinear runs."""
    return RigidBodyState(u=7.78, v=-0.43, w=1.81, p=0.0, q=0.0, r=0.0,
                          phi=-0.0361, theta=0.2304, psi=0.0,
                          x=0.0, y=0.0, h=20.0)


TABLE_IV_CONTROLS = (-0.2592, 0.1255, 0.231)  # delta_e, delta_r (rad), thrust (N)


@dataclass
class ScenarioSpec:
    name: str
    waypoints: list
    mission_alt: float = 20.0
    duration: float = 60.0
    initial: RigidBodyState = field(default_factory=table_iv_initial_state)
    initial_controls: tuple = TABLE_IV_CONTROLS
    gain_source: str = "synth"   # synth | fixture | file:<path>
    control_dt: float = 0.02
    inner_dt: float = 0.002
    gps_dt: float = 1.0
    arrival_radius: float = 5.0

    def validate(self) -> None:
        if self.duration <= 0.0:
            raise ValueError("scenario duration must be positive")
        if self.control_dt <= 0.0 or self.inner_dt <= 0.0:
            raise ValueError("step sizes must be positive")
        if self.initial.airspeed() <= 0.0:
            raise ValueError("initial state must have positive airspeed")


def line_scenario(duration: float = 70.0) -> ScenarioSpec:
    """Straight-line following: collinear waypoints northeast of the start
    (reconstructed course; the published figure shows the layout only
    graphically)."""
    pts = [(60.0, 60.0), (120.0, 120.0), (180.0, 180.0), (240.0, 240.0)]
    return ScenarioSpec(name="line", waypoints=pts, duration=duration)


def rectangle_scenario(duration: float = 140.0) -> ScenarioSpec:
    """Rectangular surveillance pattern, 200 m x 100 m, first corner 80 m
    north of the start."""
    pts = [(80.0, 0.0), (280.0, 0.0), (280.0, 100.0), (80.0, 100.0),
           (80.0, 0.0)]
    return ScenarioSpec(name="rectangle", waypoints=pts, duration=duration)


BUILTIN_SCENARIOS = {"line": line_scenario, "rectangle": rectangle_scenario}


@dataclass
class TelemetryRecord:
    t: float
    state: RigidBodyState
    delta_e: float     # servo output (rad)
    delta_r: float     # servo output (rad)
    thrust: float      # clamped thrust (N)
    a_c: float         # realized turn acceleration (m/s^2)
    sigma: float
    rho: float
    r_a: float
    d: float
    mode: str
    wp_index: int
    Va: float
    gps_x: float
    gps_y: float
    event: str = ""


@dataclass
class Telemetry:
    records: list = field(default_factory=list)
    status: str = "completed"
    message: str = ""

    def __len__(self) -> int:
        return len(self.records)


@dataclass
class Metrics:
    peak_delta_e_deg: float
    peak_delta_r_deg: float
    va_min: float
    va_max: float
    arrival_times: list
    final_miss: float
    alt_err_min: float
    alt_err_max: float
    waypoints_reached: int
    duration: float

    def rows(self):
        out = [
            ("peak_delta_e_deg", f"{self.peak_delta_e_deg:.6f}"),
            ("peak_delta_r_deg", f"{self.peak_delta_r_deg:.6f}"),
            ("va_min", f"{self.va_min:.6f}"),
            ("va_max", f"{self.va_max:.6f}"),
            ("final_miss", f"{self.final_miss:.6f}"),
            ("alt_err_min", f"{self.alt_err_min:.6f}"),
            ("alt_err_max", f"{self.alt_err_max:.6f}"),
            ("waypoints_reached", str(self.waypoints_reached)),
            ("duration", f"{self.duration:.6f}"),
        ]
        for i, ta in enumerate(self.arrival_times):
            out.append((f"arrival_time_{i}", f"{ta:.6f}"))
        return out


_DIVERGENCE_VELOCITY = 10.0   # times trim airspeed
_DIVERGENCE_RATE = 100.0      # rad/s hard bound
_DIVERGENCE_ALT = 200.0       # metres from mission altitude


def run_scenario(spec: ScenarioSpec, gain: SofGain, trim: TrimPoint,
                 cfg: AeroConfig, params: PpnParams | None = None,
                 nav_cfg: NavConfig | None = None) -> tuple:
    """Run a closed-loop scenario; returns (Telemetry, Metrics).

    The run terminates at the duration, at plan completion, or when the
    Euler singularity or divergence guard trips (partial telemetry with a
    diagnostic status in the latter cases).
    """
    spec.validate()
    params = params or PpnParams.for_airspeed(trim.targets.Va,
                                              r_t=spec.arrival_radius)
    nav_cfg = nav_cfg or NavConfig()
    nav_cfg.validate()

    plan = WaypointPlan(list(spec.waypoints), r_t=spec.arrival_radius,
                        alt_ref=spec.mission_alt)
    navigator = Navigator(plan=plan, params=params, nav=nav_cfg)

    state = spec.initial.copy()
    act = ActuatorState.at(cfg.limits.clamp_elevator(spec.initial_controls[0]),
                           cfg.limits.clamp_rudder(spec.initial_controls[1]),
                           cfg.limits.clamp_thrust(spec.initial_controls[2]))
    u_trim = trim.controls()
    t0s = trim.state
    va_trim = trim.targets.Va

    n_steps = int(round(spec.duration / spec.control_dt))
    substeps = max(1, int(round(spec.control_dt / spec.inner_dt)))
    gps_every = max(1, int(round(spec.gps_dt / spec.control_dt)))

    telemetry = Telemetry()
    gps = (state.x, state.y)

    def guard(s: RigidBodyState) -> None:
        if (abs(s.u) > _DIVERGENCE_VELOCITY * va_trim
                or abs(s.v) > _DIVERGENCE_VELOCITY * va_trim
                or abs(s.w) > _DIVERGENCE_VELOCITY * va_trim
                or max(abs(s.p), abs(s.q), abs(s.r)) > _DIVERGENCE_RATE
                or abs(s.h - spec.mission_alt) > _DIVERGENCE_ALT):
            raise DivergenceError(
                f"state left the trim-scaled envelope: Va={s.airspeed():.1f}, "
                f"rates=({s.p:.1f},{s.q:.1f},{s.r:.1f}), h={s.h:.1f}")

    for k in range(n_steps + 1):
        t = k * spec.control_dt
        if k % gps_every == 0:
            gps = (state.x, state.y)

        # navigation from held GPS and current heading (chi ~ psi)
        geom = None
        cmd = None
        events = []
        for _ in range(len(plan.waypoints) + 1):
            wp = plan.active
            if wp is None:
                break
            try:
                geom = geometry(gps[0], gps[1], wp.x, wp.y, state.psi)
            except WaypointReached:
                geom = None
            cmd, evs = navigator.step(geom)
            events.extend(evs)
            if cmd is not None:
                break

        a_c = accel_from_dynamics(state, cfg, act.rudder.position)
        record = TelemetryRecord(
            t=t, state=state.copy(),
            delta_e=act.elevator.position, delta_r=act.rudder.position,
            thrust=act.thrust, a_c=a_c,
            sigma=geom.sigma if geom else 0.0,
            rho=geom.rho if geom else 0.0,
            r_a=geom.r_a if geom else 0.0,
            d=geom.d if geom else 0.0,
            mode=cmd.mode.value if cmd else "complete",
            wp_index=plan.active_index if plan.active_index is not None else -1,
            Va=state.airspeed(), gps_x=gps[0], gps_y=gps[1],
            event=";".join(f"{e.kind.value}:{e.waypoint_index}"
                           if e.waypoint_index is not None else e.kind.value
                           for e in events),
        )
        telemetry.records.append(record)

        if plan.complete:
            telemetry.status = "plan_complete"
            break
        if k == n_steps:
            break

        # control law at this sample; the miss-distance input is clamped
        # to the linear model's validity range
        if cmd.mode is NavMode.IGC_TRACK:
            d_fb = geom.d if geom else 0.0
            d_fb = max(-nav_cfg.x1_limit, min(nav_cfg.x1_limit, d_fb))
            y = (spec.mission_alt - state.h,
                 -d_fb,
                 state.q - t0s.q, state.theta - t0s.theta,
                 state.p - t0s.p, state.r - t0s.r,
                 state.phi - t0s.phi)
        else:
            y = (spec.mission_alt - state.h,
                 0.0,
                 state.q - t0s.q, state.theta - t0s.theta,
                 state.p - t0s.p, state.r - t0s.r,
                 state.phi - cmd.phi_ref)
        F = gain.F
        u_cmd = tuple(u_trim[i]
                      + sum(F[i, j] * y[j] for j in range(len(y)))
                      for i in range(3))

        try:
            for _ in range(substeps):
                state = integrate_state(state, act.elevator.position,
                                        act.rudder.position, act.thrust,
                                        cfg, spec.inner_dt)
                act = actuator_step(u_cmd, act, cfg.servo, cfg.limits,
                                    spec.inner_dt)
                guard(state)
        except GimbalLockError as exc:
            telemetry.status = "singular"
            telemetry.message = str(exc)
            break
        except DivergenceError as exc:
            telemetry.status = "diverged"
            telemetry.message = str(exc)
            break

    metrics = compute_metrics(telemetry, mission_alt=spec.mission_alt)
    return telemetry, metrics


def compute_metrics(telemetry: Telemetry,
                    mission_alt: float = 20.0) -> Metrics:
    """Pure post-processing scans over the telemetry records."""
    if not telemetry.records:
        raise ValueError("metrics need at least one telemetry record")
    recs = telemetry.records
    arrivals = []
    for r in recs:
        if r.event:
            for item in r.event.split(";"):
                if item.startswith(NavEventKind.WAYPOINT_REACHED.value):
                    arrivals.append(r.t)
    alt_errs = [r.state.h - mission_alt for r in recs]
    return Metrics(
        peak_delta_e_deg=max(abs(math.degrees(r.delta_e)) for r in recs),
        peak_delta_r_deg=max(abs(math.degrees(r.delta_r)) for r in recs),
        va_min=min(r.Va for r in recs),
        va_max=max(r.Va for r in recs),
        arrival_times=arrivals,
        final_miss=abs(recs[-1].d),
        alt_err_min=min(alt_errs),
        alt_err_max=max(alt_errs),
        waypoints_reached=len(arrivals),
        duration=recs[-1].t,
    )


TELEMETRY_COLUMNS = (
    "t", "u", "v", "w", "p", "q", "r", "phi", "theta", "psi",
    "x", "y", "h", "delta_e", "delta_r", "thrust", "a_c",
    "sigma", "rho", "r_a", "d", "mode", "wp_index", "Va",
    "gps_x", "gps_y", "event",
)

TELEMETRY_SCHEMA_VERSION = 1


def _record_row(r: TelemetryRecord):
    s = r.state
    floats = (r.t, s.u, s.v, s.w, s.p, s.q, s.r, s.phi, s.theta, s.psi,
              s.x, s.y, s.h, r.delta_e, r.delta_r, r.thrust, r.a_c,
              r.sigma, r.rho, r.r_a, r.d)
    out = [f"{v:.9f}" for v in floats]
    out.append(r.mode)
    out.append(str(r.wp_index))
    out.extend(f"{v:.9f}" for v in (r.Va, r.gps_x, r.gps_y))
    out.append(r.event)
    return out


def write_telemetry_csv(telemetry: Telemetry, path) -> None:
    with open(path, "w") as fh:
        fh.write(f"# mavigc telemetry v{TELEMETRY_SCHEMA_VERSION} "
                 f"status={telemetry.status}\n")
        fh.write(",".join(TELEMETRY_COLUMNS) + "\n")
        for r in telemetry.records:
            fh.write(",".join(_record_row(r)) + "\n")


def read_telemetry_csv(path) -> Telemetry:
    telemetry = Telemetry()
    with open(path) as fh:
        header = fh.readline()
        if not header.startswith("# mavigc telemetry"):
            raise ValueError(f"{path}: not a telemetry file")
        for key in header.split():
            if key.startswith("status="):
                telemetry.status = key.split("=", 1)[1]
        cols = fh.readline().strip().split(",")
        if tuple(cols) != TELEMETRY_COLUMNS:
            raise ValueError(f"{path}: unexpected telemetry columns")
        for line in fh:
            parts = line.rstrip("\n").split(",")
            vals = [float(p) for p in parts[:21]]
            state = RigidBodyState(u=vals[1], v=vals[2], w=vals[3],
                                   p=vals[4], q=vals[5], r=vals[6],
                                   phi=vals[7], theta=vals[8], psi=vals[9],
                                   x=vals[10], y=vals[11], h=vals[12])
            telemetry.records.append(TelemetryRecord(
                t=vals[0], state=state, delta_e=vals[13], delta_r=vals[14],
                thrust=vals[15], a_c=vals[16], sigma=vals[17], rho=vals[18],
                r_a=vals[19], d=vals[20], mode=parts[21],
                wp_index=int(parts[22]), Va=float(parts[23]),
                gps_x=float(parts[24]), gps_y=float(parts[25]),
                event=parts[26] if len(parts) > 26 else ""))
    return telemetry


_PLOTS = {
    "path_xy.gp": """\
set title "Ground track (north vs east)"
set xlabel "y east (m)"
set ylabel "x north (m)"
set grid
set datafile separator ","
plot "telemetry.csv" every ::1 using 12:11 with lines title "path"
""",
    "miss_rho.gp": """\
set title "Miss distance and rho"
set xlabel "t (s)"
set grid
set datafile separator ","
plot "telemetry.csv" every ::1 using 1:21 with lines title "d (m)", \\
     "telemetry.csv" every ::1 using 1:(column(19)*57.29577951) with lines title "rho (deg)"
""",
    "euler_rates.gp": """\
set title "Euler angles and body rates"
set xlabel "t (s)"
set grid
set datafile separator ","
plot "telemetry.csv" every ::1 using 1:(column(8)*57.29577951) with lines title "phi (deg)", \\
     "telemetry.csv" every ::1 using 1:(column(9)*57.29577951) with lines title "theta (deg)", \\
     "telemetry.csv" every ::1 using 1:5 with lines title "p (rad/s)", \\
     "telemetry.csv" every ::1 using 1:6 with lines title "q (rad/s)", \\
     "telemetry.csv" every ::1 using 1:7 with lines title "r (rad/s)"
""",
    "controls_airspeed.gp": """\
set title "Control surfaces, thrust and airspeed"
set xlabel "t (s)"
set grid
set datafile separator ","
plot "telemetry.csv" every ::1 using 1:(column(14)*57.29577951) with lines title "delta_e (deg)", \\
     "telemetry.csv" every ::1 using 1:(column(15)*57.29577951) with lines title "delta_r (deg)", \\
     "telemetry.csv" every ::1 using 1:16 with lines title "thrust (N)", \\
     "telemetry.csv" every ::1 using 1:24 with lines title "Va (m/s)"
""",
}


def write_outputs(telemetry: Telemetry, metrics: Metrics, outdir) -> list:
    """Write telemetry CSV, metrics CSV and gnuplot scripts; returns paths."""
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    written = []

    tpath = outdir / "telemetry.csv"
    write_telemetry_csv(telemetry, tpath)
    written.append(tpath)

    mpath = outdir / "metrics.csv"
    with open(mpath, "w") as fh:
        fh.write("metric,value\n")
        for key, value in metrics.rows():
            fh.write(f"{key},{value}\n")
    written.append(mpath)

    plot_dir = outdir / "plots"
    plot_dir.mkdir(exist_ok=True)
    for name, body in _PLOTS.items():
        ppath = plot_dir / name
        with open(ppath, "w") as fh:
            fh.write("# gnuplot script generated by mavigc\n")
            fh.write(body)
        written.append(ppath)
    return written
