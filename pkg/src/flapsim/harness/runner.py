"""Closed-loop runs: plant + controller wired from a :class:`Scenario`."""
from __future__ import annotations

from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from ..allocation import build_mixing_matrix
from ..control import AdaptiveEstimates, FlightController, lqi_synthesize
from ..errors import FlapsimError, ScenarioError, SimulationFailure
from ..kinematics import heading_frame
from ..plant import Plant, SimState
from .metrics import ChannelMetrics
from .scenario import Scenario, load_scenario
from .trace import Trace, TraceRecord

MAX_HOT_START_DEPTH = 4
ESTIMATE_KEYS = ("tau_o_hat_x", "tau_o_hat_y", "tau_o_hat_z", "f_oz_hat")


@dataclass
class RunResult:
    scenario: Scenario
    trace: Trace
    metrics: dict[str, ChannelMetrics]
    final_estimates: AdaptiveEstimates


def metric_channels(sc: Scenario) -> tuple[str, ...]:
    vertical = "z" if sc.targets.vertical_mode == "position" else "v_z"
    return ("v_x", "v_y", vertical, "psi")


def hot_start_estimates(sc: Scenario, depth: int = 0) -> AdaptiveEstimates | None:
    """Final adaptive estimates of the scenario named by ``sc.hot_start``, if any."""
    if sc.hot_start is None:
        return None
    if depth >= MAX_HOT_START_DEPTH:
        raise ScenarioError(f"{sc.name}: hot_start chain deeper than {MAX_HOT_START_DEPTH}")
    src = replace(load_scenario(sc.hot_start), controller="adaptive")
    return run_scenario(src, _depth=depth + 1).final_estimates


def build_controller(sc: Scenario, estimates: AdaptiveEstimates | None = None) -> FlightController:
    nominal = build_mixing_matrix(sc.geometry)
    lqi_gains = None
    if sc.controller == "lqi":
        lqi_gains = lqi_synthesize(sc.params, sc.lqi_weights, sc.targets.vertical_mode)
    if estimates is None:
        estimates = sc.initial_estimates
        if sc.estimates_in:
            estimates = read_estimates(sc.estimates_in)
    return FlightController(sc.params, nominal, sc.targets, gains=sc.gains, mode=sc.controller,
                            dt_ctrl=sc.dt_ctrl, force_model=sc.force_model(), estimates=estimates,
                            lqi_gains=lqi_gains, attitude_clamp=sc.attitude_clamp,
                            yaw_feedforward_off=sc.yaw_feedforward_off,
                            derivative_tau=sc.derivative_tau)


def _record(t, state: SimState, out, plant: Plant, sc: Scenario) -> TraceRecord:
    v_b = heading_frame(state.vel, state.att[2])
    tg = sc.targets
    off = plant.offset_wrench(state.f_z_lag, state.tau_lag)
    return TraceRecord(
        t, *state.pos, *state.vel, v_b[0], v_b[1], *state.att, *state.omega,
        tg.v_xd, tg.v_yd, tg.v_zd, tg.z_d, out.eta_d[0], out.eta_d[1],
        tg.psi_d,
        *out.s_omega, out.s_z, *out.estimates.tau_o_hat, out.estimates.f_oz_hat,
        out.f_dz, *out.tau_d, *out.f_wd, *out.amplitudes, *off,
    )


def run_scenario(sc: Scenario, estimates: AdaptiveEstimates | None = None,
                 _depth: int = 0) -> RunResult:
    """Simulate ``sc``; identical scenarios give bit-identical traces.

    Raises SimulationFailure (carrying the partial result) when the plant
    leaves its validity region or the allocation becomes singular.
    """
    sc.validate()
    if estimates is None and sc.estimates_in is None:
        estimates = hot_start_estimates(sc, _depth)
    plant = Plant.from_geometry(sc.params, sc.geometry, sc.offsets)
    ctrl = build_controller(sc, estimates)
    init = sc.initial
    if init.lag == "trim":
        f_z0, tau0 = ctrl.trim()
    else:
        f_z0, tau0 = sc.params.weight, np.zeros(3)
    y = SimState(pos=init.pos, vel=init.vel, att=init.att, omega=init.omega,
                 f_z_lag=f_z0, tau_lag=tau0).to_vector()

    trace = Trace()
    n, sub, h = sc.n_ticks, sc.substeps, sc.plant_step
    try:
        for k in range(n + 1 if n > 0 else 0):
            state = SimState.from_vector(y)
            out = ctrl.step(state)
            trace.append(_record(k * sc.dt_ctrl, state, out, plant, sc))
            if k == n:
                break
            y = plant.step(y, out.applied, h, sub)
    except FlapsimError as exc:
        partial = RunResult(sc, trace, trace.metrics(metric_channels(sc)), ctrl.estimates.copy())
        raise SimulationFailure(f"{sc.name}: {type(exc).__name__}: {exc}", partial, exc) from exc
    return RunResult(sc, trace, trace.metrics(metric_channels(sc)), ctrl.estimates.copy())


def run_case3(case2: Scenario, estimates_path: str | Path | None = None) -> tuple[RunResult, RunResult]:
    """Run Case 2, persist its final estimates, rerun with them as the initial estimates.

    Returns ``(case2_result, case3_result)``.
    """
    first = run_scenario(replace(case2, controller="adaptive"))
    est = first.final_estimates
    if estimates_path is not None:
        write_estimates(est, estimates_path)
        est = read_estimates(estimates_path)
    hot = replace(case2, name="case3", controller="adaptive", initial_estimates=est,
                  estimates_in=None, hot_start=None)
    return first, run_scenario(hot)


def compare_controllers(sc: Scenario) -> dict[str, RunResult]:
    """Run the same scenario under both controllers."""
    return {mode: run_scenario(replace(sc, controller=mode)) for mode in ("adaptive", "lqi")}


# -- estimates file ----------------------------------------------------------

def write_estimates(est: AdaptiveEstimates, path) -> Path:
    path = Path(path)
    values = (*est.tau_o_hat, est.f_oz_hat)
    text = "".join(f"{k} = {float(v)!r}\n" for k, v in zip(ESTIMATE_KEYS, values))
    try:
        path.write_text(text, encoding="utf-8")
    except OSError as exc:
        raise OSError(f"cannot write estimates file {path}: {exc.strerror}") from exc
    return path


def read_estimates(path) -> AdaptiveEstimates:
    path = Path(path)
    values = {}
    for lineno, line in enumerate(path.read_text(encoding="utf-8").splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, val = line.partition("=")
        if not sep:
            key, _, val = line.partition(" ")
        key = key.strip()
        if key not in ESTIMATE_KEYS:
            raise ValueError(f"{path}:{lineno}: unknown estimate {key!r}")
        values[key] = float(val)
    missing = [k for k in ESTIMATE_KEYS if k not in values]
    if missing:
        raise ValueError(f"{path}: missing estimates {missing}")
    return AdaptiveEstimates(tau_o_hat=[values[k] for k in ESTIMATE_KEYS[:3]],
                             f_oz_hat=values["f_oz_hat"])
