"""Scenario definition and its INI-style file format.

Every key is optional; missing keys fall back to the robot's table values.
Angles in ``[geometry]`` and ``[offsets]`` are given in degrees, all other
quantities in SI units. Vectors are comma separated.
"""
from __future__ import annotations

import configparser
import math
from dataclasses import dataclass, field, replace
from importlib import resources
from pathlib import Path

import numpy as np

from ..allocation import OffsetSpec, WingForceModel, WingGeometry
from ..control import AdaptiveEstimates, ControlGains, LQIWeights, Targets
from ..control.derivative import DEFAULT_TAU
from ..control.lqi import DEFAULT_INPUT_MAX, DEFAULT_STATE_MAX
from ..errors import ScenarioError
from ..plant import RobotParams

OFFSET_CASES = ("none", "case1", "case2", "custom")
BUILTIN = ("no_offset", "case1", "case2", "case3", "altitude_hold_experiment")


def offsets_for_case(case: str, params: RobotParams) -> OffsetSpec:
    if case == "none":
        return OffsetSpec()
    if case == "case1":
        return OffsetSpec(d_beta=math.radians(10.0), d_gamma=math.radians(10.0), d_l=5e-3)
    if case == "case2":
        return OffsetSpec(d_fw=params.weight / 4.0 / 3.0 * np.array([0.0, -1.0, 0.0, 0.0]))
    raise ScenarioError(f"unknown offset case {case!r}; expected one of {OFFSET_CASES}")


@dataclass
class InitialState:
    pos: tuple = (0.0, 0.0, 0.0)
    vel: tuple = (0.0, 0.0, 0.0)
    att: tuple = (0.0, 0.0, 0.0)
    omega: tuple = (0.0, 0.0, 0.0)
    # "trim": lag holds the controller's hover demand; "hover": m g and zero torque
    lag: str = "trim"


@dataclass
class Scenario:
    name: str = "no_offset"
    params: RobotParams = field(default_factory=RobotParams)
    geometry: WingGeometry = field(default_factory=WingGeometry)
    offset_case: str = "none"
    offsets: OffsetSpec | None = None
    controller: str = "adaptive"
    gains: ControlGains = field(default_factory=ControlGains)
    lqi_weights: LQIWeights = field(default_factory=LQIWeights)
    targets: Targets = field(default_factory=Targets)
    initial: InitialState = field(default_factory=InitialState)
    initial_estimates: AdaptiveEstimates = field(default_factory=AdaptiveEstimates)
    estimates_in: str | None = None
    hot_start: str | None = None
    duration: float = 5.0
    control_rate: float = 1000.0
    plant_step: float = 1e-4
    seed: int = 0
    attitude_clamp: float | None = 0.3
    yaw_feedforward_off: bool = False
    derivative_tau: float = DEFAULT_TAU
    v_hover: float = 20.0
    v_max: float = 40.0
    clamp_amplitude: bool = False

    def __post_init__(self):
        if self.offsets is None:
            self.offsets = offsets_for_case(self.offset_case, self.params) \
                if self.offset_case != "custom" else OffsetSpec()

    @property
    def dt_ctrl(self) -> float:
        return 1.0 / self.control_rate

    @property
    def substeps(self) -> int:
        return int(round(self.dt_ctrl / self.plant_step))

    @property
    def n_ticks(self) -> int:
        return int(round(self.duration * self.control_rate))

    def force_model(self) -> WingForceModel:
        return WingForceModel.around_hover(self.params.m, self.params.g, self.geometry,
                                           v_hover=self.v_hover, v_max=self.v_max,
                                           clamp=self.clamp_amplitude)

    def with_controller(self, controller: str) -> "Scenario":
        return replace(self, controller=controller)

    def validate(self) -> "Scenario":
        problems = []
        if self.controller not in ("adaptive", "lqi"):
            problems.append(f"[run] controller must be 'adaptive' or 'lqi', not {self.controller!r}")
        if not self.duration >= 0 or not math.isfinite(self.duration):
            problems.append("[run] duration must be a finite non-negative number of seconds")
        if not self.control_rate > 0:
            problems.append("[run] control_rate must be positive (Hz)")
        if not self.plant_step > 0:
            problems.append("[run] plant_step must be positive (s)")
        if self.control_rate > 0 and self.plant_step > 0:
            ratio = self.dt_ctrl / self.plant_step
            if ratio < 1 - 1e-9 or abs(ratio - round(ratio)) > 1e-9 * max(1.0, ratio):
                problems.append(
                    f"[run] control period {self.dt_ctrl:g} s must be an integer multiple of "
                    f"plant_step {self.plant_step:g} s")
        if self.initial.lag not in ("trim", "hover"):
            problems.append("[initial] lag must be 'trim' or 'hover'")
        if self.derivative_tau < 0:
            problems.append("[gains] derivative_tau must be non-negative")
        if self.attitude_clamp is not None and not self.attitude_clamp > 0:
            problems.append("[gains] attitude_clamp must be positive or 'off'")
        if problems:
            raise ScenarioError("; ".join(problems))
        return self


# -- file parsing ------------------------------------------------------------

def _floats(text: str, n: int | None = None) -> tuple:
    vals = tuple(float(v) for v in text.replace(";", ",").split(",") if v.strip())
    if n is not None and len(vals) != n:
        raise ValueError(f"expected {n} comma-separated numbers, got {text!r}")
    return vals


def _scalar_or_wings(text: str):
    vals = _floats(text)
    if len(vals) == 1:
        return vals[0]
    if len(vals) == 4:
        return np.array(vals)
    raise ValueError(f"expected 1 or 4 numbers, got {text!r}")


def _bool(text: str) -> bool:
    t = text.strip().lower()
    if t in ("1", "true", "yes", "on"):
        return True
    if t in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


def parse_scenario(text: str, source: str = "<string>", base_dir: Path | None = None) -> Scenario:
    cp = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
    try:
        cp.read_string(text, source=source)
    except configparser.Error as exc:
        raise ScenarioError(f"{source}: {exc}") from exc
    known = {"robot", "geometry", "offsets", "gains", "lqi", "targets", "initial", "run"}
    unknown = set(cp.sections()) - known
    if unknown:
        raise ScenarioError(f"{source}: unknown section(s) {sorted(unknown)}")

    def sec(name):
        return cp[name] if cp.has_section(name) else {}

    def get(section, key, conv, default):
        s = sec(section)
        if key not in s:
            return default
        try:
            return conv(s[key])
        except (ValueError, TypeError) as exc:
            raise ScenarioError(f"{source}: [{section}] {key}: {exc}") from exc

    try:
        d = RobotParams()
        params = RobotParams(m=get("robot", "mass", float, d.m),
                             j=get("robot", "inertia", lambda s: _floats(s, 3), d.j),
                             t_lag=get("robot", "t_lag", float, d.t_lag),
                             g=get("robot", "g", float, d.g))
    except ValueError as exc:
        raise ScenarioError(f"{source}: [robot] {exc}") from exc

    try:
        dg = WingGeometry()
        geom = WingGeometry(a=get("geometry", "a", float, dg.a),
                            b=get("geometry", "b", float, dg.b),
                            beta=math.radians(get("geometry", "beta_deg", float, math.degrees(dg.beta))),
                            gamma=math.radians(get("geometry", "gamma_deg", float, math.degrees(dg.gamma))),
                            l=get("geometry", "l", float, dg.l))
    except ValueError as exc:
        raise ScenarioError(f"{source}: [geometry] {exc}") from exc

    case = get("offsets", "case", str.strip, "none")
    if case not in OFFSET_CASES:
        raise ScenarioError(f"{source}: [offsets] case must be one of {OFFSET_CASES}")
    if case == "custom":
        offsets = OffsetSpec(
            d_beta=np.radians(get("offsets", "d_beta_deg", _scalar_or_wings, 0.0)),
            d_gamma=np.radians(get("offsets", "d_gamma_deg", _scalar_or_wings, 0.0)),
            d_l=get("offsets", "d_l", _scalar_or_wings, 0.0),
            d_fw=get("offsets", "d_fw", lambda s: _floats(s, 4), (0.0,) * 4))
    else:
        offsets = offsets_for_case(case, params)

    dgn = ControlGains()
    try:
        gains = ControlGains(
            h_x=get("gains", "h_x", float, dgn.h_x), h_y=get("gains", "h_y", float, dgn.h_y),
            k_eta=get("gains", "k_eta", lambda s: _floats(s, 3), dgn.k_eta),
            lambda_omega=get("gains", "lambda_omega", lambda s: _floats(s, 3), dgn.lambda_omega),
            k_omega=get("gains", "k_omega", lambda s: _floats(s, 3), dgn.k_omega),
            gamma_omega=get("gains", "gamma_omega", lambda s: _floats(s, 3), dgn.gamma_omega),
            lambda_z=get("gains", "lambda_z", float, dgn.lambda_z),
            k_z=get("gains", "k_z", float, dgn.k_z),
            gamma_z=get("gains", "gamma_z", float, dgn.gamma_z))
    except ValueError as exc:
        raise ScenarioError(f"{source}: [gains] {exc}") from exc

    clamp_text = get("gains", "attitude_clamp", str.strip, "0.3")
    attitude_clamp = None if clamp_text.lower() in ("off", "none") else \
        get("gains", "attitude_clamp", float, 0.3)

    state_max, input_max = {}, {}
    for key in sec("lqi"):
        if key.startswith("max_"):
            name = key[4:]
            if name in DEFAULT_STATE_MAX:
                state_max[name] = get("lqi", key, float, None)
            else:
                raise ScenarioError(f"{source}: [lqi] unknown state weight {key}")
        elif key.startswith("umax_"):
            name = key[5:]
            if name not in DEFAULT_INPUT_MAX:
                raise ScenarioError(f"{source}: [lqi] unknown input weight {key}")
            input_max[name] = get("lqi", key, float, None)
        elif key != "rho":
            raise ScenarioError(f"{source}: [lqi] unknown key {key}")
    try:
        lqi_weights = LQIWeights(state_max=state_max, input_max=input_max,
                                 rho=get("lqi", "rho", float, 1.0))
    except ValueError as exc:
        raise ScenarioError(f"{source}: [lqi] {exc}") from exc

    dt = Targets()
    try:
        targets = Targets(v_xd=get("targets", "v_xd", float, dt.v_xd),
                          v_yd=get("targets", "v_yd", float, dt.v_yd),
                          v_zd=get("targets", "v_zd", float, dt.v_zd),
                          psi_d=get("targets", "psi_d", float, dt.psi_d),
                          vertical_mode=get("targets", "vertical_mode", str.strip, dt.vertical_mode),
                          z_d=get("targets", "z_d", float, dt.z_d))
    except ValueError as exc:
        raise ScenarioError(f"{source}: [targets] {exc}") from exc

    init = InitialState(pos=get("initial", "pos", lambda s: _floats(s, 3), (0.0,) * 3),
                        vel=get("initial", "vel", lambda s: _floats(s, 3), (0.0,) * 3),
                        att=get("initial", "att", lambda s: _floats(s, 3), (0.0,) * 3),
                        omega=get("initial", "omega", lambda s: _floats(s, 3), (0.0,) * 3),
                        lag=get("initial", "lag", str.strip, "trim"))
    est = AdaptiveEstimates(
        tau_o_hat=get("initial", "tau_o_hat", lambda s: _floats(s, 3), (0.0,) * 3),
        f_oz_hat=get("initial", "f_oz_hat", float, 0.0))

    estimates_in = get("run", "estimates_in", str.strip, "") or None
    if estimates_in and base_dir is not None and not Path(estimates_in).is_absolute():
        estimates_in = str(base_dir / estimates_in)
    hot_start = get("run", "hot_start", str.strip, "") or None
    if hot_start and base_dir is not None and (base_dir / hot_start).is_file():
        hot_start = str(base_dir / hot_start)

    sc = Scenario(
        name=get("run", "name", str.strip, Path(source).stem),
        params=params, geometry=geom, offset_case=case, offsets=offsets,
        controller=get("run", "controller", str.strip, "adaptive"),
        gains=gains, lqi_weights=lqi_weights, targets=targets, initial=init,
        initial_estimates=est, estimates_in=estimates_in,
        hot_start=hot_start,
        duration=get("run", "duration", float, 5.0),
        control_rate=get("run", "control_rate", float, 1000.0),
        plant_step=get("run", "plant_step", float, 1e-4),
        seed=get("run", "seed", int, 0),
        attitude_clamp=attitude_clamp,
        yaw_feedforward_off=get("gains", "yaw_feedforward_off", _bool, False),
        derivative_tau=get("gains", "derivative_tau", float, DEFAULT_TAU),
        v_hover=get("run", "v_hover", float, 20.0),
        v_max=get("run", "v_max", float, 40.0),
        clamp_amplitude=get("run", "clamp_amplitude", _bool, False),
    )
    return sc.validate()


def load_scenario(ref) -> Scenario:
    """Load a scenario from a file path or the name of a built-in scenario."""
    path = Path(ref)
    if path.is_file():
        return parse_scenario(path.read_text(encoding="utf-8"), source=str(path),
                              base_dir=path.parent)
    name = str(ref)
    if name in BUILTIN:
        text = resources.files("flapsim.scenarios").joinpath(f"{name}.ini").read_text(encoding="utf-8")
        return parse_scenario(text, source=f"{name}.ini")
    raise ScenarioError(f"scenario {ref!r} is neither a file nor one of the built-ins {BUILTIN}")
