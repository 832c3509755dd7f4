"""Full control pipeline: velocity loop, attitude/vertical law, allocation, amplitudes."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..allocation import WingForceModel, stacked_allocation_matrix
from ..kinematics import attitude_rate_from_body_rates, heading_frame
from ..plant import RobotParams, SimState
from .adaptive import (AdaptiveEstimates, ControlGains, attitude_adaptive_control,
                       vertical_adaptive_control)
from .derivative import DEFAULT_TAU, DerivativeEstimator
from .lqi import LQIGains, lqi_control, tracking_errors

MODES = ("adaptive", "lqi")


@dataclass(frozen=True)
class Targets:
    v_xd: float = 0.5
    v_yd: float = 0.5
    v_zd: float = 0.5
    psi_d: float = 1.0
    vertical_mode: str = "velocity"
    z_d: float = 0.0

    def __post_init__(self):
        if self.vertical_mode not in ("velocity", "position"):
            raise ValueError(f"vertical mode must be 'velocity' or 'position', got {self.vertical_mode!r}")
        for v in (self.v_xd, self.v_yd, self.v_zd, self.psi_d, self.z_d):
            if not np.isfinite(v):
                raise ValueError("targets must be finite")


def velocity_to_attitude_targets(v_body, targets: Targets, gains: ControlGains,
                                 g: float = 9.81, clamp: float | None = 0.3):
    """Pitch and roll targets ``(theta_d, phi_d)`` from the horizontal velocity error."""
    theta_d = -gains.h_x * (v_body[0] - targets.v_xd) / g
    phi_d = gains.h_y * (v_body[1] - targets.v_yd) / g
    if clamp is not None:
        theta_d = min(max(theta_d, -clamp), clamp)
        phi_d = min(max(phi_d, -clamp), clamp)
    return theta_d, phi_d


@dataclass
class ControlOutput:
    f_dz: float
    tau_d: np.ndarray
    f_wd: np.ndarray
    amplitudes: np.ndarray
    applied: np.ndarray  # [f_z, tau] actually delivered after the amplitude map
    s_omega: np.ndarray
    s_z: float
    estimates: AdaptiveEstimates
    eta_d: np.ndarray


class FlightController:
    """Owns the controller state of one run (estimates, derivative filters, integrators).

    Call :meth:`step` once per control tick; the returned demands are held
    constant until the next tick.
    """

    def __init__(self, params: RobotParams, nominal_mix: np.ndarray, targets: Targets,
                 gains: ControlGains | None = None, mode: str = "adaptive",
                 dt_ctrl: float = 1e-3, force_model: WingForceModel | None = None,
                 estimates: AdaptiveEstimates | None = None, lqi_gains: LQIGains | None = None,
                 attitude_clamp: float | None = 0.3, yaw_feedforward_off: bool = False,
                 derivative_tau: float = DEFAULT_TAU):
        if mode not in MODES:
            raise ValueError(f"controller mode must be one of {MODES}, got {mode!r}")
        if mode == "lqi" and lqi_gains is None:
            raise ValueError("LQI mode needs synthesized gains")
        if mode == "lqi" and lqi_gains.vertical_mode != targets.vertical_mode:
            raise ValueError("LQI gains were synthesized for a different vertical mode")
        self.params = params
        self.nominal_mix = nominal_mix
        self.alloc = stacked_allocation_matrix(nominal_mix)
        self.alloc_inv = np.linalg.inv(self.alloc)
        self.targets = targets
        self.gains = gains or ControlGains()
        self.mode = mode
        self.dt = dt_ctrl
        self.force_model = force_model
        self.estimates = (estimates or AdaptiveEstimates()).copy()
        self.lqi_gains = lqi_gains
        self.attitude_clamp = attitude_clamp
        self.yaw_feedforward_off = yaw_feedforward_off
        self.integrators = np.zeros(4)
        self._omega_dot = DerivativeEstimator(dt_ctrl, derivative_tau)
        self._eta_ddot = DerivativeEstimator(dt_ctrl, derivative_tau)
        self._z_ddot = DerivativeEstimator(dt_ctrl, derivative_tau, size=1)

    def trim(self) -> tuple[float, np.ndarray]:
        """Hover demand the controller holds for a robot at rest on target."""
        if self.mode == "adaptive":
            return self.params.weight + self.estimates.f_oz_hat, self.estimates.tau_o_hat.copy()
        return self.params.weight, np.zeros(3)

    def step(self, state: SimState) -> ControlOutput:
        used = self.estimates.copy()  # the values this tick's demand is built from
        if self.mode == "adaptive":
            f_dz, tau_d, s_omega, s_z, eta_d = self._adaptive(state)
        else:
            f_dz, tau_d = lqi_control(state, self.params, self.lqi_gains, self.integrators)
            self.integrators = self.integrators + self.dt * tracking_errors(
                state, self.targets, self.targets.vertical_mode)
            s_omega, s_z, eta_d = np.full(3, np.nan), np.nan, np.full(3, np.nan)

        f_wd = self.alloc_inv @ np.array([f_dz, tau_d[0], tau_d[1], tau_d[2]])
        if self.force_model is not None:
            amplitudes = self.force_model.amplitude(f_wd)
            applied = self.alloc @ self.force_model.force(amplitudes)
        else:
            amplitudes = np.full(4, np.nan)
            applied = np.concatenate(([f_dz], tau_d))
        return ControlOutput(f_dz=float(f_dz), tau_d=np.asarray(tau_d, dtype=float), f_wd=f_wd,
                             amplitudes=amplitudes, applied=applied, s_omega=s_omega,
                             s_z=float(s_z), estimates=used, eta_d=eta_d)

    def _adaptive(self, state: SimState):
        prm = self.params
        psi = state.att[2]
        v_b = heading_frame(state.vel, psi)
        theta_d, phi_d = velocity_to_attitude_targets(v_b, self.targets, self.gains, prm.g,
                                                      self.attitude_clamp)
        psi_d = psi if self.yaw_feedforward_off else self.targets.psi_d
        eta_d = np.array([phi_d, theta_d, psi_d])

        eta_dot = attitude_rate_from_body_rates(state.att, state.omega)
        omega_dot = self._omega_dot.update(state.omega)
        eta_ddot = self._eta_ddot.update(eta_dot)
        z_ddot = float(self._z_ddot.update([state.vel[2]])[0])

        est = self.estimates
        att_law = attitude_adaptive_control(state.att, state.omega, eta_d, est.tau_o_hat,
                                            self.gains, prm, omega_dot, eta_ddot,
                                            yaw_mask=self.yaw_feedforward_off)
        vert = vertical_adaptive_control(state.pos[2], state.vel[2], z_ddot, self.targets,
                                         est.f_oz_hat, self.gains, prm)
        # explicit Euler on the adaptation laws at the control rate
        self.estimates = AdaptiveEstimates(est.tau_o_hat + self.dt * att_law.tau_o_hat_rate,
                                           est.f_oz_hat + self.dt * vert.f_oz_hat_rate)
        return vert.f_dz, att_law.tau_d, att_law.s_omega, vert.s_z, eta_d
