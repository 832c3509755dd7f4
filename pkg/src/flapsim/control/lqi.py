"""LQR with integral action, designed on the hover linearization with actuator lag.

States (velocity mode)::

    v_x^B, v_y^B, v_z, phi, theta, psi, omega (3), f_z - mg, tau (3),
    integrals of (v_x^B, v_y^B, v_z, psi) tracking errors

Altitude mode adds ``z`` and integrates the altitude error instead of ``v_z``.
References enter only through the integrators, so the proportional part acts
on the measured state.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from ..errors import RiccatiFailure
from ..kinematics import heading_frame
from ..plant import RobotParams

INPUTS = ("f_z", "tau_x", "tau_y", "tau_z")


def state_names(vertical_mode: str = "velocity") -> tuple[str, ...]:
    base = ["v_x", "v_y", "v_z"]
    if vertical_mode == "position":
        base.append("z")
    elif vertical_mode != "velocity":
        raise ValueError(f"unknown vertical mode {vertical_mode!r}")
    base += ["phi", "theta", "psi", "omega_x", "omega_y", "omega_z",
             "f_z", "tau_x", "tau_y", "tau_z"]
    vertical_int = "int_z" if vertical_mode == "position" else "int_v_z"
    return tuple(base + ["int_v_x", "int_v_y", vertical_int, "int_psi"])


# Bryson-style maximum acceptable deviations, hand-tuned so the
# no-offset step settles about as fast as the adaptive loop. Lag states use the
# input scale.
DEFAULT_STATE_MAX = {
    "v_x": 0.15, "v_y": 0.15, "v_z": 0.34, "z": 0.05,
    "phi": 0.25, "theta": 0.25, "psi": 0.25,
    "omega_x": 66.0, "omega_y": 66.0, "omega_z": 66.0,
    "f_z": 2.0e-3, "tau_x": 3.0e-5, "tau_y": 3.0e-5, "tau_z": 2.0e-6,
    "int_v_x": 0.022, "int_v_y": 0.022, "int_v_z": 0.125, "int_z": 0.02, "int_psi": 0.022,
}
DEFAULT_INPUT_MAX = {"f_z": 2.0e-3, "tau_x": 3.0e-5, "tau_y": 3.0e-5, "tau_z": 2.0e-6}


@dataclass
class LQIWeights:
    """Maximum-deviation weights: ``Q_ii = 1/x_max^2``, ``R_jj = rho/u_max^2``."""

    state_max: dict = field(default_factory=lambda: dict(DEFAULT_STATE_MAX))
    input_max: dict = field(default_factory=lambda: dict(DEFAULT_INPUT_MAX))
    rho: float = 1.0

    def __post_init__(self):
        self.state_max = {**DEFAULT_STATE_MAX, **self.state_max}
        self.input_max = {**DEFAULT_INPUT_MAX, **self.input_max}
        if self.rho <= 0:
            raise ValueError("rho must be positive")
        for k, v in [*self.state_max.items(), *self.input_max.items()]:
            if not v > 0:
                raise ValueError(f"LQI weight {k} must be positive")


@dataclass(frozen=True)
class LQIGains:
    k: np.ndarray
    names: tuple
    vertical_mode: str
    a: np.ndarray
    b: np.ndarray

    @property
    def closed_loop(self) -> np.ndarray:
        return self.a - self.b @ self.k


def linearized_model(params: RobotParams, vertical_mode: str = "velocity"):
    """Hover linearization ``(A, B, names)`` of the lag- and integrator-augmented plant."""
    names = state_names(vertical_mode)
    idx = {n: i for i, n in enumerate(names)}
    n = len(names)
    a = np.zeros((n, n))
    b = np.zeros((n, 4))
    g, m, t = params.g, params.m, params.t_lag
    j1, j2, j3 = params.j

    a[idx["v_x"], idx["theta"]] = g
    a[idx["v_y"], idx["phi"]] = -g
    a[idx["v_z"], idx["f_z"]] = 1.0 / m
    if "z" in idx:
        a[idx["z"], idx["v_z"]] = 1.0
    a[idx["phi"], idx["omega_x"]] = 1.0
    a[idx["theta"], idx["omega_y"]] = 1.0
    a[idx["psi"], idx["omega_z"]] = 1.0
    a[idx["omega_x"], idx["tau_x"]] = 1.0 / j1
    a[idx["omega_y"], idx["tau_y"]] = 1.0 / j2
    a[idx["omega_z"], idx["tau_z"]] = 1.0 / j3
    for col, name in enumerate(INPUTS):
        a[idx[name], idx[name]] = -1.0 / t
        b[idx[name], col] = 1.0 / t
    a[idx["int_v_x"], idx["v_x"]] = 1.0
    a[idx["int_v_y"], idx["v_y"]] = 1.0
    if vertical_mode == "position":
        a[idx["int_z"], idx["z"]] = 1.0
    else:
        a[idx["int_v_z"], idx["v_z"]] = 1.0
    a[idx["int_psi"], idx["psi"]] = 1.0
    return a, b, names


def lqi_synthesize(params: RobotParams, weights: LQIWeights | None = None,
                   vertical_mode: str = "velocity") -> LQIGains:
    """Solve the continuous Riccati equation in Bryson-scaled coordinates."""
    weights = weights or LQIWeights()
    a, b, names = linearized_model(params, vertical_mode)
    sx = np.array([weights.state_max[n] for n in names])
    su = np.array([weights.input_max[n] for n in INPUTS])
    # x = Sx x~, u = Su u~ turns the Bryson weights into identities
    a_s = a * sx[None, :] / sx[:, None]
    b_s = b * su[None, :] / sx[:, None]
    q = np.eye(len(names))
    r = weights.rho * np.eye(4)
    try:
        p = scipy.linalg.solve_continuous_are(a_s, b_s, q, r)
    except (np.linalg.LinAlgError, ValueError) as exc:
        raise RiccatiFailure(f"Riccati solve failed: {exc}") from exc
    residual = a_s.T @ p + p @ a_s - p @ b_s @ np.linalg.solve(r, b_s.T @ p) + q
    if not np.all(np.isfinite(p)) or np.max(np.abs(residual)) > 1e-8 * max(1.0, np.max(np.abs(p))):
        raise RiccatiFailure("Riccati solution failed the residual check")
    k_s = np.linalg.solve(r, b_s.T @ p)
    k = k_s * su[:, None] / sx[None, :]
    gains = LQIGains(k=k, names=names, vertical_mode=vertical_mode, a=a, b=b)
    if np.max(np.linalg.eigvals(gains.closed_loop).real) >= 0:
        raise RiccatiFailure("Riccati gain does not stabilize the linearization")
    return gains


def lqi_state(state, params: RobotParams, integrators, vertical_mode: str = "velocity") -> np.ndarray:
    """Deviation vector from hover, in the order of :func:`state_names`."""
    v_b = heading_frame(state.vel, state.att[2])
    x = [v_b[0], v_b[1], state.vel[2]]
    if vertical_mode == "position":
        x.append(state.pos[2])
    x += [*state.att, *state.omega, state.f_z_lag - params.weight, *state.tau_lag]
    return np.concatenate((x, integrators))


def lqi_control(state, params: RobotParams, gains: LQIGains, integrators):
    """Return ``(f_dz, tau_d)``: hover feedforward minus full-state feedback."""
    x = lqi_state(state, params, integrators, gains.vertical_mode)
    u = -gains.k @ x
    return params.weight + u[0], u[1:]


def tracking_errors(state, targets, vertical_mode: str = "velocity") -> np.ndarray:
    """Integrand of the four integrators."""
    v_b = heading_frame(state.vel, state.att[2])
    if vertical_mode == "position":
        ez = state.pos[2] - targets.z_d
    else:
        ez = state.vel[2] - targets.v_zd
    return np.array([v_b[0] - targets.v_xd, v_b[1] - targets.v_yd, ez,
                     state.att[2] - targets.psi_d])
