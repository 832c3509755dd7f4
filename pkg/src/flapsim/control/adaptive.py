"""Adaptive sliding-variable attitude and vertical laws with offset estimation.

Both laws cancel the first-order actuator lag by feeding forward ``T`` times
the derivative of the reference acceleration, and estimate the unknown offset
torque / vertical force with a gradient law driven by the sliding variable.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from ..kinematics import attitude_rate_from_body_rates, attitude_rate_matrix
from ..plant import RobotParams


def _positive(name, value):
    arr = np.atleast_1d(np.asarray(value, dtype=float))
    if not np.all(np.isfinite(arr)) or np.any(arr <= 0):
        raise ValueError(f"gain {name} must be positive, got {value!r}")


@dataclass(frozen=True)
class ControlGains:
    h_x: float = 1 / 0.5
    h_y: float = 1 / 0.5
    k_eta: tuple = (1 / 0.1, 1 / 0.1, 1 / 0.1)
    lambda_omega: tuple = (1 / 0.1, 1 / 0.1, 1 / 0.1)
    k_omega: tuple = (9.50e-8, 8.55e-8, 1.40e-7)
    gamma_omega: tuple = (7.70e-6, 6.93e-6, 1.13e-5)
    lambda_z: float = 1 / 0.5
    k_z: float = 6.34e-1
    gamma_z: float = 2.05e-4

    def __post_init__(self):
        for name in ("k_eta", "lambda_omega", "k_omega", "gamma_omega"):
            vals = tuple(float(v) for v in getattr(self, name))
            if len(vals) != 3:
                raise ValueError(f"gain {name} needs three diagonal entries")
            object.__setattr__(self, name, vals)
        for name in ("h_x", "h_y", "k_eta", "lambda_omega", "k_omega", "gamma_omega",
                     "lambda_z", "k_z", "gamma_z"):
            _positive(name, getattr(self, name))


@dataclass
class AdaptiveEstimates:
    tau_o_hat: np.ndarray = field(default_factory=lambda: np.zeros(3))
    f_oz_hat: float = 0.0

    def __post_init__(self):
        self.tau_o_hat = np.array(self.tau_o_hat, dtype=float).reshape(3)
        self.f_oz_hat = float(self.f_oz_hat)
        if not (np.all(np.isfinite(self.tau_o_hat)) and np.isfinite(self.f_oz_hat)):
            raise ValueError("adaptive estimates must be finite")

    def copy(self) -> "AdaptiveEstimates":
        return AdaptiveEstimates(self.tau_o_hat.copy(), self.f_oz_hat)


class AttitudeLaw(NamedTuple):
    tau_d: np.ndarray
    tau_o_hat_rate: np.ndarray
    s_omega: np.ndarray
    omega_d: np.ndarray


class VerticalLaw(NamedTuple):
    f_dz: float
    f_oz_hat_rate: float
    s_z: float


def _cross(a, b) -> np.ndarray:
    return np.array([a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]])


def attitude_adaptive_control(att, omega, eta_d, tau_o_hat, gains: ControlGains,
                              params: RobotParams, omega_dot, eta_ddot,
                              yaw_mask: bool = False) -> AttitudeLaw:
    """Demanded torque and offset-estimate rate.

    ``omega_dot`` and ``eta_ddot`` are estimated derivatives of the body rates
    and of the Euler-angle rates. With ``yaw_mask`` the yaw component of the
    Euler-rate terms is dropped (used when the yaw target follows the
    measured yaw).
    """
    att = np.asarray(att, dtype=float)
    omega = np.asarray(omega, dtype=float)
    omega_dot = np.asarray(omega_dot, dtype=float)
    k_eta = np.asarray(gains.k_eta)
    lam = np.asarray(gains.lambda_omega)
    j = np.asarray(params.j)

    g_mat = attitude_rate_matrix(att)
    eta_dot = attitude_rate_from_body_rates(att, omega)
    eta_ddot = np.array(eta_ddot, dtype=float)
    if yaw_mask:
        eta_dot = eta_dot.copy()
        eta_dot[2] = 0.0
        eta_ddot[2] = 0.0

    e_eta = att - np.asarray(eta_d, dtype=float)
    omega_d = -g_mat @ (k_eta * e_eta)
    omega_d_dot = -g_mat @ (k_eta * eta_dot)
    omega_d_ddot = -g_mat @ (k_eta * eta_ddot)

    omega_r_dot = omega_d_dot - lam * (omega - omega_d)
    omega_r_ddot = omega_d_ddot - lam * (omega_dot - omega_d_dot)
    s = omega_dot - omega_r_dot

    j_omega = j * omega
    coriolis = _cross(omega, j_omega)
    coriolis_dot = _cross(omega_dot, j_omega) + _cross(omega, j * omega_dot)

    tau_d = (-np.asarray(gains.k_omega) * s + j * omega_r_dot + coriolis
             + params.t_lag * (j * omega_r_ddot + coriolis_dot)
             + np.asarray(tau_o_hat, dtype=float))
    rate = -np.asarray(gains.gamma_omega) * s
    return AttitudeLaw(tau_d, rate, s, omega_d)


def vertical_adaptive_control(z: float, z_dot: float, z_ddot: float, targets,
                              f_oz_hat: float, gains: ControlGains,
                              params: RobotParams) -> VerticalLaw:
    """Demanded body Z force and offset-estimate rate.

    ``targets.vertical_mode`` selects velocity tracking of ``v_zd`` or
    altitude tracking of ``z_d``.
    """
    lam = gains.lambda_z
    if targets.vertical_mode == "velocity":
        z_r_ddot = -lam * (z_dot - targets.v_zd)
        z_r_dddot = -lam * z_ddot
    elif targets.vertical_mode == "position":
        z_r_ddot = -2.0 * lam * z_dot - lam * lam * (z - targets.z_d)
        z_r_dddot = -2.0 * lam * z_ddot - lam * lam * z_dot
    else:
        raise ValueError(f"unknown vertical mode {targets.vertical_mode!r}")
    s_z = z_ddot - z_r_ddot
    m = params.m
    f_dz = m * (-gains.k_z * s_z + z_r_ddot + params.t_lag * z_r_dddot + params.g) + f_oz_hat
    return VerticalLaw(f_dz, -gains.gamma_z * s_z / m, s_z)
