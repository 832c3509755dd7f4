"""Euler-angle kinematics (ZYX, yaw-pitch-roll) shared by the plant and controllers.

Attitudes are ``(phi, theta, psi)`` tuples or arrays in radians.
"""
from __future__ import annotations

import math
from typing import NamedTuple

import numpy as np

from .errors import GimbalLock

GIMBAL_EPS = 1e-6


class Attitude(NamedTuple):
    phi: float
    theta: float
    psi: float


class BodyRates(NamedTuple):
    omega_x: float
    omega_y: float
    omega_z: float


def rotation_matrix(att) -> np.ndarray:
    """Body-to-global rotation ``R = Rz(psi) Ry(theta) Rx(phi)``."""
    phi, theta, psi = att
    cf, sf = math.cos(phi), math.sin(phi)
    ct, st = math.cos(theta), math.sin(theta)
    cp, sp = math.cos(psi), math.sin(psi)
    return np.array([
        [cp * ct, cp * st * sf - sp * cf, cp * st * cf + sp * sf],
        [sp * ct, sp * st * sf + cp * cf, sp * st * cf - cp * sf],
        [-st, ct * sf, ct * cf],
    ])


def attitude_rate_matrix(att) -> np.ndarray:
    """``G`` in ``omega = G @ eta_dot``; depends on roll and pitch only."""
    phi, theta = att[0], att[1]
    cf, sf = math.cos(phi), math.sin(phi)
    ct, st = math.cos(theta), math.sin(theta)
    return np.array([
        [1.0, 0.0, -st],
        [0.0, cf, ct * sf],
        [0.0, -sf, ct * cf],
    ])


def attitude_rate_from_body_rates(att, omega) -> np.ndarray:
    """Solve ``omega = G eta_dot`` for the Euler-angle rates.

    Raises GimbalLock when ``|cos(theta)| <= 1e-6``.
    """
    phi, theta = att[0], att[1]
    ct = math.cos(theta)
    if abs(ct) <= GIMBAL_EPS:
        raise GimbalLock(f"pitch {theta:.6f} rad is at the Euler singularity")
    cf, sf = math.cos(phi), math.sin(phi)
    p, q, r = omega
    yaw_rate = (sf * q + cf * r) / ct
    return np.array([
        p + math.sin(theta) * yaw_rate,
        cf * q - sf * r,
        yaw_rate,
    ])


def heading_frame(vel_global, psi: float) -> np.ndarray:
    """Rotate a global vector by ``-psi`` about Z (yaw-only body frame)."""
    c, s = math.cos(psi), math.sin(psi)
    vx, vy, vz = vel_global
    return np.array([c * vx + s * vy, -s * vx + c * vy, vz])
