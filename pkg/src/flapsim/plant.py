"""Ground-truth rigid-body plant driven through a first-order actuator lag.

The lag acts on the demanded Z force and body torque. Lagged demands are
turned into wing forces with the controller's nominal inverse, then pushed
through the true (perturbed) mixing matrix together with the wing-force error.
The state is integrated with fixed-step RK4.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from numba import njit

from .allocation import OffsetSpec, WingGeometry, build_mixing_matrix, stacked_allocation_matrix
from .errors import GimbalLock, NumericalDivergence
from .kinematics import GIMBAL_EPS

DIVERGENCE_BOUND = 1e6
STATE_SIZE = 16


@dataclass(frozen=True)
class RobotParams:
    m: float = 2.0e-3
    j: tuple = (1.50e-7, 1.35e-7, 2.21e-7)
    t_lag: float = 0.013
    g: float = 9.81

    def __post_init__(self):
        object.__setattr__(self, "j", tuple(float(x) for x in self.j))
        if len(self.j) != 3:
            raise ValueError("inertia diagonal needs three entries")
        if self.m <= 0 or self.t_lag <= 0 or self.g <= 0 or min(self.j) <= 0:
            raise ValueError("mass, inertia, lag time constant and gravity must be positive")

    @property
    def inertia(self) -> np.ndarray:
        return np.diag(self.j)

    @property
    def weight(self) -> float:
        return self.m * self.g


def _vec3(x) -> np.ndarray:
    return np.array(x, dtype=float).reshape(3)


@dataclass
class SimState:
    pos: np.ndarray = field(default_factory=lambda: np.zeros(3))
    vel: np.ndarray = field(default_factory=lambda: np.zeros(3))
    att: np.ndarray = field(default_factory=lambda: np.zeros(3))
    omega: np.ndarray = field(default_factory=lambda: np.zeros(3))
    f_z_lag: float = 0.0
    tau_lag: np.ndarray = field(default_factory=lambda: np.zeros(3))

    def __post_init__(self):
        self.pos, self.vel = _vec3(self.pos), _vec3(self.vel)
        self.att, self.omega = _vec3(self.att), _vec3(self.omega)
        self.tau_lag = _vec3(self.tau_lag)
        self.f_z_lag = float(self.f_z_lag)

    @classmethod
    def hover(cls, params: RobotParams, **kw) -> "SimState":
        kw.setdefault("f_z_lag", params.weight)
        return cls(**kw)

    def to_vector(self) -> list[float]:
        return [*self.pos, *self.vel, *self.att, *self.omega, self.f_z_lag, *self.tau_lag]

    @classmethod
    def from_vector(cls, y) -> "SimState":
        y = [float(v) for v in y]
        return cls(pos=y[0:3], vel=y[3:6], att=y[6:9], omega=y[9:12],
                   f_z_lag=y[12], tau_lag=y[13:16])


class Plant:
    """Precomputed plant for one (params, nominal, true, wing-force error) combination."""

    def __init__(self, params: RobotParams, nominal_mix: np.ndarray, true_mix: np.ndarray,
                 d_fw=None):
        self.params = params
        self.nominal_mix = np.asarray(nominal_mix, dtype=float)
        self.true_mix = np.asarray(true_mix, dtype=float)
        self.d_fw = np.zeros(4) if d_fw is None else np.asarray(d_fw, dtype=float)
        self.alloc_inv = np.linalg.inv(stacked_allocation_matrix(self.nominal_mix))
        # lagged [f_z, tau] -> true body wrench is affine: W @ x + c
        self._w_mat = self.true_mix @ self.alloc_inv
        self._w_off = self.true_mix @ self.d_fw
        j1, j2, j3 = params.j
        self._consts = np.array([params.m, params.g, j1, j2, j3, params.t_lag])

    @classmethod
    def from_geometry(cls, params: RobotParams, geom: WingGeometry,
                      offsets: OffsetSpec | None = None) -> "Plant":
        offsets = offsets or OffsetSpec()
        return cls(params, build_mixing_matrix(geom), build_mixing_matrix(geom, offsets),
                   offsets.d_fw)

    def wing_forces(self, f_z: float, tau) -> np.ndarray:
        """Commanded wing forces recovered from lagged demands (before model error)."""
        return self.alloc_inv @ np.concatenate(([f_z], np.asarray(tau, dtype=float)))

    def body_wrench(self, f_z: float, tau) -> np.ndarray:
        """True 6-vector ``[f_body; tau_body]`` for the lagged demands."""
        return self._w_mat @ np.concatenate(([f_z], np.asarray(tau, dtype=float))) + self._w_off

    def offset_wrench(self, f_z: float, tau) -> np.ndarray:
        """Exact mismatch ``M f_w - (M + dM)(f_w + d_fw)``."""
        f_w = self.wing_forces(f_z, tau)
        return self.nominal_mix @ f_w - self.body_wrench(f_z, tau)

    def rhs(self, y, u) -> list[float]:
        """Time derivative of the flat state ``y`` under held demands ``u = (f_dz, tx, ty, tz)``."""
        y = np.asarray(y, dtype=float)
        out = np.empty(STATE_SIZE)
        if not _rhs(y, np.asarray(u, dtype=float), self._w_mat, self._w_off, self._consts, out):
            raise GimbalLock(f"pitch {y[7]:.6f} rad is at the Euler singularity")
        return out.tolist()

    def step(self, y, u, dt: float, n: int = 1) -> list[float]:
        """Advance ``n`` classical RK4 steps of size ``dt`` with the demands held."""
        y = np.array(y, dtype=float)
        status = _rk4(y, np.asarray(u, dtype=float), self._w_mat, self._w_off, self._consts,
                      dt, n)
        if status == _GIMBAL:
            raise GimbalLock(f"pitch {y[7]:.6f} rad is at the Euler singularity")
        if status == _DIVERGED:
            worst = y[np.argmax(np.where(np.isnan(y), np.inf, np.abs(y)))]
            raise NumericalDivergence(f"state component reached {worst!r}")
        return y.tolist()


_OK, _GIMBAL, _DIVERGED = 0, 1, 2


@njit(cache=True)
def _rhs(y, u, w, c, k, out):
    """Fill ``out`` with dy/dt; returns False at the Euler singularity.

    ``k`` packs ``(m, g, J1, J2, J3, T)``.
    """
    fz, tx, ty, tz = y[12], y[13], y[14], y[15]
    fb = np.empty(6)
    for i in range(6):
        fb[i] = w[i, 0] * fz + w[i, 1] * tx + w[i, 2] * ty + w[i, 3] * tz + c[i]
    phi, th, psi = y[6], y[7], y[8]
    p, q, r = y[9], y[10], y[11]
    cf, sf = math.cos(phi), math.sin(phi)
    ct, st = math.cos(th), math.sin(th)
    cp, sp = math.cos(psi), math.sin(psi)
    if abs(ct) <= GIMBAL_EPS:
        return False
    m, g, j1, j2, j3, t_lag = k[0], k[1], k[2], k[3], k[4], k[5]
    out[0], out[1], out[2] = y[3], y[4], y[5]
    out[3] = (cp * ct * fb[0] + (cp * st * sf - sp * cf) * fb[1] + (cp * st * cf + sp * sf) * fb[2]) / m
    out[4] = (sp * ct * fb[0] + (sp * st * sf + cp * cf) * fb[1] + (sp * st * cf - cp * sf) * fb[2]) / m
    out[5] = (-st * fb[0] + ct * sf * fb[1] + ct * cf * fb[2]) / m - g
    yaw_rate = (sf * q + cf * r) / ct
    out[6] = p + st * yaw_rate
    out[7] = cf * q - sf * r
    out[8] = yaw_rate
    # J w_dot = tau_body - w x (J w)
    out[9] = (fb[3] - (j3 - j2) * q * r) / j1
    out[10] = (fb[4] - (j1 - j3) * r * p) / j2
    out[11] = (fb[5] - (j2 - j1) * p * q) / j3
    for i in range(4):
        out[12 + i] = (u[i] - y[12 + i]) / t_lag
    return True


@njit(cache=True)
def _rk4(y, u, w, c, k, dt, n):
    """In-place RK4; on failure ``y`` holds the offending state."""
    k1, k2, k3, k4 = (np.empty(STATE_SIZE), np.empty(STATE_SIZE),
                      np.empty(STATE_SIZE), np.empty(STATE_SIZE))
    tmp = np.empty(STATE_SIZE)
    for _ in range(n):
        if not _rhs(y, u, w, c, k, k1):
            return _GIMBAL
        for i in range(STATE_SIZE):
            tmp[i] = y[i] + 0.5 * dt * k1[i]
        if not _rhs(tmp, u, w, c, k, k2):
            return _GIMBAL
        for i in range(STATE_SIZE):
            tmp[i] = y[i] + 0.5 * dt * k2[i]
        if not _rhs(tmp, u, w, c, k, k3):
            return _GIMBAL
        for i in range(STATE_SIZE):
            tmp[i] = y[i] + dt * k3[i]
        if not _rhs(tmp, u, w, c, k, k4):
            return _GIMBAL
        for i in range(STATE_SIZE):
            y[i] = y[i] + dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i])
        for i in range(STATE_SIZE):
            if not abs(y[i]) <= DIVERGENCE_BOUND:
                return _DIVERGED
    return _OK


def plant_derivative(state: SimState, demands, params: RobotParams, true_mix: np.ndarray,
                     spec: OffsetSpec | None, nominal_mix: np.ndarray) -> SimState:
    """State derivative packed in a SimState (each field holds its time derivative)."""
    d_fw = None if spec is None else spec.d_fw
    plant = Plant(params, nominal_mix, true_mix, d_fw)
    f_dz, tau_d = demands
    u = [float(f_dz), *np.asarray(tau_d, dtype=float)]
    return SimState.from_vector(plant.rhs(state.to_vector(), u))


def integrate_step(state: SimState, demands, plant: Plant, dt: float) -> SimState:
    if dt <= 0:
        raise ValueError("dt must be positive")
    f_dz, tau_d = demands
    u = [float(f_dz), *np.asarray(tau_d, dtype=float)]
    return SimState.from_vector(plant.step(state.to_vector(), u, dt))
