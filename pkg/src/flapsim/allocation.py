"""Wing geometry, the 6x4 mixing matrix and its partial inverse.

Wing ``i`` pushes along the unit vector ``e_i`` from the point ``p_i``; the
mixing matrix stacks ``[e_i; p_i x e_i]`` column by column so that
``[f; tau] = M @ f_w``.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import SingularAllocation

log = logging.getLogger(__name__)

MAX_CONDITION = 1e8


def _per_wing(value) -> np.ndarray:
    arr = np.asarray(value, dtype=float)
    if arr.ndim == 0:
        return np.full(4, float(arr))
    if arr.shape != (4,):
        raise ValueError(f"expected a scalar or 4 per-wing values, got shape {arr.shape}")
    return arr.copy()


@dataclass(frozen=True)
class WingGeometry:
    """Nominal wing arrangement (defaults: the 4-wing robot's table values)."""

    a: float = 20.0e-3
    b: float = 5.0e-3
    beta: float = math.radians(20.0)
    gamma: float = math.radians(60.0)
    l: float = 40.0e-3

    def __post_init__(self):
        if self.a <= 0 or self.b <= 0 or self.l <= 0:
            raise ValueError("wing geometry lengths a, b, l must be positive")
        if not abs(self.beta) < math.pi / 2:
            raise ValueError("|beta| must be below pi/2")

    def per_wing(self):
        """Return ``(a_i, b_i, beta_i, gamma_i)`` arrays following the mirror pattern."""
        a, b, g = self.a, self.b, self.gamma
        a_i = np.array([a, -a, -a, a])
        b_i = np.array([b, b, -b, -b])
        beta_i = np.full(4, -self.beta)
        gamma_i = np.array([g, math.pi - g, math.pi + g, 2.0 * math.pi - g])
        return a_i, b_i, beta_i, gamma_i


@dataclass
class OffsetSpec:
    """Mismatch between the real robot and the controller's model.

    ``d_beta``, ``d_gamma`` and ``d_l`` accept a scalar (same error on every
    wing) or four per-wing values. ``d_fw`` is the wing-force model error in N.
    """

    d_beta: object = 0.0
    d_gamma: object = 0.0
    d_l: object = 0.0
    d_fw: object = field(default_factory=lambda: np.zeros(4))

    def __post_init__(self):
        self.d_beta = _per_wing(self.d_beta)
        self.d_gamma = _per_wing(self.d_gamma)
        self.d_l = _per_wing(self.d_l)
        self.d_fw = _per_wing(self.d_fw)
        for name in ("d_beta", "d_gamma", "d_l", "d_fw"):
            if not np.all(np.isfinite(getattr(self, name))):
                raise ValueError(f"offset {name} must be finite")

    @property
    def is_zero(self) -> bool:
        return not any(np.any(getattr(self, n)) for n in ("d_beta", "d_gamma", "d_l", "d_fw"))


def build_mixing_matrix(geom: WingGeometry, perturb: OffsetSpec | None = None) -> np.ndarray:
    """Mixing matrix for ``geom``, optionally with the misalignment of ``perturb`` applied."""
    a_i, b_i, beta_i, gamma_i = geom.per_wing()
    l_i = np.full(4, geom.l)
    if perturb is not None:
        beta_i = beta_i - perturb.d_beta
        gamma_i = gamma_i + perturb.d_gamma
        l_i = l_i + perturb.d_l

    m = np.empty((6, 4))
    for i in range(4):
        cb, sb = math.cos(beta_i[i]), math.sin(beta_i[i])
        cg, sg = math.cos(gamma_i[i]), math.sin(gamma_i[i])
        e = np.array([cg * sb, sg * sb, cb])
        # lever arm is scaled by l so p_i stays in metres
        p = np.array([a_i[i], b_i[i], 0.0]) + l_i[i] * np.array([cg * cb, sg * cb, -sb])
        m[:3, i] = e
        m[3:, i] = np.cross(p, e)
    return m


def body_wrench(m: np.ndarray, f_w) -> tuple[np.ndarray, np.ndarray]:
    w = m @ np.asarray(f_w, dtype=float)
    return w[:3], w[3:]


def offset_wrench(nominal: np.ndarray, perturbed: np.ndarray, spec: OffsetSpec, f_w):
    """First-order offset ``-M d_fw - dM f_w``, returned as ``(f_o, tau_o)``.

    The exact mismatch additionally contains the bilinear term ``dM d_fw``.
    """
    d_m = perturbed - nominal
    w = -nominal @ spec.d_fw - d_m @ np.asarray(f_w, dtype=float)
    return w[:3], w[3:]


def stacked_allocation_matrix(m: np.ndarray) -> np.ndarray:
    """Z-force row stacked over the three torque rows, checked for invertibility."""
    a = m[2:6, :]
    cond = np.linalg.cond(a)
    if not np.isfinite(cond) or cond >= MAX_CONDITION:
        raise SingularAllocation(
            f"stacked allocation matrix has condition number {cond:.3g}; "
            "the wing tilt is too small to produce yaw torque"
        )
    return a


def inverse_allocation(m: np.ndarray, f_dz: float, tau_d) -> np.ndarray:
    """Wing forces meeting the demanded Z force and body torque exactly."""
    a = stacked_allocation_matrix(m)
    rhs = np.concatenate(([f_dz], np.asarray(tau_d, dtype=float)))
    return np.linalg.solve(a, rhs)


@dataclass(frozen=True)
class WingForceModel:
    """Affine amplitude-to-force map ``h(V)`` anchored at the hover amplitude."""

    k_v: float
    v_hover: float
    f_hover: float
    v_max: float = float("inf")
    clamp: bool = False

    def __post_init__(self):
        if self.k_v <= 0:
            raise ValueError("k_v must be positive")

    @classmethod
    def around_hover(cls, mass: float, g: float, geom: WingGeometry,
                     v_hover: float = 20.0, v_max: float = 40.0, clamp: bool = False):
        f_hover = mass * g / (4.0 * math.cos(geom.beta))
        return cls(k_v=f_hover / v_hover, v_hover=v_hover, f_hover=f_hover,
                   v_max=v_max, clamp=clamp)

    def force(self, amplitude) -> np.ndarray:
        return self.f_hover + self.k_v * (np.asarray(amplitude, dtype=float) - self.v_hover)

    def amplitude(self, f_wd) -> np.ndarray:
        v = self.v_hover + (np.asarray(f_wd, dtype=float) - self.f_hover) / self.k_v
        if self.clamp:
            clipped = np.clip(v, 0.0, self.v_max)
            if np.any(clipped != v):
                log.debug("flapping amplitude clamped: %s -> %s", v, clipped)
            v = clipped
        return v


def amplitude_from_force(model: WingForceModel, f_wd) -> np.ndarray:
    return model.amplitude(f_wd)
