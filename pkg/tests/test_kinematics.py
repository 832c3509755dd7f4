import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from flapsim.errors import GimbalLock
from flapsim.kinematics import (attitude_rate_from_body_rates, attitude_rate_matrix,
                                heading_frame, rotation_matrix)

angle = st.floats(-3.0, 3.0)
tilt = st.floats(-1.5, 1.5)
rate = st.floats(-20.0, 20.0)


def test_zero_attitude_is_identity():
    assert np.array_equal(rotation_matrix((0.0, 0.0, 0.0)), np.eye(3))


def test_pure_yaw_maps_body_x_to_global_y():
    r = rotation_matrix((0.0, 0.0, math.pi / 2))
    assert np.allclose(r @ [1.0, 0.0, 0.0], [0.0, 1.0, 0.0], atol=1e-15)


def test_orthogonality_example():
    r = rotation_matrix((0.1, -0.2, 0.3))
    assert np.allclose(r.T @ r, np.eye(3), atol=1e-12)


@given(angle, tilt, angle)
def test_rotation_is_proper_orthogonal(phi, theta, psi):
    r = rotation_matrix((phi, theta, psi))
    assert np.max(np.abs(r.T @ r - np.eye(3))) < 1e-12
    assert abs(np.linalg.det(r) - 1.0) < 1e-12


def test_zyx_composition():
    phi, theta, psi = 0.3, -0.4, 1.1
    rx = np.array([[1, 0, 0], [0, math.cos(phi), -math.sin(phi)], [0, math.sin(phi), math.cos(phi)]])
    ry = np.array([[math.cos(theta), 0, math.sin(theta)], [0, 1, 0],
                   [-math.sin(theta), 0, math.cos(theta)]])
    rz = np.array([[math.cos(psi), -math.sin(psi), 0], [math.sin(psi), math.cos(psi), 0], [0, 0, 1]])
    assert np.allclose(rotation_matrix((phi, theta, psi)), rz @ ry @ rx, atol=1e-15)


@given(angle)
def test_rate_matrix_identity_at_level(psi):
    assert np.array_equal(attitude_rate_matrix((0.0, 0.0, psi)), np.eye(3))


def test_rate_matrix_roll_row():
    g = attitude_rate_matrix((math.pi / 6, 0.0, 0.0))
    assert np.allclose(g[1], [0.0, math.cos(math.pi / 6), math.sin(math.pi / 6)])
    assert np.allclose(g[2], [0.0, -math.sin(math.pi / 6), math.cos(math.pi / 6)])
    assert np.allclose(g[0], [1.0, 0.0, 0.0])


def test_rate_matrix_matches_finite_differenced_rotation():
    # smooth attitude trajectory; omega from R^T dR/dt must equal G eta_dot
    def eta(t):
        return np.array([0.3 * math.sin(2 * t), -0.2 * math.cos(3 * t) + 0.1, 0.5 * t])

    def eta_dot(t):
        return np.array([0.6 * math.cos(2 * t), 0.6 * math.sin(3 * t), 0.5])

    h = 1e-6
    for t in (0.0, 0.37, 1.2):
        r = rotation_matrix(eta(t))
        r_dot = (rotation_matrix(eta(t + h)) - rotation_matrix(eta(t - h))) / (2 * h)
        w = r.T @ r_dot
        omega = np.array([w[2, 1], w[0, 2], w[1, 0]])
        assert np.allclose(attitude_rate_matrix(eta(t)) @ eta_dot(t), omega, atol=1e-8)


def test_body_rates_at_level():
    assert np.allclose(attitude_rate_from_body_rates((0, 0, 0), (1, 2, 3)), [1, 2, 3])


@given(angle, tilt, angle, rate, rate, rate)
def test_rate_round_trip(phi, theta, psi, p, q, r):
    att, omega = (phi, theta, psi), np.array([p, q, r])
    back = attitude_rate_matrix(att) @ attitude_rate_from_body_rates(att, omega)
    assert np.max(np.abs(back - omega)) < 1e-12 * max(1.0, np.max(np.abs(omega)) / math.cos(theta))


@given(angle, tilt, angle)
def test_inverse_times_matrix_is_identity(phi, theta, psi):
    att = (phi, theta, psi)
    g = attitude_rate_matrix(att)
    g_inv = np.column_stack([attitude_rate_from_body_rates(att, e) for e in np.eye(3)])
    assert np.max(np.abs(g_inv @ g - np.eye(3))) < 1e-12 / math.cos(theta)


def test_gimbal_lock_raises():
    with pytest.raises(GimbalLock):
        attitude_rate_from_body_rates((0.0, 1.5707963, 0.0), (0.0, 0.0, 0.0))


def test_heading_frame_undoes_yaw():
    v = heading_frame((0.0, 1.0, 0.2), math.pi / 2)
    assert np.allclose(v, [1.0, 0.0, 0.2])
