import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from flapsim.allocation import (OffsetSpec, WingForceModel, WingGeometry, amplitude_from_force,
                                body_wrench, build_mixing_matrix, inverse_allocation,
                                offset_wrench, stacked_allocation_matrix)
from flapsim.errors import SingularAllocation
from flapsim.plant import Plant, RobotParams

PRM = RobotParams()
GEOM = WingGeometry()


def random_geometry(rng) -> WingGeometry:
    return WingGeometry(a=rng.uniform(5e-3, 40e-3), b=rng.uniform(2e-3, 20e-3),
                        beta=math.radians(rng.uniform(5, 60)) * rng.choice([-1, 1]),
                        gamma=math.radians(rng.uniform(10, 80)), l=rng.uniform(10e-3, 60e-3))


def random_spec(rng) -> OffsetSpec:
    return OffsetSpec(d_beta=rng.normal(0, 0.2, 4), d_gamma=rng.normal(0, 0.2, 4),
                      d_l=rng.normal(0, 5e-3, 4), d_fw=rng.normal(0, 5e-3, 4))


def test_per_wing_sign_pattern():
    a, b, beta, gamma = GEOM.per_wing()
    assert np.allclose(a, [GEOM.a, -GEOM.a, -GEOM.a, GEOM.a])
    assert np.allclose(b, [GEOM.b, GEOM.b, -GEOM.b, -GEOM.b])
    assert np.allclose(beta, -GEOM.beta)
    g = GEOM.gamma
    assert np.allclose(gamma, [g, math.pi - g, math.pi + g, 2 * math.pi - g])


@pytest.mark.parametrize("kw", [dict(a=0.0), dict(b=-1e-3), dict(l=0.0), dict(beta=math.pi / 2)])
def test_geometry_validation(kw):
    with pytest.raises(ValueError):
        WingGeometry(**kw)


def test_columns_are_direction_and_moment():
    m = build_mixing_matrix(GEOM)
    a, b, beta, gamma = GEOM.per_wing()
    for i in range(4):
        e = np.array([math.cos(gamma[i]) * math.sin(beta[i]),
                      math.sin(gamma[i]) * math.sin(beta[i]), math.cos(beta[i])])
        p = np.array([a[i], b[i], 0.0]) + GEOM.l * np.array(
            [math.cos(gamma[i]) * math.cos(beta[i]), math.sin(gamma[i]) * math.cos(beta[i]),
             -math.sin(beta[i])])
        assert np.allclose(m[:, i], np.concatenate((e, np.cross(p, e))), atol=1e-15)


def test_first_wing_direction_table_values():
    m = build_mixing_matrix(GEOM)
    c60, s20 = math.cos(math.radians(60)), math.sin(math.radians(-20))
    expected = [c60 * s20, math.sin(math.radians(60)) * s20, math.cos(math.radians(-20))]
    assert np.allclose(m[:3, 0], expected, atol=1e-15)


def test_z_row_is_cos_beta():
    assert np.allclose(build_mixing_matrix(GEOM)[2], math.cos(GEOM.beta), atol=1e-15)


def test_untilted_wings_push_straight_up():
    m = build_mixing_matrix(WingGeometry(beta=0.0))
    assert np.allclose(m[:3], [[0] * 4, [0] * 4, [1] * 4], atol=1e-15)


@given(st.floats(-10.0, 10.0))
def test_uniform_forces_only_lift(c):
    w = build_mixing_matrix(GEOM) @ np.full(4, c)
    assert np.allclose(w[[0, 1, 3, 4, 5]], 0.0, atol=1e-15 * max(1.0, abs(c)))
    assert w[2] == pytest.approx(4 * c * math.cos(GEOM.beta))


def test_zero_perturbation_is_nominal():
    assert np.array_equal(build_mixing_matrix(GEOM, OffsetSpec()), build_mixing_matrix(GEOM))


def test_body_wrench_examples():
    m = build_mixing_matrix(GEOM)
    f, tau = body_wrench(m, np.zeros(4))
    assert not f.any() and not tau.any()
    f, tau = body_wrench(m, np.full(4, PRM.weight / (4 * math.cos(GEOM.beta))))
    assert np.allclose(f, [0, 0, PRM.weight], atol=1e-17)
    assert np.allclose(tau, 0, atol=1e-18)
    for j in range(4):
        f, tau = body_wrench(m, np.eye(4)[j])
        assert np.array_equal(np.concatenate((f, tau)), m[:, j])


def test_offset_zero_spec():
    m = build_mixing_matrix(GEOM)
    f, tau = offset_wrench(m, m, OffsetSpec(), np.ones(4))
    assert not f.any() and not tau.any()


def test_offset_wing_force_shortfall():
    # wing 2 short by m g / 12: the force offset is +d cos(beta) along Z
    d = PRM.weight / 12
    spec = OffsetSpec(d_fw=[0.0, -d, 0.0, 0.0])
    m = build_mixing_matrix(GEOM)
    f_o, _ = offset_wrench(m, build_mixing_matrix(GEOM, spec), spec, np.ones(4))
    assert f_o[2] == pytest.approx(d * math.cos(GEOM.beta), rel=1e-12)


def test_offset_bilinear_bound():
    rng = np.random.default_rng(3)
    m = build_mixing_matrix(GEOM)
    for _ in range(50):
        spec = random_spec(rng)
        mp = build_mixing_matrix(GEOM, spec)
        f_w = rng.uniform(0, 0.01, 4)
        exact = m @ f_w - mp @ (f_w + spec.d_fw)
        approx = np.concatenate(offset_wrench(m, mp, spec, f_w))
        assert np.linalg.norm(exact - approx) <= np.linalg.norm((mp - m) @ spec.d_fw) * (1 + 1e-9) + 1e-18


def test_offset_matches_plant_exact_residual():
    spec = OffsetSpec(d_beta=0.1, d_gamma=-0.05, d_l=2e-3, d_fw=[1e-4, -2e-4, 0, 3e-4])
    plant = Plant.from_geometry(PRM, GEOM, spec)
    f_w = plant.wing_forces(PRM.weight, [1e-6, -2e-6, 3e-7])
    exact = plant.offset_wrench(PRM.weight, [1e-6, -2e-6, 3e-7])
    approx = np.concatenate(offset_wrench(plant.nominal_mix, plant.true_mix, spec, f_w))
    bilinear = -(plant.true_mix - plant.nominal_mix) @ spec.d_fw
    assert np.allclose(exact - approx, bilinear, rtol=0, atol=1e-16)


def test_hover_demand_gives_equal_wing_forces():
    f_w = inverse_allocation(build_mixing_matrix(GEOM), PRM.weight, np.zeros(3))
    assert np.allclose(f_w, PRM.weight / (4 * math.cos(GEOM.beta)), rtol=1e-12)


def test_allocation_round_trip_random():
    rng = np.random.default_rng(7)
    for _ in range(200):
        m = build_mixing_matrix(random_geometry(rng))
        f, tau = rng.uniform(0, 0.05), rng.normal(0, 1e-4, 3)
        got = (m @ inverse_allocation(m, f, tau))[2:]
        want = np.concatenate(([f], tau))
        assert np.linalg.norm(got - want) <= 1e-10 * np.linalg.norm(want)


def test_untilted_geometry_is_singular():
    with pytest.raises(SingularAllocation):
        inverse_allocation(build_mixing_matrix(WingGeometry(beta=0.0)), 0.02, np.zeros(3))
    with pytest.raises(SingularAllocation):
        stacked_allocation_matrix(build_mixing_matrix(WingGeometry(beta=0.0)))


def test_force_model_anchor_and_round_trip():
    fm = WingForceModel.around_hover(PRM.m, PRM.g, GEOM)
    assert np.allclose(fm.amplitude(np.full(4, fm.f_hover)), fm.v_hover)
    f = np.array([0.003, 0.006, 0.0051, 0.0])
    assert np.allclose(fm.force(amplitude_from_force(fm, f)), f, rtol=0, atol=1e-12 * fm.f_hover)


def test_force_model_lower_clamp():
    fm = WingForceModel.around_hover(PRM.m, PRM.g, GEOM, clamp=True)
    v = fm.amplitude([fm.f_hover - fm.k_v * fm.v_hover - 1e-4, fm.f_hover, 10.0, fm.f_hover])
    assert v[0] == 0.0 and v[1] == fm.v_hover and v[2] == fm.v_max


def test_force_model_unclamped_by_default():
    fm = WingForceModel.around_hover(PRM.m, PRM.g, GEOM)
    assert fm.amplitude([-1.0, 0, 0, 0])[0] < 0


def test_offset_spec_shapes():
    s = OffsetSpec(d_beta=0.1)
    assert s.d_beta.shape == (4,) and not s.is_zero
    assert OffsetSpec().is_zero
    with pytest.raises(ValueError):
        OffsetSpec(d_l=[1.0, 2.0])
