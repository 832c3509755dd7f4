import numpy as np
import pytest
import scipy.linalg

from flapsim.control import LQIWeights, Targets, lqi_control, lqi_synthesize
from flapsim.control.lqi import linearized_model, state_names, tracking_errors
from flapsim.errors import RiccatiFailure
from flapsim.harness.metrics import step_metrics
from flapsim.plant import RobotParams, SimState

PRM = RobotParams()


@pytest.fixture(scope="module")
def gains():
    return lqi_synthesize(PRM)


def test_state_layout():
    assert len(state_names("velocity")) == 17
    names = state_names("position")
    # altitude replaces the vertical-velocity integrator, so only one state is added
    assert len(names) == 18 and "z" in names and names[-2] == "int_z"
    assert "int_v_z" not in names
    with pytest.raises(ValueError):
        state_names("hover")


@pytest.mark.parametrize("mode", ["velocity", "position"])
def test_closed_loop_is_stable(mode):
    g = lqi_synthesize(PRM, vertical_mode=mode)
    assert np.max(np.linalg.eigvals(g.closed_loop).real) < 0


def test_synthesis_is_deterministic(gains):
    assert np.array_equal(lqi_synthesize(PRM).k, gains.k)


def test_larger_input_weight_shrinks_gains(gains):
    heavier = lqi_synthesize(PRM, LQIWeights(rho=2.0))
    assert np.linalg.norm(heavier.k) < np.linalg.norm(gains.k)
    for rho in (4.0, 8.0):
        nxt = lqi_synthesize(PRM, LQIWeights(rho=rho))
        assert np.linalg.norm(nxt.k) < np.linalg.norm(heavier.k)
        heavier = nxt


def test_equilibrium_gives_hover_feedforward(gains):
    f, tau = lqi_control(SimState.hover(PRM), PRM, gains, np.zeros(4))
    assert f == PRM.weight
    assert not np.any(tau)


def test_integral_channel_grows_linearly(gains):
    st = SimState.hover(PRM)
    tg = Targets()
    integ = np.zeros(4)
    demands = []
    for _ in range(4):
        demands.append(lqi_control(st, PRM, gains, integ)[0])
        integ = integ + 1e-3 * tracking_errors(st, tg)
    d = np.diff(demands)
    assert np.allclose(d, d[0], rtol=1e-9) and d[0] != 0


def test_linear_velocity_step_settles(gains):
    a_cl = gains.closed_loop
    e = np.zeros(a_cl.shape[0])
    e[gains.names.index("int_v_x")] = -1.0  # integrator state is the error v - v_d
    dt, n = 1e-3, 5000
    # exact zero-order-hold discretization of x' = A_cl x + e r
    big = scipy.linalg.expm(np.block([[a_cl, e[:, None]], [np.zeros((1, a_cl.shape[0] + 1))]]) * dt)
    phi, gam = big[:-1, :-1], big[:-1, -1]
    x = np.zeros(a_cl.shape[0])
    vx = [0.0]
    for _ in range(n):
        x = phi @ x + gam * 0.5
        vx.append(x[0])
    m = step_metrics(np.arange(n + 1) * dt, np.array(vx), 0.5)
    assert m.settling_time <= 1.5
    assert m.steady_state_error < 1e-3


def test_linear_model_structure():
    a, b, names = linearized_model(PRM)
    idx = names.index
    assert a[idx("v_x"), idx("theta")] == pytest.approx(PRM.g)
    assert a[idx("v_y"), idx("phi")] == pytest.approx(-PRM.g)
    assert a[idx("f_z"), idx("f_z")] == pytest.approx(-1 / PRM.t_lag)
    assert b[idx("tau_z"), 3] == pytest.approx(1 / PRM.t_lag)


@pytest.mark.filterwarnings("ignore::RuntimeWarning")
def test_riccati_failure_is_reported():
    with pytest.raises(RiccatiFailure):
        lqi_synthesize(PRM, LQIWeights(state_max={"v_x": 1e-200}))


def test_weights_validation():
    with pytest.raises(ValueError):
        LQIWeights(rho=0.0)
    with pytest.raises(ValueError):
        LQIWeights(state_max={"phi": -1.0})
