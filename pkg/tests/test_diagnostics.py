"""
Pathwise property suite.

Every simulated trajectory, whatever the interaction kind, flock size or
timestep, must keep a non-increasing velocity sup norm and positions inside
the linear growth envelope. These are checked on random configurations with
Hypothesis, then the monitor is checked to actually fire.
"""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import MODELS, relative_state
from hlflock.utils.core.diagnostics import (
    PathwiseMonitor,
    check_lemma1,
    contraction_factors,
    pathwise_decomposition_bound,
)
from hlflock.utils.core.dynamics import max_timestep, to_relative
from hlflock.utils.core.initial import sample_initial_state
from hlflock.utils.core.simulate import simulate
from hlflock.utils.core.state import FlockState, Frame, Hierarchy
from hlflock.utils.errors import DimensionError, InvariantBreach
from hlflock.utils.interactions.rng import RngStream


@st.composite
def flock_setups(draw):
    k = draw(st.integers(min_value=2, max_value=8))
    return {
        "k": k,
        "kind": draw(st.sampled_from(sorted(MODELS))),
        "seed": draw(st.integers(min_value=0, max_value=2**64 - 1)),
        "h": draw(st.floats(min_value=0.1, max_value=1.0)) * max_timestep(k),
        "star": draw(st.booleans()),
        "relative": draw(st.booleans()),
    }


def run_setup(setup, horizon):
    stream = RngStream(seed=setup["seed"])
    k = setup["k"]
    hier = Hierarchy.star(k) if setup["star"] else Hierarchy.chain(k)
    start = sample_initial_state(k, 2.0, 1.0, stream)
    initial = to_relative(start) if setup["relative"] else start
    return simulate(initial, hier, MODELS[setup["kind"]], setup["h"], horizon, stream, monitor=False)


# -----------------------------------------------------------------------------
# Random configurations
# -----------------------------------------------------------------------------


@settings(max_examples=40, deadline=None)
@given(flock_setups())
def test_pathwise_properties_hold(setup):
    run = run_setup(setup, horizon=100)
    report = check_lemma1(run)
    assert report.passed, report


@pytest.mark.slow
@settings(max_examples=200, deadline=None)
@given(flock_setups())
def test_pathwise_properties_hold_long_runs(setup):
    run = run_setup(setup, horizon=500)
    assert check_lemma1(run).passed


@settings(max_examples=25, deadline=None)
@given(flock_setups())
def test_decomposition_dominates_every_follower(setup):
    run = run_setup(setup, horizon=80)
    speeds = run.speeds()
    for bird in range(2, run.k + 1):
        bound = pathwise_decomposition_bound(run, bird)
        assert np.all(speeds[:, bird - 1] <= bound + 1e-12 * np.maximum(1.0, bound))


@settings(max_examples=25, deadline=None)
@given(flock_setups())
def test_leader_never_changes_velocity(setup):
    run = run_setup(setup, horizon=50)
    np.testing.assert_array_equal(run.v[:, 0, :], np.broadcast_to(run.v[0, 0, :], run.v[:, 0, :].shape))


# -----------------------------------------------------------------------------
# Contraction factors
# -----------------------------------------------------------------------------


class TestContractionFactors:
    def test_shape_and_leader_column(self):
        run = simulate(
            to_relative(sample_initial_state(4, 1.0, 1.0, RngStream(seed=5))),
            Hierarchy.chain(4),
            MODELS["scaled_random"],
            0.2,
            30,
            RngStream(seed=5),
        )
        factors = contraction_factors(run)
        assert factors.shape == (30, 4)
        assert np.all(factors[:, 0] == 1.0)
        assert np.all((factors >= 0.0) & (factors <= 1.0))

    def test_two_bird_factors_reproduce_velocity(self, two_birds):
        initial = relative_state([[1.0, 0.0, 0.0]])
        run = simulate(initial, two_birds, MODELS["bernoulli_failure"], 0.5, 40, RngStream(seed=9))
        products = np.concatenate(([1.0], np.cumprod(contraction_factors(run)[:, 1])))
        np.testing.assert_allclose(run.v[:, 1, 0], products, rtol=1e-12)


# -----------------------------------------------------------------------------
# Monitor
# -----------------------------------------------------------------------------


class TestPathwiseMonitor:
    def setup_method(self):
        self.initial = relative_state([[1.0, 0.0, 0.0]], positions=[[1.0, 0.0, 0.0]])
        self.monitor = PathwiseMonitor(self.initial, h=0.5)

    def state(self, position, velocity, t=1):
        return relative_state([velocity], positions=[position], t=t)

    def test_accepts_contracting_step(self):
        self.monitor.observe(self.state([1.5, 0.0, 0.0], [0.5, 0.0, 0.0]))

    def test_velocity_growth_fires(self):
        with pytest.raises(InvariantBreach, match="grew"):
            self.monitor.observe(self.state([1.5, 0.0, 0.0], [1.1, 0.0, 0.0]))

    def test_position_escape_fires(self):
        with pytest.raises(InvariantBreach, match="position"):
            self.monitor.observe(self.state([2.0, 0.0, 0.0], [0.5, 0.0, 0.0]))

    def test_leader_drift_fires(self):
        monitor = PathwiseMonitor(FlockState(t=0, x=np.zeros((2, 3)), v=np.ones((2, 3))), h=0.5)
        moved = FlockState(t=1, x=np.full((2, 3), 0.4), v=[[0.9, 1.0, 1.0], [1.0, 1.0, 1.0]])
        with pytest.raises(InvariantBreach, match="bird 1"):
            monitor.observe(moved)


def test_check_lemma1_reports_slack():
    initial = relative_state([[1.0, 0.0, 0.0]])
    run = simulate(initial, Hierarchy.chain(2), MODELS["power_law"], 0.5, 10, RngStream(seed=0))
    report = check_lemma1(run)
    assert report.passed
    assert report.worst_velocity_slack >= 0.0
    assert report.worst_position_slack >= 0.0


def test_simulate_rejects_late_start(two_birds):
    initial = relative_state([[1.0, 0.0, 0.0]], t=3)
    with pytest.raises(DimensionError):
        simulate(initial, two_birds, MODELS["power_law"], 0.5, 10, RngStream(seed=0))


def test_simulate_records_frame(two_birds):
    run = simulate(relative_state([[1.0, 0.0, 0.0]]), two_birds, MODELS["power_law"], 0.5, 5, RngStream(seed=0))
    assert run.frame is Frame.RELATIVE
    assert run.x.shape == (6, 2, 3) and run.a.shape == (5, 2, 2)
    assert run.weights(1).t == 1
