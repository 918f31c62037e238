import numpy as np
import pytest

from erwd import (
    InitialLaw,
    MemoryRegime,
    ModelParams,
    ParameterError,
    RngStream,
    ZeroRecallPolicy,
    scaled_walk,
    simulate,
    step_distribution,
)
from erwd.analytic import enumerate_sum_law
from erwd.model import resolve_policy
from erwd.walk import Trajectory, next_step, sample_next_steps

PROP, SYM = ZeroRecallPolicy.PROPAGATE, ZeroRecallPolicy.SYMMETRIC_RESAMPLE


def test_params_validation():
    with pytest.raises(ParameterError):
        ModelParams(0.5, 0.3, 0.3)
    with pytest.raises(ParameterError):
        ModelParams(1.0, 0.0, 0.0)
    assert ModelParams(1.0, 0.0, 0.0, allow_boundary=True).drift == 1.0
    with pytest.raises(ParameterError):
        ModelParams(0.7, 0.4, -0.1, allow_boundary=True)


def test_step_distribution_single_nonzero(base):
    law = step_distribution([1], base, PROP)
    assert law == pytest.approx({1: 0.5, -1: 0.3, 0: 0.2})
    assert step_distribution([-1], base, SYM) == pytest.approx({1: 0.3, -1: 0.5, 0: 0.2})


def test_step_distribution_zero_memory(base):
    assert step_distribution([0], base, PROP) == pytest.approx({1: 0.0, -1: 0.0, 0: 1.0})
    assert step_distribution([0], base, SYM) == pytest.approx({1: 0.4, -1: 0.4, 0: 0.2})


def test_step_distribution_mixed_memory(base):
    law = step_distribution([1, 0, -1, 1], base, SYM)
    assert sum(law.values()) == pytest.approx(1.0)
    assert law[1] == pytest.approx(0.25 * (2 * 0.5 + 0.4 + 0.3))


def test_empty_memory_is_usage_error(base):
    with pytest.raises(ParameterError):
        step_distribution([], base, PROP)
    with pytest.raises(ParameterError):
        next_step([], base, PROP, RngStream(1, 0))


def test_resample_frequencies_million_draws(base):
    draws = sample_next_steps([0], base, SYM, 10 ** 6, RngStream(3, 0))
    m = draws.size
    for value, prob in ((1, 0.4), (-1, 0.4), (0, 0.2)):
        freq = np.mean(draws == value)
        assert abs(freq - prob) < 4 * np.sqrt(prob * (1 - prob) / m)


def test_next_step_matches_batch(base):
    single = next_step([1, -1, 0], base, SYM, RngStream(9, 2))
    assert single == int(sample_next_steps([1, -1, 0], base, SYM, 1, RngStream(9, 2))[0])


@pytest.mark.parametrize("regime", list(MemoryRegime))
def test_degenerate_kernel_walks_straight(regime):
    params = ModelParams(1.0, 0.0, 0.0, allow_boundary=True)
    traj = simulate(params, regime, None, InitialLaw.PLUS_ONE, 50, RngStream(1, 0))
    assert np.array_equal(traj.sums, np.arange(1, 51))


@pytest.mark.parametrize("regime", [MemoryRegime.FULL, MemoryRegime.FIRST_STEP])
def test_zero_start_stays_at_zero(base, regime):
    for i in range(20):
        traj = simulate(base, regime, PROP, InitialLaw.ZERO, 200, RngStream(5, i))
        assert not traj.sums.any()


@pytest.mark.parametrize("regime", list(MemoryRegime))
def test_zero_start_is_absorbing_under_resampling_too(base, regime):
    # a walk whose first step is 0 is the zero process whatever the policy
    traj = simulate(base, regime, SYM, InitialLaw.ZERO, 100, RngStream(6, 0))
    assert not traj.sums.any()


def test_first_step_two_step_law(base):
    law = enumerate_sum_law(base, MemoryRegime.FIRST_STEP, None, InitialLaw.PLUS_ONE, 2)
    assert law == pytest.approx({2: 0.5, 1: 0.2, 0: 0.3})


def test_first_step_two_step_frequencies(base):
    counts = {0: 0, 1: 0, 2: 0}
    m = 20000
    for i in range(m):
        s2 = simulate(base, "first-step", None, "plus-one", 2, RngStream(11, i)).sums[-1]
        counts[int(s2)] += 1
    for value, prob in ((2, 0.5), (1, 0.2), (0, 0.3)):
        assert abs(counts[value] / m - prob) < 4 * np.sqrt(prob * (1 - prob) / m)


def test_first_and_last_memory_views():
    assert MemoryRegime.FIRST_AND_LAST.memory_indices(1) == (1,)
    assert MemoryRegime.FIRST_AND_LAST.memory_indices(5) == (1, 5)
    assert MemoryRegime.FIRST_TWO.memory_indices(1) == (1,)
    assert MemoryRegime.FIRST_TWO.memory_indices(7) == (1, 2)
    assert MemoryRegime.LAST_STEP.memory_indices(7) == (7,)
    assert MemoryRegime.FULL.memory_indices(3) == (1, 2, 3)


def test_default_policies():
    assert resolve_policy(MemoryRegime.FULL, None) is SYM
    assert resolve_policy(MemoryRegime.FIRST_AND_LAST, "default") is SYM
    assert resolve_policy(MemoryRegime.FIRST_STEP, None) is PROP
    assert resolve_policy(MemoryRegime.LAST_STEP, None) is PROP
    assert resolve_policy(MemoryRegime.LAST_STEP, "symmetric-resample") is SYM


def test_trajectory_steps_in_range(base):
    for regime in MemoryRegime:
        traj = simulate(base, regime, None, InitialLaw.THREE_POINT, 300, RngStream(2, 1))
        assert set(np.unique(traj.steps)) <= {-1, 0, 1}
        assert np.all(np.abs(traj.sums) <= np.arange(1, 301))


def test_scaled_walk():
    base = Trajectory(np.array([1, 1, -1]))
    assert np.array_equal(scaled_walk(base, 0), [0, 0, 0])
    assert np.array_equal(scaled_walk(base, 1), base.sums)
    assert np.array_equal(scaled_walk(base, -2), [-2, -4, -2])
    with pytest.raises(ParameterError):
        scaled_walk(Trajectory(np.array([-1, 1])), 2.0)


def test_bad_horizon(base):
    with pytest.raises(ParameterError):
        simulate(base, "full", None, "plus-one", 0, RngStream(1, 0))
