import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bwplace.errors import ValidationError
from bwplace.tuner import (
    Decision,
    Phase,
    TunerConfig,
    TunerState,
    co_scheduled_tuning,
    render_history,
    run_tuning,
    summarize_window,
    tuner_step,
)


class Box:
    def __init__(self):
        self.value = 0.0
        self.applied = []

    def set(self, d):
        self.value = d
        self.applied.append(d)


def oracle_stream(fn, box):
    def gen():
        while True:
            yield fn(box.value)
    return gen()


class TestConfig:
    def test_calibrated_defaults(self):
        cfg = TunerConfig()
        assert (cfg.window_size, cfg.trim, cfg.interval, cfg.step) == (20, 5, 0.2, 0.10)
        assert cfg.max_windows == 11

    def test_rejects_overlong_trim(self):
        with pytest.raises(ValidationError):
            TunerConfig(window_size=10, trim=5)

    def test_rejects_bad_step(self):
        with pytest.raises(ValidationError):
            TunerConfig(step=0.0)


class TestSummarizeWindow:
    def test_trimmed_mean(self):
        assert summarize_window(list(range(1, 21)), 5) == pytest.approx(10.5)

    def test_zero_trim_is_plain_mean(self):
        assert summarize_window([1.0, 2.0, 3.0, 4.0], 0) == pytest.approx(2.5)

    def test_constant_samples(self):
        assert summarize_window([7.0] * 20, 5) == 7.0

    def test_window_too_small(self):
        with pytest.raises(ValidationError):
            summarize_window([1.0, 2.0], 1)

    @given(st.lists(st.floats(0, 1e6), min_size=5, max_size=30), st.integers(0, 2))
    @settings(max_examples=100, deadline=None)
    def test_permutation_invariant(self, samples, trim):
        if len(samples) <= 2 * trim:
            return
        rng = np.random.default_rng(0)
        shuffled = list(samples)
        rng.shuffle(shuffled)
        assert summarize_window(samples, trim) == summarize_window(shuffled, trim)


class TestTunerStep:
    def test_decrease_keeps_climbing(self):
        cfg = TunerConfig()
        state = TunerState(current_dwp=0.1, prev_window_avg=100.0, prev_dwp=0.0)
        state, decision = tuner_step(state, 90.0, cfg)
        assert decision is Decision.INCREASE
        assert state.current_dwp == pytest.approx(0.2)

    def test_increase_stops_and_reverts(self):
        cfg = TunerConfig()
        state = TunerState(current_dwp=0.3, prev_window_avg=90.0, prev_dwp=0.2)
        state, decision = tuner_step(state, 95.0, cfg)
        assert decision is Decision.STOP
        assert state.current_dwp == pytest.approx(0.2)
        assert state.phase is Phase.STOPPED

    def test_boundary_stop_keeps_top_value(self):
        cfg = TunerConfig()
        state = TunerState(current_dwp=1.0, prev_window_avg=50.0, prev_dwp=0.9)
        state, decision = tuner_step(state, 40.0, cfg)
        assert decision is Decision.STOP
        assert state.current_dwp == 1.0

    def test_first_window_explores(self):
        cfg = TunerConfig()
        state, decision = tuner_step(TunerState(), 123.0, cfg)
        assert decision is Decision.INCREASE
        assert state.current_dwp == pytest.approx(0.1)

    def test_step_after_stop_rejected(self):
        cfg = TunerConfig()
        state = TunerState(phase=Phase.STOPPED)
        with pytest.raises(ValidationError):
            tuner_step(state, 1.0, cfg)


class TestRunTuning:
    def test_interior_minimum(self):
        box = Box()
        result = run_tuning(oracle_stream(lambda d: (d - 0.2) ** 2 + 1, box), box.set, TunerConfig())
        assert result.final_dwp == pytest.approx(0.2)
        assert len(result.records) == 4
        assert box.value == pytest.approx(0.2)

    def test_minimum_at_zero(self):
        box = Box()
        result = run_tuning(oracle_stream(lambda d: d + 1, box), box.set, TunerConfig())
        assert result.final_dwp == 0.0
        assert len(result.records) == 2

    def test_minimum_at_one(self):
        box = Box()
        result = run_tuning(oracle_stream(lambda d: 2 - d, box), box.set, TunerConfig())
        assert result.final_dwp == 1.0
        assert len(result.records) == 11

    def test_history_climbs_by_exact_steps(self):
        box = Box()
        result = run_tuning(oracle_stream(lambda d: (d - 0.4) ** 2, box), box.set, TunerConfig())
        dwps = [r.dwp for r in result.records]
        assert dwps == pytest.approx([0.0, 0.1, 0.2, 0.3, 0.4, 0.5])
        steps = np.diff(dwps)
        np.testing.assert_allclose(steps, 0.1, atol=1e-12)

    def test_stream_exhaustion(self):
        box = Box()
        with pytest.raises(ValidationError, match="exhausted"):
            run_tuning(iter([1.0] * 5), box.set, TunerConfig())

    @given(st.floats(0.0, 1.0), st.floats(0.1, 10.0))
    @settings(max_examples=100, deadline=None)
    def test_within_one_step_of_grid_argmin(self, argmin, curvature):
        cfg = TunerConfig()
        fn = lambda d: curvature * (d - argmin) ** 2
        box = Box()
        result = run_tuning(oracle_stream(fn, box), box.set, cfg)
        grid = np.round(np.arange(0, 11) * cfg.step, 12)
        grid_best = grid[int(np.argmin([fn(d) for d in grid]))]
        assert abs(result.final_dwp - grid_best) <= cfg.step + 1e-9

    @given(st.floats(0.0, 1.0), st.floats(0.1, 10.0), st.floats(0.05, 0.4))
    @settings(max_examples=100, deadline=None)
    def test_termination_bound(self, argmin, curvature, step):
        cfg = TunerConfig(step=step)
        box = Box()
        result = run_tuning(oracle_stream(lambda d: curvature * (d - argmin) ** 2, box), box.set, cfg)
        assert len(result.records) <= math.ceil(1 / step) + 1


class TestCoScheduled:
    def test_piecewise_fixture(self):
        # high-priority stall strictly decreasing until the tuned workload's
        # proximity reaches 0.3, then flat; tuned workload convex, argmin 0.5
        box = Box()
        stream_a = oracle_stream(lambda d: 2.0 - 3.0 * min(d, 0.3), box)
        stream_b = oracle_stream(lambda d: (d - 0.5) ** 2 + 1, box)
        result = co_scheduled_tuning(stream_a, stream_b, box.set, TunerConfig())
        assert result.bound == pytest.approx(0.3)
        assert result.final_dwp == pytest.approx(0.5)

    def test_flat_from_start_degenerates_to_plain_tuning(self):
        box = Box()
        stream_a = oracle_stream(lambda d: 5.0, box)
        stream_b = oracle_stream(lambda d: (d - 0.2) ** 2 + 1, box)
        result = co_scheduled_tuning(stream_a, stream_b, box.set, TunerConfig())
        assert result.bound == 0.0
        assert result.final_dwp == pytest.approx(0.2)

    def test_decreasing_all_the_way_clamps(self):
        box = Box()
        stream_a = oracle_stream(lambda d: 2.0 - d, box)
        stream_b = oracle_stream(lambda d: 1.0 + d, box)
        result = co_scheduled_tuning(stream_a, stream_b, box.set, TunerConfig())
        assert result.bound == 1.0
        assert result.final_dwp == 1.0

    @given(st.integers(0, 10**6))
    @settings(max_examples=50, deadline=None)
    def test_stage2_never_below_bound(self, seed):
        rng = np.random.default_rng(seed)
        knee = float(rng.uniform(0, 1))
        argmin = float(rng.uniform(0, 1))
        slope = float(rng.uniform(0.5, 5))
        box = Box()
        stream_a = oracle_stream(lambda d: 2.0 + slope * max(knee - d, 0.0), box)
        stream_b = oracle_stream(lambda d: (d - argmin) ** 2 + 1, box)
        result = co_scheduled_tuning(stream_a, stream_b, box.set, TunerConfig())
        assert result.final_dwp >= result.bound - 1e-12


def test_render_history_table():
    box = Box()
    result = run_tuning(oracle_stream(lambda d: (d - 0.2) ** 2, box), box.set, TunerConfig())
    text = render_history(result.records)
    assert "window" in text.splitlines()[0]
    assert len(text.splitlines()) == len(result.records) + 1
