import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from axedp.dp_core import ClipBounds, RngHandle, laplace_sum_tail, sample_laplace
from axedp.errors import InvalidInputError, InvalidParameterError, MechanismStateError
from axedp.mechanisms import (
    MECHANISMS,
    BinaryState,
    DpParams,
    WindowState,
    binary_step,
    clip_deltas,
    publish_paths,
    publish_series,
    round_shares,
    split_stream,
    window_step,
)

from conftest import quantile_stderr

BOUNDS = ClipBounds(-1000, 1000)


def params(**overrides) -> DpParams:
    values = dict(clip=BOUNDS, epsilon=1.0, horizon=30, bucket=20)
    values.update(overrides)
    return DpParams(**values)


def random_walk(days: int, seed: int, magnitude: int = 1000, start: int = 0) -> np.ndarray:
    gen = np.random.default_rng(seed)
    steps = gen.integers(-magnitude, magnitude + 1, size=days)
    return np.concatenate([[start], start + np.cumsum(steps)])


class TestSplitStream:
    def test_example(self):
        stream = split_stream([10, 13, 11])
        assert stream.initial_level == 10
        assert stream.deltas.tolist() == [3, -2]
        assert stream.pos.tolist() == [3, 0]
        assert stream.neg.tolist() == [0, -2]

    def test_constant_series(self):
        stream = split_stream([5, 5, 5])
        assert stream.deltas.tolist() == [0, 0]
        assert stream.pos.tolist() == [0, 0]
        assert stream.neg.tolist() == [0, 0]

    def test_empty_rejected(self):
        with pytest.raises(InvalidInputError):
            split_stream([])

    @given(st.lists(st.integers(-10**6, 10**6), min_size=1, max_size=200))
    def test_levels_round_trip(self, series):
        stream = split_stream(series)
        assert stream.levels().tolist() == series
        assert np.all(stream.pos >= 0)
        assert np.all(stream.neg <= 0)
        assert np.all(stream.pos + stream.neg == stream.deltas)


class TestDpParams:
    def test_production_defaults(self):
        defaults = DpParams(clip=BOUNDS)
        assert (defaults.epsilon, defaults.horizon, defaults.bucket) == (0.3, 30, 20)

    @pytest.mark.parametrize("bad", [dict(epsilon=0), dict(epsilon=-1), dict(bucket=0), dict(bucket=31)])
    def test_invalid(self, bad):
        with pytest.raises(InvalidParameterError):
            params(**bad)

    def test_tree_fanout(self):
        assert params(horizon=256, bucket=1).tree_fanout == 8
        assert params(horizon=30, bucket=20).tree_fanout == 5
        assert params(horizon=1, bucket=1).tree_fanout == 1


class TestZeroNoiseExactness:
    @pytest.mark.parametrize("mechanism", MECHANISMS)
    def test_identity_on_random_walks(self, mechanism):
        quiet = params(zero_noise=True)
        for seed in range(5):
            series = random_walk(200, seed)
            stream = split_stream(series)
            assert np.array_equal(publish_series(stream, quiet, mechanism), series)

    @pytest.mark.parametrize("mechanism", MECHANISMS)
    def test_identity_across_resets(self, mechanism):
        # 130 days with horizon 30 forces four resets
        quiet = params(zero_noise=True, horizon=30, bucket=7)
        series = random_walk(130, 99)
        assert np.array_equal(publish_series(split_stream(series), quiet, mechanism), series)


class TestDeterminism:
    @pytest.mark.parametrize("mechanism", MECHANISMS)
    def test_same_seed_same_series(self, mechanism):
        stream = split_stream(random_walk(90, 4))
        first = publish_series(stream, params(), mechanism, RngHandle(17))
        second = publish_series(stream, params(), mechanism, RngHandle(17))
        assert np.array_equal(first, second)

    @pytest.mark.parametrize("mechanism", MECHANISMS)
    def test_output_length_matches_input(self, mechanism):
        for days in (1, 2, 29, 30, 31, 64):
            series = random_walk(days - 1, days) if days > 1 else np.array([42])
            pub = publish_series(split_stream(series), params(), mechanism, RngHandle(1))
            assert len(pub) == len(series)

    def test_lanes_are_independent_but_reproducible(self):
        stream = split_stream(random_walk(40, 8))
        lanes = publish_paths(stream, params(), "window", RngHandle(3), n_paths=4)
        again = publish_paths(stream, params(), "window", RngHandle(3), n_paths=4)
        assert np.array_equal(lanes, again)
        assert len({tuple(row) for row in lanes.tolist()}) == 4


class TestNaive:
    def test_error_variance_is_flat_in_time(self):
        # every day carries one fresh draw: var = 2 * (width/eps)^2 at every t
        stream = split_stream(random_walk(6, 2, magnitude=100))
        spec = params(epsilon=100.0)  # scale 20
        pub = publish_paths(stream, spec, "naive", RngHandle(11), n_paths=20_000)
        errors = pub[:, 1:] - stream.levels()[None, 1:]
        expected = 2.0 * (2000 / 100.0) ** 2
        for t in range(errors.shape[1]):
            assert errors[:, t].var() == pytest.approx(expected, rel=0.1)

    def test_day_zero_published_exactly(self):
        stream = split_stream(random_walk(10, 3))
        pub = publish_series(stream, params(), "naive", RngHandle(0))
        assert pub[0] == stream.initial_level


class TestSimple:
    def test_error_variance_grows_linearly(self):
        stream = split_stream(np.zeros(9, dtype=np.int64))
        spec = params(epsilon=100.0)  # scale 20, horizon avoids reset within 8 days
        pub = publish_paths(stream, spec, "simple", RngHandle(13), n_paths=20_000)
        errors = pub[:, 1:].astype(float)
        unit = 2.0 * (2000 / 100.0) ** 2
        for t in (1, 4, 8):
            assert errors[:, t - 1].var() == pytest.approx(unit * t, rel=0.1)

    def test_first_error_is_one_laplace_draw(self):
        stream = split_stream(np.zeros(2, dtype=np.int64))
        spec = params(epsilon=100.0)  # scale 20
        pub_rows = publish_paths(stream, spec, "simple", RngHandle(29), n_paths=50_000)
        # the day-1 error must be exactly the stream's first Laplace draw, rounded at emission
        expected = round_shares(sample_laplace(20.0, RngHandle(29).generator(), size=(50_000,)))
        assert np.array_equal(pub_rows[:, 1], expected)


class TestWindowStructure:
    def test_zero_noise_telescopes_mid_bucket(self):
        quiet = params(zero_noise=True, horizon=30, bucket=7)
        series = random_walk(30, 5)
        assert np.array_equal(publish_series(split_stream(series), quiet, "window"), series)

    def test_step_past_horizon_raises(self):
        state = WindowState.create(params(horizon=2, bucket=1, zero_noise=True), 0)
        window_step(state, 1, 0)
        window_step(state, 1, 0)
        with pytest.raises(MechanismStateError):
            window_step(state, 1, 0)
        state.reset(5)
        assert window_step(state, 2, 0) == 7

    def _partials(self, series, horizon=24, bucket=6):
        quiet = params(zero_noise=True, horizon=horizon, bucket=bucket)
        stream = clip_deltas(split_stream(series), BOUNDS)
        state = WindowState.create(quiet, stream.initial_level, record_partials=True)
        for pos, neg in zip(stream.pos, stream.neg):
            window_step(state, int(pos), int(neg))
        return state.emitted

    def test_neighboring_streams_touch_at_most_two_partial_sums(self):
        gen = np.random.default_rng(123)
        width = 2000  # clip width of BOUNDS
        for _ in range(200):
            days = int(gen.integers(4, 24))
            base = random_walk(days, int(gen.integers(1 << 30)), magnitude=900)
            flip_day = int(gen.integers(1, days + 1))
            other = base.copy()
            other[flip_day:] += int(gen.integers(-900, 901)) - int(base[flip_day] - base[flip_day - 1])
            mine = self._partials(base)
            theirs = self._partials(other)
            assert [(p.kind, p.index) for p in mine] == [(p.kind, p.index) for p in theirs]
            diffs = [abs(a.mean - b.mean) for a, b in zip(mine, theirs) if a.mean != b.mean]
            assert len(diffs) <= 2
            assert all(d <= width for d in diffs)

    def test_each_day_has_two_fresh_draws(self):
        # error at the end of a full horizon of buckets is a sum of 2*(T/B) draws
        spec = params(epsilon=1.0, horizon=100, bucket=10, clip=ClipBounds(-1, 1))
        stream = split_stream(np.zeros(101, dtype=np.int64))
        pub = publish_paths(stream, spec, "window", RngHandle(41), n_paths=2000)
        errors = np.abs(pub[:, 100].astype(float))
        bound = laplace_sum_tail([2.0] * 20, 0.05)
        assert np.quantile(errors, 0.95) <= bound

    def test_adaptive_scale_never_wider_than_fixed(self):
        adaptive = params(sensitivity_mode="adaptive", epsilon=0.5, horizon=20, bucket=5)
        fixed = params(sensitivity_mode="fixed", epsilon=0.5, horizon=20, bucket=5)
        stream = split_stream(random_walk(20, 21, magnitude=10))
        pub_a = publish_paths(stream, adaptive, "window", RngHandle(2), n_paths=4000)
        pub_f = publish_paths(stream, fixed, "window", RngHandle(2), n_paths=4000)
        err_a = np.abs(pub_a[:, -1] - stream.levels()[-1])
        err_f = np.abs(pub_f[:, -1] - stream.levels()[-1])
        # small daily moves -> adaptive windows are much narrower than the clip width
        assert np.quantile(err_a, 0.95) < np.quantile(err_f, 0.95)


class TestBinaryStructure:
    def test_zero_noise_dyadic_ranges_tile(self):
        quiet = params(zero_noise=True, horizon=64, bucket=1)
        series = random_walk(64, 6)
        assert np.array_equal(publish_series(split_stream(series), quiet, "binary"), series)

    def test_published_at_five_combines_two_nodes(self):
        spec = params(horizon=8, bucket=1)
        state = BinaryState.create(spec, 0, record_partials=True)
        gen = RngHandle(55).generator()
        published = [binary_step(state, 0, 0, gen) for _ in range(5)]
        nodes = {p.index: p for p in state.emitted}
        # t=5 is binary 101: the value must equal node(4) + node(5) noise exactly
        reconstructed = nodes[4].noisy + nodes[5].noisy
        assert published[-1] == pytest.approx(reconstructed, abs=0.5 + 1e-9)

    def test_step_past_horizon_raises(self):
        state = BinaryState.create(params(horizon=2, bucket=1, zero_noise=True), 0)
        binary_step(state, 1, 0)
        binary_step(state, 0, -1)
        with pytest.raises(MechanismStateError):
            binary_step(state, 1, 0)

    def _node_means(self, series, horizon=32):
        quiet = params(zero_noise=True, horizon=horizon, bucket=1)
        stream = clip_deltas(split_stream(series), BOUNDS)
        state = BinaryState.create(quiet, stream.initial_level, record_partials=True)
        for pos, neg in zip(stream.pos, stream.neg):
            binary_step(state, int(pos), int(neg))
        return state.emitted

    def test_neighbor_touches_at_most_one_node_per_level(self):
        gen = np.random.default_rng(7)
        for _ in range(50):
            days = int(gen.integers(4, 32))
            base = random_walk(days, int(gen.integers(1 << 30)), magnitude=900)
            flip_day = int(gen.integers(1, days + 1))
            other = base.copy()
            other[flip_day:] += int(gen.integers(-900, 901)) - int(base[flip_day] - base[flip_day - 1])
            mine = self._node_means(base)
            theirs = self._node_means(other)
            changed = [a for a, b in zip(mine, theirs) if a.mean != b.mean]
            max_levels = (32).bit_length()
            assert len(changed) <= max_levels
            # one changed node per level at most
            levels = [(p.index & -p.index).bit_length() for p in changed]
            assert len(levels) == len(set(levels))


class TestMonotoneInEpsilon:
    @pytest.mark.parametrize("mechanism", ["window", "binary"])
    def test_error_quantile_nonincreasing(self, mechanism):
        stream = split_stream(np.zeros(31, dtype=np.int64))
        quantiles = []
        errs = []
        for epsilon in (0.1, 0.3, 0.5, 0.9):
            spec = params(epsilon=epsilon, horizon=30, bucket=5, clip=ClipBounds(-10, 10))
            pub = publish_paths(stream, spec, mechanism, RngHandle(77), n_paths=3000)
            sample = np.abs(pub[:, -1].astype(float))
            quantiles.append(np.quantile(sample, 0.95))
            errs.append(quantile_stderr(sample, 0.95))
        for i in range(len(quantiles) - 1):
            slack = 2.0 * np.hypot(errs[i], errs[i + 1])
            assert quantiles[i + 1] <= quantiles[i] + slack
