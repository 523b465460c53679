"""Continual-observation publication mechanisms over daily difference streams.

Four strategies publish a running level (the axe) from its clipped daily
changes, trading privacy loss against error growth:

* ``naive``  - republish the level with fresh noise every day.
* ``simple`` - noise each daily change once, publish the running sum.
* ``window`` - group days into buckets; publish noisy per-day items inside a
  bucket and one noisy partial sum per completed bucket, so any single day
  touches at most two published partial sums.
* ``binary`` - dyadic tree of partial sums; any day touches at most one node
  per level and any published value combines popcount(t) nodes.

All states carry a vector of independent lanes (``n_paths``) so Monte Carlo
batches step in lockstep; lane 0 with ``n_paths=1`` is the plain scalar case.
Internal state stays real-valued; published values are rounded to whole
shares at emission only.

Every mechanism publishes the day-0 level unperturbed and protects the
direction and size of subsequent changes, not the starting level. After
``horizon`` steps the state resets: noise bookkeeping clears, the privacy
ledger restarts, and the last published value becomes the new day-0 anchor.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .dp_core import ClipBounds, RngHandle, clip, fixed_sensitivity, sample_laplace
from .errors import InvalidInputError, InvalidParameterError, MechanismStateError

MECHANISMS = ("naive", "simple", "window", "binary")
SENSITIVITY_MODES = ("fixed", "adaptive")


def round_shares(x):
    """Round to whole shares, halves away from zero. Scalar or array."""
    rounded = np.sign(x) * np.floor(np.abs(x) + 0.5)
    if np.ndim(x) == 0:
        return int(rounded)
    return rounded.astype(np.int64)


@dataclass(frozen=True)
class DpParams:
    """Privacy and schedule parameters of a publication run.

    ``epsilon``/``horizon``/``bucket`` default to the production operating
    point (0.3, 30, 20). ``clip`` must be supplied per asset from public
    volume data. ``zero_noise`` disables all perturbation for debugging and
    exactness tests; never use it to publish.
    """

    clip: ClipBounds
    epsilon: float = 0.3
    horizon: int = 30
    bucket: int = 20
    sensitivity_mode: str = "fixed"
    zero_noise: bool = False

    def __post_init__(self) -> None:
        if not (np.isfinite(self.epsilon) and self.epsilon > 0):
            raise InvalidParameterError(f"epsilon must be positive, got {self.epsilon}")
        if self.horizon < 1:
            raise InvalidParameterError(f"horizon must be >= 1, got {self.horizon}")
        if not (1 <= self.bucket <= self.horizon):
            raise InvalidParameterError(
                f"bucket must satisfy 1 <= bucket <= horizon, got bucket={self.bucket} horizon={self.horizon}"
            )
        if self.sensitivity_mode not in SENSITIVITY_MODES:
            raise InvalidParameterError(f"unknown sensitivity_mode {self.sensitivity_mode!r}")

    @property
    def fixed_scale(self) -> float:
        """Laplace scale from the clipping width: (hi - lo) / epsilon."""
        return fixed_sensitivity(self.clip) / self.epsilon

    @property
    def tree_fanout(self) -> int:
        """Noise multiplier of the binary mechanism: ceil(log2 horizon), at least 1."""
        return max(1, math.ceil(math.log2(self.horizon)))


@dataclass(frozen=True)
class DeltaStream:
    """A level series decomposed into day-0 level plus signed daily changes.

    ``deltas[t-1]`` is the change on day t; ``pos``/``neg`` are its positive
    and negative parts (exactly one nonzero unless the change is zero).
    The original levels are recovered by ``levels()``.
    """

    initial_level: int
    deltas: np.ndarray
    pos: np.ndarray
    neg: np.ndarray

    def __post_init__(self) -> None:
        if np.any(self.pos < 0) or np.any(self.neg > 0):
            raise InvalidInputError("pos parts must be >= 0 and neg parts <= 0")
        if np.any(self.pos + self.neg != self.deltas):
            raise InvalidInputError("pos + neg must reconstruct the deltas")
        if np.any((self.pos != 0) & (self.neg != 0)):
            raise InvalidInputError("a day's change cannot have both signs")

    def __len__(self) -> int:
        return len(self.deltas)

    def levels(self) -> np.ndarray:
        """Reconstruct the level series, day 0 included."""
        out = np.empty(len(self.deltas) + 1, dtype=np.int64)
        out[0] = self.initial_level
        np.cumsum(self.deltas, out=out[1:])
        out[1:] += self.initial_level
        return out


def split_stream(series) -> DeltaStream:
    """Decompose a level series into a DeltaStream.

    The caller is responsible for clipping (see ``clip_deltas``); this is a
    pure reshaping with an exact round trip through ``levels()``.
    """
    levels = np.asarray(series, dtype=np.int64)
    if levels.ndim != 1 or levels.size < 1:
        raise InvalidInputError("series must be a non-empty 1-d sequence of share levels")
    deltas = np.diff(levels)
    return DeltaStream(
        initial_level=int(levels[0]),
        deltas=deltas,
        pos=np.where(deltas > 0, deltas, 0),
        neg=np.where(deltas < 0, deltas, 0),
    )


def clip_deltas(stream: DeltaStream, bounds: ClipBounds) -> DeltaStream:
    """Clamp each daily change into the sensitivity bounds and re-split."""
    clipped = np.clip(stream.deltas, bounds.lo, bounds.hi)
    return DeltaStream(
        initial_level=stream.initial_level,
        deltas=clipped,
        pos=np.where(clipped > 0, clipped, 0),
        neg=np.where(clipped < 0, clipped, 0),
    )


class PartialSum(NamedTuple):
    """One published noisy partial sum, recorded for structural diagnostics.

    ``kind`` is "item" (single day), "bucket" (completed window bucket) or
    "node" (binary-tree node); ``mean`` is its noiseless value, ``noisy`` the
    emitted one. Recording is only supported for single-lane states.
    """

    kind: str
    index: int
    mean: float
    noisy: float


def _as_generator(rng) -> np.random.Generator | None:
    if rng is None or isinstance(rng, np.random.Generator):
        return rng
    if isinstance(rng, RngHandle):
        return rng.generator()
    raise InvalidParameterError(f"expected RngHandle or numpy Generator, got {type(rng)!r}")


def _adaptive_spread(values: np.ndarray, count: int, bounds: ClipBounds) -> np.ndarray:
    """Per-lane max-min over the first `count` rows, zero ranges replaced by the clip width."""
    spread = values[:count].max(axis=0) - values[:count].min(axis=0)
    return np.where(spread > 0, spread, float(fixed_sensitivity(bounds)))


# ---------------------------------------------------------------------------
# mechanism states
# ---------------------------------------------------------------------------


@dataclass
class _StateBase:
    params: DpParams
    anchor: np.ndarray
    n: int
    t: int = 0
    record: bool = False
    emitted: list[PartialSum] = field(default_factory=list)

    def _check_step(self) -> int:
        if self.t >= self.params.horizon:
            raise MechanismStateError(
                f"step {self.t + 1} exceeds horizon {self.params.horizon}; reset the state first"
            )
        return self.t + 1

    def _draw(self, gen, scale) -> np.ndarray | float:
        if self.params.zero_noise:
            return 0.0
        if gen is None:
            raise InvalidParameterError("an rng is required unless zero_noise is set")
        return sample_laplace(scale, gen, size=(self.n,))

    def _log(self, kind: str, index: int, mean, noisy) -> None:
        if self.record:
            self.emitted.append(PartialSum(kind, index, float(np.ravel(mean)[0]), float(np.ravel(noisy)[0])))

    @classmethod
    def create(cls, params: DpParams, initial_level, n_paths: int = 1, record_partials: bool = False):
        if n_paths < 1:
            raise InvalidParameterError("n_paths must be >= 1")
        if record_partials and n_paths != 1:
            raise InvalidParameterError("partial-sum recording is only supported for a single lane")
        state = cls(
            params=params,
            anchor=np.full(n_paths, 0.0, dtype=np.float64) + np.asarray(initial_level, dtype=np.float64),
            n=n_paths,
            record=record_partials,
        )
        state.reset(state.anchor)
        return state

    def reset(self, anchor) -> None:  # pragma: no cover - overridden
        raise NotImplementedError


@dataclass
class NaiveState(_StateBase):
    """Fresh level republication: tracks the exact level since the last anchor."""

    level: np.ndarray = None

    def reset(self, anchor) -> None:
        self.anchor = np.broadcast_to(np.asarray(anchor, np.float64), (self.n,)).copy()
        self.level = self.anchor.copy()
        self.t = 0


def naive_step(state: NaiveState, pos_delta, neg_delta, rng=None):
    """Publish level(t) + fresh Laplace(width/epsilon). Privacy loss grows linearly in t."""
    t = state._check_step()
    gen = _as_generator(rng)
    state.level = state.level + pos_delta + neg_delta
    published = state.level + state._draw(gen, state.params.fixed_scale)
    state.t = t
    out = round_shares(published)
    return int(out[0]) if state.n == 1 else out


@dataclass
class SimpleState(_StateBase):
    """Per-item noise: each day's change is perturbed once and the noisy sum carried forward."""

    noisy_level: np.ndarray = None

    def reset(self, anchor) -> None:
        self.anchor = np.broadcast_to(np.asarray(anchor, np.float64), (self.n,)).copy()
        self.noisy_level = self.anchor.copy()
        self.t = 0


def simple_step(state: SimpleState, pos_delta, neg_delta, rng=None):
    """Publish the running sum of once-noised changes; error variance grows like t."""
    t = state._check_step()
    gen = _as_generator(rng)
    state.noisy_level = state.noisy_level + pos_delta + neg_delta + state._draw(gen, state.params.fixed_scale)
    state.t = t
    out = round_shares(state.noisy_level)
    return int(out[0]) if state.n == 1 else out


@dataclass
class WindowState(_StateBase):
    """Bucketed publication: per-day noisy items plus one noisy sum per completed bucket.

    Epoch-local time decomposes as t = d*bucket + c with 0 <= c < bucket; the
    bucket covering days (d-1)*bucket+1 .. d*bucket emits its partial sum on
    its last day and per-day items otherwise, so a published value combines
    the completed-bucket sums with the open bucket's items.
    """

    bucket_pos: np.ndarray = None  # true partial sums of the open bucket
    bucket_neg: np.ndarray = None
    done_noisy: np.ndarray = None  # sum of emitted noisy bucket sums
    open_noisy: np.ndarray = None  # sum of emitted noisy items in the open bucket
    seen: np.ndarray = None  # clipped day changes of the open bucket (adaptive scale)
    seen_len: int = 0

    def reset(self, anchor) -> None:
        self.anchor = np.broadcast_to(np.asarray(anchor, np.float64), (self.n,)).copy()
        self.bucket_pos = np.zeros(self.n)
        self.bucket_neg = np.zeros(self.n)
        self.done_noisy = np.zeros(self.n)
        self.open_noisy = np.zeros(self.n)
        self.seen = np.zeros((self.params.bucket, self.n))
        self.seen_len = 0
        self.t = 0

    def _scale(self):
        if self.params.sensitivity_mode == "adaptive":
            return _adaptive_spread(self.seen, self.seen_len, self.params.clip) / self.params.epsilon
        return self.params.fixed_scale


def window_step(state: WindowState, pos_delta, neg_delta, rng=None):
    """Advance one day and return the published level.

    ``pos_delta``/``neg_delta`` are the day's clipped change parts (scalars,
    or arrays of one value per lane). Two independent noise draws are spent
    per day, one per sign, whether the day emits an item or a bucket sum.
    """
    t = state._check_step()
    gen = _as_generator(rng)
    params = state.params

    state.seen[state.seen_len] = pos_delta + neg_delta
    state.seen_len += 1
    state.bucket_pos = state.bucket_pos + pos_delta
    state.bucket_neg = state.bucket_neg + neg_delta

    scale = state._scale()
    noise_pos = state._draw(gen, scale)
    noise_neg = state._draw(gen, scale)

    if t % params.bucket != 0:
        item = pos_delta + neg_delta + noise_pos + noise_neg
        state.open_noisy = state.open_noisy + item
        state._log("item", t, pos_delta + neg_delta, item)
    else:
        bucket_sum = state.bucket_pos + state.bucket_neg + noise_pos + noise_neg
        state.done_noisy = state.done_noisy + bucket_sum
        state._log("bucket", t // params.bucket, state.bucket_pos + state.bucket_neg, bucket_sum)
        state.open_noisy = np.zeros(state.n)
        state.bucket_pos = np.zeros(state.n)
        state.bucket_neg = np.zeros(state.n)
        state.seen_len = 0

    state.t = t
    out = round_shares(state.anchor + state.done_noisy + state.open_noisy)
    return int(out[0]) if state.n == 1 else out


def _lsb_index(t: int) -> int:
    """1-based position of the least significant set bit of t."""
    return (t & -t).bit_length()


@dataclass
class BinaryState(_StateBase):
    """Dyadic-tree publication: node i holds a partial sum over 2**(i-1) days.

    On day t the node at the least significant set bit of t absorbs all lower
    accumulators plus the day's change and is republished with fresh noise at
    scale tree_fanout * width / epsilon; the published level combines the
    stored noisy nodes at the set bits of t.
    """

    node_pos: np.ndarray = None  # accumulators, row i covers a dyadic range
    node_neg: np.ndarray = None
    noisy_pos: np.ndarray = None  # stored noisy node values
    noisy_neg: np.ndarray = None
    recent: list = field(default_factory=list)  # last tree_fanout day changes (adaptive)

    def reset(self, anchor) -> None:
        self.anchor = np.broadcast_to(np.asarray(anchor, np.float64), (self.n,)).copy()
        rows = self.params.horizon.bit_length() + 1
        self.node_pos = np.zeros((rows, self.n))
        self.node_neg = np.zeros((rows, self.n))
        self.noisy_pos = np.zeros((rows, self.n))
        self.noisy_neg = np.zeros((rows, self.n))
        self.recent = []
        self.t = 0

    def _scale(self):
        fanout = self.params.tree_fanout
        if self.params.sensitivity_mode == "adaptive":
            window = np.stack(self.recent)
            spread = _adaptive_spread(window, len(self.recent), self.params.clip)
            return fanout * spread / self.params.epsilon
        return fanout * self.params.fixed_scale


def binary_step(state: BinaryState, pos_delta, neg_delta, rng=None):
    """Advance one day and return the published level (see BinaryState)."""
    t = state._check_step()
    gen = _as_generator(rng)
    node = _lsb_index(t)

    if state.params.sensitivity_mode == "adaptive":
        state.recent.append(pos_delta + neg_delta + np.zeros(state.n))
        if len(state.recent) > state.params.tree_fanout:
            state.recent.pop(0)

    state.node_pos[node] = state.node_pos[1:node].sum(axis=0) + pos_delta
    state.node_neg[node] = state.node_neg[1:node].sum(axis=0) + neg_delta
    state.node_pos[1:node] = 0.0
    state.node_neg[1:node] = 0.0

    scale = state._scale()
    state.noisy_pos[node] = state.node_pos[node] + state._draw(gen, scale)
    state.noisy_neg[node] = state.node_neg[node] + state._draw(gen, scale)
    state._log("node", t, state.node_pos[node] + state.node_neg[node], state.noisy_pos[node] + state.noisy_neg[node])

    published = state.anchor.copy()
    bits = t
    level = 1
    while bits:
        if bits & 1:
            published += state.noisy_pos[level] + state.noisy_neg[level]
        bits >>= 1
        level += 1

    state.t = t
    out = round_shares(published)
    return int(out[0]) if state.n == 1 else out


# ---------------------------------------------------------------------------
# whole-series drivers
# ---------------------------------------------------------------------------

_STATES = {"naive": NaiveState, "simple": SimpleState, "window": WindowState, "binary": BinaryState}
_STEPS = {"naive": naive_step, "simple": simple_step, "window": window_step, "binary": binary_step}


def create_state(params: DpParams, mechanism: str, initial_level, n_paths: int = 1, record_partials: bool = False):
    """Instantiate the state object for a named mechanism."""
    if mechanism not in _STATES:
        raise InvalidParameterError(f"unknown mechanism {mechanism!r}; expected one of {MECHANISMS}")
    return _STATES[mechanism].create(params, initial_level, n_paths, record_partials)


def step(state, pos_delta, neg_delta, rng=None):
    """Dispatch to the step function matching the state's type."""
    for name, cls in _STATES.items():
        if type(state) is cls:
            return _STEPS[name](state, pos_delta, neg_delta, rng)
    raise InvalidParameterError(f"not a mechanism state: {type(state)!r}")


def naive_publish(stream: DeltaStream, params: DpParams, rng=None) -> np.ndarray:
    """Whole-series naive publication (clips, then drives naive_step over all days)."""
    return publish_series(stream, params, "naive", rng)


def simple_publish(stream: DeltaStream, params: DpParams, rng=None) -> np.ndarray:
    """Whole-series simple publication."""
    return publish_series(stream, params, "simple", rng)


def publish_paths(
    stream: DeltaStream,
    params: DpParams,
    mechanism: str,
    rng=None,
    n_paths: int = 1,
) -> np.ndarray:
    """Publish `n_paths` independent noisy versions of one stream, in lockstep.

    Returns an int64 array of shape (n_paths, len(stream) + 1); column 0 is
    the unperturbed day-0 level. Deltas are clipped to params.clip before
    entering the mechanism. State resets automatically every `horizon` days,
    re-anchoring on the previously published value.
    """
    clipped = clip_deltas(stream, params.clip)
    gen = _as_generator(rng)
    state = create_state(params, mechanism, clipped.initial_level, n_paths)
    step_fn = _STEPS[mechanism]

    out = np.empty((n_paths, len(clipped) + 1), dtype=np.int64)
    out[:, 0] = clipped.initial_level
    for t in range(1, len(clipped) + 1):
        if state.t >= params.horizon:
            state.reset(out[:, t - 1])
        out[:, t] = step_fn(state, clipped.pos[t - 1], clipped.neg[t - 1], gen)
    return out


def publish_series(stream: DeltaStream, params: DpParams, mechanism: str = "window", rng=None) -> np.ndarray:
    """Publish one noisy series; int64 array of the same length as the input levels."""
    return publish_paths(stream, params, mechanism, rng, n_paths=1)[0]
