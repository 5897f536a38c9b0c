"""Monte Carlo coincidence counts and the two correlator estimators built from them.

Random numbers come from numpy's Philox, a counter-based generator: the
stream is keyed by (seed, stream id) and pair ``i`` always consumes 64-bit
words ``2i`` (detection) and ``2i + 1`` (outcome). Any split of the pairs
into shards therefore reproduces the single-pass counts exactly.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from numpy.random import Philox

from .spin import ChshSettings, TwoQubitState, UnitVector3, spin_observable

PROB_TOL = 1e-12
_U64 = 2**64
_WORDS_PER_BLOCK = 4  # Philox4x64 emits four words per counter value
_DOUBLE_SCALE = 2.0**-53


class NoDataError(ValueError):
    """No coincidences were recorded, so a ratio estimator is undefined."""


@dataclass(frozen=True)
class CountsTable:
    n_pp: int
    n_pm: int
    n_mp: int
    n_mm: int
    n_emitted: int

    def __post_init__(self) -> None:
        counts = (self.n_pp, self.n_pm, self.n_mp, self.n_mm)
        if any(c < 0 for c in counts):
            raise ValueError(f"negative count in {counts}")
        if self.n_emitted <= 0:
            raise ValueError(f"n_emitted must be positive, got {self.n_emitted}")
        if sum(counts) > self.n_emitted:
            raise ValueError(f"{sum(counts)} coincidences exceed {self.n_emitted} emitted pairs")

    @property
    def detected(self) -> int:
        return self.n_pp + self.n_pm + self.n_mp + self.n_mm

    def __add__(self, other: "CountsTable") -> "CountsTable":
        return CountsTable(
            self.n_pp + other.n_pp,
            self.n_pm + other.n_pm,
            self.n_mp + other.n_mp,
            self.n_mm + other.n_mm,
            self.n_emitted + other.n_emitted,
        )


def _check_seed(seed: int) -> int:
    seed = int(seed)
    if not 0 <= seed < _U64:
        raise ValueError(f"seed must be an unsigned 64-bit integer, got {seed}")
    return seed


def joint_probabilities(state: TwoQubitState, a: UnitVector3, b: UnitVector3) -> np.ndarray:
    """Born probabilities for outcomes (++, +-, -+, --) along a and b."""
    ident = np.eye(2)
    sa, sb = spin_observable(a), spin_observable(b)
    amps = state.amplitudes
    probs = np.empty(4)
    for k, (s1, s2) in enumerate(((1, 1), (1, -1), (-1, 1), (-1, -1))):
        proj = np.kron((ident + s1 * sa) / 2, (ident + s2 * sb) / 2)
        probs[k] = np.vdot(amps, proj @ amps).real
    return np.clip(probs, 0.0, 1.0)


def _uniforms(seed: int, stream: int, start_word: int, count: int) -> np.ndarray:
    block, skip = divmod(start_word, _WORDS_PER_BLOCK)
    key = np.array([seed, stream % _U64], dtype=np.uint64)
    bg = Philox(key=key, counter=np.array([block, 0, 0, 0], dtype=np.uint64))
    words = bg.random_raw(skip + count)[skip:]
    return (words >> np.uint64(11)).astype(np.float64) * _DOUBLE_SCALE


def _count_range(probs: np.ndarray, g: float, seed: int, stream: int, start: int, stop: int) -> np.ndarray:
    u = _uniforms(seed, stream, 2 * start, 2 * (stop - start))
    detected = u[0::2] < g
    cdf = np.cumsum(probs)
    cdf[-1] = 1.0
    outcome = np.searchsorted(cdf, u[1::2][detected], side="right")
    return np.bincount(outcome, minlength=4)[:4]


def simulate_counts(
    probs,
    n: int,
    g: float,
    seed: int,
    stream: int = 0,
    shards: int = 1,
    workers: int = 1,
) -> CountsTable:
    """Emit `n` pairs, keep each with probability `g`, and draw outcomes from `probs`.

    Detection is pair-level. `shards` > 1 splits the pairs into contiguous
    ranges (run on `workers` threads); the result does not depend on either.
    """
    probs = np.asarray(probs, dtype=float).reshape(-1)
    if probs.shape != (4,) or np.any(probs < -PROB_TOL) or abs(probs.sum() - 1.0) > PROB_TOL * 10:
        raise ValueError(f"invalid probability vector {probs}")
    probs = np.clip(probs, 0.0, None)
    n = int(n)
    if n <= 0:
        raise ValueError(f"number of pairs must be positive, got {n}")
    if not 0.0 <= g <= 1.0:
        raise ValueError(f"detection probability must lie in [0, 1], got {g}")
    seed = _check_seed(seed)
    shards = max(1, min(int(shards), n))
    edges = np.linspace(0, n, shards + 1).astype(int)
    ranges = list(zip(edges[:-1], edges[1:]))
    if workers > 1 and shards > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(lambda r: _count_range(probs, g, seed, stream, *r), ranges))
    else:
        parts = [_count_range(probs, g, seed, stream, *r) for r in ranges]
    total = np.sum(parts, axis=0)
    return CountsTable(*(int(c) for c in total), n_emitted=n)


def rational_estimator(c: CountsTable) -> float:
    """(N++ - N+- - N-+ + N--) / (N++ + N+- + N-+ + N--)."""
    if c.detected == 0:
        raise NoDataError("all coincidence counts are zero")
    return (c.n_pp - c.n_pm - c.n_mp + c.n_mm) / c.detected


def unnormalized_estimator(c: CountsTable) -> float:
    """Same signed sum divided by emitted pairs; keeps the detection factor g."""
    return (c.n_pp - c.n_pm - c.n_mp + c.n_mm) / c.n_emitted


def rational_standard_error(c: CountsTable) -> float:
    e = rational_estimator(c)
    return math.sqrt(max(1.0 - e * e, 0.0) / c.detected)


def unnormalized_standard_error(c: CountsTable) -> float:
    # per-pair variable in {-1, 0, +1}: E[X^2] = detected fraction
    mean = unnormalized_estimator(c)
    return math.sqrt(max(c.detected / c.n_emitted - mean * mean, 0.0) / c.n_emitted)


CHSH_SIGNS = (1.0, -1.0, 1.0, 1.0)


@dataclass(frozen=True)
class BellEstimate:
    rational: float
    unnormalized: float
    counts: tuple[CountsTable, CountsTable, CountsTable, CountsTable]

    @property
    def rational_se(self) -> float:
        return math.sqrt(sum(rational_standard_error(c) ** 2 for c in self.counts))

    @property
    def unnormalized_se(self) -> float:
        return math.sqrt(sum(unnormalized_standard_error(c) ** 2 for c in self.counts))

    def unnormalized_correlators(self) -> np.ndarray:
        return np.array([unnormalized_estimator(c) for c in self.counts])


def setting_stream(setting_index: int, point_index: int = 0) -> int:
    """Stream id mixing a sweep point and a CHSH setting pair into the Philox key."""
    return (int(point_index) << 8) | int(setting_index)


def simulate_setting_counts(
    state: TwoQubitState,
    settings: ChshSettings,
    n: int,
    g: float,
    seed: int,
    point_index: int = 0,
    shards: int = 1,
    workers: int = 1,
) -> tuple[CountsTable, CountsTable, CountsTable, CountsTable]:
    """Counts for the four CHSH setting pairs, each on its own substream."""
    return tuple(
        simulate_counts(
            joint_probabilities(state, x, y),
            n,
            g,
            seed,
            stream=setting_stream(k, point_index),
            shards=shards,
            workers=workers,
        )
        for k, (x, y) in enumerate(settings.pairs())
    )


def estimate_bell(
    state: TwoQubitState,
    settings: ChshSettings,
    n: int,
    g: float,
    seed: int,
    point_index: int = 0,
    shards: int = 1,
    workers: int = 1,
) -> BellEstimate:
    """CHSH value from simulated counts, by the rational and the unnormalized estimator.

    Raises NoDataError if a setting pair records no coincidences.
    """
    counts = simulate_setting_counts(state, settings, n, g, seed, point_index, shards, workers)
    signs = np.array(CHSH_SIGNS)
    rational = abs(float(signs @ [rational_estimator(c) for c in counts]))
    unnormalized = abs(float(signs @ [unnormalized_estimator(c) for c in counts]))
    return BellEstimate(rational, unnormalized, counts)
