"""Categorical sampling from choice weights.

Random bits come from numpy's PCG64 generator.  A uniform real is made
from the high 53 bits of one 64-bit output word, ``u = (word >> 11) * 2**-53``,
so ``u`` lies in ``[0, 1)`` and every draw consumes exactly one word.

A draw returns the smallest rank ``k`` with ``prefix[k] > u * total``.
The prefix sums are accumulated left to right in rank order; the binary
search sampler and the linear-scan reference therefore agree exactly on
any shared stream of uniforms.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .strategy import WeightVector

MASK64 = (1 << 64) - 1
_TWO_NEG_53 = 2.0 ** -53


def splitmix64(x: int) -> int:
    """One round of the SplitMix64 output function."""
    x = (x + 0x9E3779B97F4A7C15) & MASK64
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & MASK64
    return x ^ (x >> 31)


def derive_seed(seed: int, index: int) -> int:
    """Seed of the ``index``-th independent stream derived from ``seed``.

    ``splitmix64(seed XOR splitmix64(index))``, all arithmetic mod 2**64.
    """
    return splitmix64((seed & MASK64) ^ splitmix64(index & MASK64))


class RngStream:
    """Deterministic stream of 64-bit words and uniform reals.

    Not thread-safe.  Give each concurrent task its own stream (see
    :meth:`spawn`).
    """

    def __init__(self, seed: int):
        if not 0 <= seed <= MASK64:
            raise ValueError("seed must be an unsigned 64-bit integer")
        self.seed = seed
        self._bits = np.random.PCG64(seed)

    def spawn(self, index: int) -> "RngStream":
        return RngStream(derive_seed(self.seed, index))

    def next_u64(self) -> int:
        return int(self._bits.random_raw())

    def u64s(self, n: int) -> np.ndarray:
        return self._bits.random_raw(n)

    def uniform(self) -> float:
        return (self.next_u64() >> 11) * _TWO_NEG_53

    def uniforms(self, n: int) -> np.ndarray:
        """``n`` uniforms, identical to ``n`` successive :meth:`uniform` calls."""
        return (self._bits.random_raw(n) >> np.uint64(11)).astype(np.float64) * _TWO_NEG_53

    def normals(self, n: int) -> np.ndarray:
        """Standard normals by Box-Muller, two uniforms per pair of outputs.

        With uniforms ``u1, u2``: ``r = sqrt(-2 ln(1 - u1))``, outputs
        ``r cos(2 pi u2)`` then ``r sin(2 pi u2)``.
        """
        pairs = (n + 1) // 2
        u = self.uniforms(2 * pairs).reshape(pairs, 2)
        r = np.sqrt(-2.0 * np.log1p(-u[:, 0]))
        theta = 2.0 * math.pi * u[:, 1]
        out = np.column_stack((r * np.cos(theta), r * np.sin(theta))).ravel()
        return out[:n]


@dataclass(frozen=True)
class CumulativeSampler:
    prefix: np.ndarray
    total: float

    def __len__(self) -> int:
        return self.prefix.size


def _prefix(weights: np.ndarray) -> np.ndarray:
    # np.cumsum accumulates sequentially, left to right
    return np.cumsum(weights, dtype=np.float64)


def _as_weights(w) -> np.ndarray:
    weights = np.asarray(getattr(w, "weights", w), dtype=np.float64)
    if weights.ndim != 1 or weights.size == 0:
        raise ValueError("weight vector must be one-dimensional and non-empty")
    return weights


def build_sampler(w: WeightVector) -> CumulativeSampler:
    prefix = _prefix(_as_weights(w))
    total = float(prefix[-1])
    if not total > 0:
        raise ValueError("no admissible restaurant: total weight is zero")
    prefix.setflags(write=False)
    return CumulativeSampler(prefix, total)


def rank_for_uniform(s: CumulativeSampler, u: float) -> int:
    """Inverse CDF by binary search: 1-based rank for one uniform ``u``."""
    return int(np.searchsorted(s.prefix, u * s.total, side="right")) + 1


def draw(s: CumulativeSampler, rng: RngStream) -> int:
    return rank_for_uniform(s, rng.uniform())


def draw_many(s: CumulativeSampler, rng: RngStream, m: int) -> np.ndarray:
    """``m`` draws (1-based ranks), same result as ``m`` calls of :func:`draw`."""
    return np.searchsorted(s.prefix, rng.uniforms(m) * s.total, side="right") + 1


def tally_draws(s: CumulativeSampler, rng: RngStream, m: int) -> np.ndarray:
    """Per-rank counts of ``m`` draws; equals ``bincount(draw_many(...) - 1)``.

    Only the counts are kept, so the uniforms can be sorted first, which
    makes the binary searches cache friendly.
    """
    targets = rng.uniforms(m) * s.total
    targets.sort()
    ranks = np.searchsorted(s.prefix, targets, side="right")
    return np.bincount(ranks, minlength=s.prefix.size)


def rank_for_uniform_naive(w: WeightVector, u: float) -> int:
    """Reference inverse CDF: left-to-right linear scan."""
    weights = _as_weights(w).tolist()
    total = 0.0
    for x in weights:
        total += x
    if not total > 0:
        raise ValueError("no admissible restaurant: total weight is zero")
    target = u * total
    running = 0.0
    for i, x in enumerate(weights):
        running += x
        if running > target:
            return i + 1
    raise AssertionError("uniform outside [0, 1)")


def draw_naive(w: WeightVector, rng: RngStream) -> int:
    return rank_for_uniform_naive(w, rng.uniform())
