"""Dense float64 matrix helpers, activations, and a seeded deterministic RNG.

All numeric state lives in 2-D ``numpy`` arrays of 64-bit floats. Randomness
comes from :class:`Rng`, a counter-based SplitMix64 generator implemented with
pure unsigned 64-bit integer arithmetic, so a given seed produces bit-identical
streams on every platform. Normal draws use the Box-Muller transform over that
same stream; no platform RNG is ever consulted.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ShapeError, ValidationError

_MASK64 = 0xFFFFFFFFFFFFFFFF
_GOLDEN = 0x9E3779B97F4A7C15
_MIX_A = 0xBF58476D1CE4E5B9
_MIX_B = 0x94D049BB133111EB
_INV_2_53 = 2.0 ** -53


def as_matrix(data) -> np.ndarray:
    """Coerce ``data`` to a 2-D float64 array, the library's sole container."""
    m = np.asarray(data, dtype=np.float64)
    if m.ndim != 2:
        raise ShapeError(f"expected a 2-D matrix, got shape {m.shape}")
    return m


def matmul(a, b) -> np.ndarray:
    """Matrix product with an explicit shape check naming both operands."""
    a = as_matrix(a)
    b = as_matrix(b)
    if a.shape[1] != b.shape[0]:
        raise ShapeError(
            f"cannot multiply {a.shape[0]}x{a.shape[1]} by {b.shape[0]}x{b.shape[1]}: "
            f"inner dimensions {a.shape[1]} and {b.shape[0]} differ"
        )
    return a @ b


def relu(x) -> np.ndarray:
    """Elementwise max(0, x)."""
    return np.maximum(np.asarray(x, dtype=np.float64), 0.0)


def softmax(logits) -> np.ndarray:
    """Row-wise softmax with max-subtraction so large logits cannot overflow."""
    logits = as_matrix(logits)
    shifted = logits - logits.max(axis=1, keepdims=True)
    e = np.exp(shifted)
    return e / e.sum(axis=1, keepdims=True)


def cross_entropy(probs, labels) -> float:
    """Mean negative log-likelihood of the true classes.

    ``probs`` rows must already be normalized (each summing to 1); the true
    class probability is clamped to 1e-15 before the log so a confident wrong
    prediction yields a large finite loss instead of infinity.
    """
    probs = as_matrix(probs)
    labels = _check_labels(labels, probs.shape[0], probs.shape[1])
    row_sums = probs.sum(axis=1)
    if not np.allclose(row_sums, 1.0, atol=1e-8):
        worst = int(np.argmax(np.abs(row_sums - 1.0)))
        raise ValidationError(
            f"probability rows must sum to 1; row {worst} sums to {row_sums[worst]!r}"
        )
    p_true = probs[np.arange(probs.shape[0]), labels]
    return float(-np.log(np.maximum(p_true, 1e-15)).mean())


def _check_labels(labels, expected_len: int, n_classes: int) -> np.ndarray:
    labels = np.asarray(labels)
    if labels.ndim != 1 or labels.shape[0] != expected_len:
        raise ShapeError(
            f"expected {expected_len} labels, got array of shape {labels.shape}"
        )
    if not np.issubdtype(labels.dtype, np.integer):
        raise ValidationError(f"labels must be integers, got dtype {labels.dtype}")
    labels = labels.astype(np.int64)
    if labels.size and (labels.min() < 0 or labels.max() >= n_classes):
        bad = labels[(labels < 0) | (labels >= n_classes)][0]
        raise ValidationError(f"label {bad} outside [0, {n_classes})")
    return labels


@dataclass(frozen=True)
class NormalDist:
    """Normal distribution parameterized by mean and variance (not std)."""

    mean: float
    variance: float

    def __post_init__(self):
        if not self.variance > 0:
            raise ValidationError(f"variance must be positive, got {self.variance}")


@dataclass(frozen=True)
class UniformDist:
    """Uniform distribution on the open-ended interval [lo, hi)."""

    lo: float
    hi: float

    def __post_init__(self):
        if not self.lo < self.hi:
            raise ValidationError(f"need lo < hi, got [{self.lo}, {self.hi})")


def _mix64(z: int) -> int:
    """SplitMix64 finalizer on a 64-bit counter value (pure Python ints)."""
    z = ((z ^ (z >> 30)) * _MIX_A) & _MASK64
    z = ((z ^ (z >> 27)) * _MIX_B) & _MASK64
    return z ^ (z >> 31)


def derive_seed(seed: int, stream: int) -> int:
    """Derive a decorrelated child seed for a named sub-stream.

    Used by the harness so data synthesis, splitting, per-fold training, etc.
    each get an independent generator from one experiment seed.
    """
    return _mix64((seed + stream * _GOLDEN) & _MASK64)


class Rng:
    """Counter-based SplitMix64 stream of 64-bit words.

    Every draw advances a counter by a fixed odd constant and mixes it, so the
    k-th output is a pure function of (seed, k). Bulk draws vectorize the same
    arithmetic in uint64 numpy ops; scalar and bulk paths share one counter, so
    interleaving them never reuses or skips state.
    """

    def __init__(self, seed: int):
        self._counter = int(seed) & _MASK64

    def _next_u64(self) -> int:
        self._counter = (self._counter + _GOLDEN) & _MASK64
        return _mix64(self._counter)

    def _next_block(self, n: int) -> np.ndarray:
        steps = np.arange(1, n + 1, dtype=np.uint64)
        counters = np.uint64(self._counter) + steps * np.uint64(_GOLDEN)
        self._counter = int(counters[-1])
        z = counters
        z = (z ^ (z >> np.uint64(30))) * np.uint64(_MIX_A)
        z = (z ^ (z >> np.uint64(27))) * np.uint64(_MIX_B)
        return z ^ (z >> np.uint64(31))

    def random(self, n: int) -> np.ndarray:
        """n doubles in [0, 1), each built from the top 53 bits of one word."""
        if n < 0:
            raise ValidationError(f"draw count must be nonnegative, got {n}")
        if n == 0:
            return np.empty(0, dtype=np.float64)
        return (self._next_block(n) >> np.uint64(11)) * _INV_2_53

    def uniform(self, lo: float, hi: float, n: int) -> np.ndarray:
        """n doubles uniform on [lo, hi)."""
        if not lo < hi:
            raise ValidationError(f"need lo < hi, got [{lo}, {hi})")
        return lo + (hi - lo) * self.random(n)

    def normal(self, n: int, mean: float = 0.0, variance: float = 1.0) -> np.ndarray:
        """n normal draws via Box-Muller over this stream's uniforms."""
        if not variance > 0:
            raise ValidationError(f"variance must be positive, got {variance}")
        if n < 0:
            raise ValidationError(f"draw count must be nonnegative, got {n}")
        if n == 0:
            return np.empty(0, dtype=np.float64)
        pairs = (n + 1) // 2
        # u1 lands in (0, 1] so the log below is always finite.
        u1 = ((self._next_block(pairs) >> np.uint64(11)) + np.uint64(1)) * _INV_2_53
        u2 = (self._next_block(pairs) >> np.uint64(11)) * _INV_2_53
        radius = np.sqrt(-2.0 * np.log(u1))
        theta = 2.0 * np.pi * u2
        z = np.concatenate([radius * np.cos(theta), radius * np.sin(theta)])[:n]
        return mean + np.sqrt(variance) * z

    def randbelow(self, bound: int) -> int:
        """One integer uniform on [0, bound), by masked rejection (unbiased)."""
        if bound <= 0:
            raise ValidationError(f"bound must be positive, got {bound}")
        if bound == 1:
            self._next_u64()
            return 0
        mask = (1 << (bound - 1).bit_length()) - 1
        while True:
            r = self._next_u64() & mask
            if r < bound:
                return r

    def permutation(self, n: int) -> np.ndarray:
        """Uniform random permutation of arange(n).

        Sorts one fresh 64-bit key per element (stable, so the result is
        deterministic even in the astronomically unlikely event of a key
        collision). Consumes exactly n words of the stream.
        """
        if n < 0:
            raise ValidationError(f"permutation size must be nonnegative, got {n}")
        if n == 0:
            return np.empty(0, dtype=np.int64)
        keys = self._next_block(n)
        return np.argsort(keys, kind="stable")


def sample(rng: Rng, dist, n: int) -> np.ndarray:
    """Draw n floats from ``dist`` (NormalDist or UniformDist) using ``rng``."""
    if isinstance(dist, NormalDist):
        return rng.normal(n, dist.mean, dist.variance)
    if isinstance(dist, UniformDist):
        return rng.uniform(dist.lo, dist.hi, n)
    raise TypeError(f"unknown distribution {dist!r}")
