"""Xavier and Kaiming weight initialization, normal and uniform variants.

Both families target a weight variance that keeps the forward signal variance
from shrinking layer to layer: 1/fan_in for Xavier (linear layers), 2/fan_in
for Kaiming (compensating for ReLU zeroing half of a symmetric pre-activation
distribution). The uniform variants use the half-width whose variance matches
the same target, i.e. sqrt(3/fan_in) and sqrt(6/fan_in).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import ValidationError
from .numerics import Rng


class Family(Enum):
    XAVIER = "xavier"
    KAIMING = "kaiming"


class DistKind(Enum):
    NORMAL = "normal"
    UNIFORM = "uniform"


@dataclass(frozen=True)
class InitScheme:
    """One of the four initialization variants: family x distribution."""

    family: Family
    dist: DistKind

    def __str__(self) -> str:
        return f"{self.family.value}-{self.dist.value}"


XAVIER_NORMAL = InitScheme(Family.XAVIER, DistKind.NORMAL)
XAVIER_UNIFORM = InitScheme(Family.XAVIER, DistKind.UNIFORM)
KAIMING_NORMAL = InitScheme(Family.KAIMING, DistKind.NORMAL)
KAIMING_UNIFORM = InitScheme(Family.KAIMING, DistKind.UNIFORM)

ALL_SCHEMES = (XAVIER_NORMAL, XAVIER_UNIFORM, KAIMING_NORMAL, KAIMING_UNIFORM)

# Variance numerator per family: Kaiming doubles Xavier's 1/d to undo the
# halving of second moments that ReLU applies to a zero-symmetric input.
_GAIN = {Family.XAVIER: 1.0, Family.KAIMING: 2.0}


def _check_fan_in(fan_in) -> int:
    if isinstance(fan_in, bool) or not isinstance(fan_in, (int, np.integer)):
        raise ValidationError(f"fan_in must be an integer, got {fan_in!r}")
    if fan_in < 1:
        raise ValidationError(f"fan_in must be >= 1, got {fan_in}")
    return int(fan_in)


def target_variance(scheme: InitScheme, fan_in: int) -> float:
    """Weight variance the scheme aims for: 1/fan_in (Xavier) or 2/fan_in (Kaiming).

    Independent of the distribution variant; fan_in is the layer's input
    dimension (number of columns of W under y = W x + b).
    """
    fan_in = _check_fan_in(fan_in)
    return _GAIN[scheme.family] / fan_in


def uniform_bound(scheme: InitScheme, fan_in: int) -> float:
    """Half-width of the centered uniform whose variance equals the target.

    A Uniform(-b, b) has variance b^2/3, so b = sqrt(3 * target_variance):
    sqrt(3/fan_in) for Xavier, sqrt(6/fan_in) for Kaiming.
    """
    fan_in = _check_fan_in(fan_in)
    return math.sqrt(3.0 * _GAIN[scheme.family] / fan_in)


def initialize(rng: Rng, scheme: InitScheme, fan_in: int, rows: int, cols: int) -> np.ndarray:
    """Draw a rows x cols weight matrix with i.i.d. entries per ``scheme``.

    Entries have mean 0 and variance target_variance(scheme, fan_in). For a
    weight matrix applied as W @ x, fan_in should equal cols.
    """
    fan_in = _check_fan_in(fan_in)
    if rows < 1 or cols < 1:
        raise ValidationError(f"matrix dimensions must be positive, got {rows}x{cols}")
    n = rows * cols
    if scheme.dist is DistKind.NORMAL:
        flat = rng.normal(n, 0.0, target_variance(scheme, fan_in))
    else:
        bound = uniform_bound(scheme, fan_in)
        flat = rng.uniform(-bound, bound, n)
    return flat.reshape(rows, cols)
