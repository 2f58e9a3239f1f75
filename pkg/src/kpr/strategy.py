"""Choice probabilities of the uniform learning strategy.

Every agent picks restaurant ``k`` (1-based rank) with probability
proportional to ``k**alpha * exp(-n_k / T)``, where ``n_k`` is last
evening's crowd at ``k``.  The two limits of the noise scale ``T`` are
represented exactly instead of by huge or tiny floats:

* ``T = inf``  -> the crowd factor is 1 and only the rank term survives;
* ``T = 0``    -> restaurants that were visited last evening get weight 0,
  the vacant ones keep their rank weight.
"""

from __future__ import annotations

import enum
import functools
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np


class TemperatureKind(enum.Enum):
    ZERO = "zero"
    FINITE = "finite"
    INFINITE = "infinite"


class Mode(enum.Enum):
    PROBABILISTIC = "probabilistic"
    DICTATED = "dictated"


@dataclass(frozen=True)
class Temperature:
    """Noise scale ``T``: a positive real, or one of the two exact limits."""

    kind: TemperatureKind
    value: Optional[float] = None

    def __post_init__(self):
        if self.kind is TemperatureKind.FINITE:
            if self.value is None or not math.isfinite(self.value) or self.value <= 0:
                raise ValueError(f"finite temperature must be a positive real, got {self.value!r}")
        elif self.value is not None:
            raise ValueError(f"{self.kind.value} temperature carries no value")

    @classmethod
    def finite(cls, value: float) -> "Temperature":
        return cls(TemperatureKind.FINITE, float(value))

    @classmethod
    def parse(cls, text: str | float | int) -> "Temperature":
        """Parse ``inf``, ``0`` or a positive decimal."""
        if isinstance(text, (int, float)) and not isinstance(text, bool):
            if text == 0:
                return ZERO
            if math.isinf(text) and text > 0:
                return INFINITE
            return cls.finite(text)
        token = str(text).strip().lower()
        if token in ("inf", "infinity", "+inf"):
            return INFINITE
        if token in ("zero",):
            return ZERO
        try:
            value = float(token)
        except ValueError:
            raise ValueError(f"invalid temperature {text!r}: expected 'inf', '0' or a positive number") from None
        if value == 0:
            return ZERO
        if math.isinf(value) and value > 0:
            return INFINITE
        return cls.finite(value)

    def sort_key(self) -> tuple[int, float]:
        order = {TemperatureKind.ZERO: 0, TemperatureKind.FINITE: 1, TemperatureKind.INFINITE: 2}
        return order[self.kind], self.value or 0.0

    def __str__(self) -> str:
        if self.kind is TemperatureKind.ZERO:
            return "0"
        if self.kind is TemperatureKind.INFINITE:
            return "inf"
        return f"{self.value:g}"


ZERO = Temperature(TemperatureKind.ZERO)
INFINITE = Temperature(TemperatureKind.INFINITE)


@dataclass(frozen=True)
class StrategyParams:
    alpha: float = 0.0
    temperature: Temperature = INFINITE
    mode: Mode = Mode.PROBABILISTIC

    def __post_init__(self):
        if not math.isfinite(self.alpha) or self.alpha < 0:
            raise ValueError(f"alpha must be finite and non-negative, got {self.alpha!r}")
        if not isinstance(self.temperature, Temperature):
            raise TypeError("temperature must be a Temperature")
        if not isinstance(self.mode, Mode):
            raise TypeError("mode must be a Mode")

    @property
    def history_free(self) -> bool:
        """True when the weights do not depend on last evening's crowd."""
        return self.temperature.kind is TemperatureKind.INFINITE


# Named limits.
RANDOM_CHOICE = StrategyParams(alpha=0.0, temperature=INFINITE)
STRICT_RANK = StrategyParams(alpha=1.0, temperature=INFINITE)
AVOID_CROWD = StrategyParams(alpha=0.0, temperature=ZERO)
DICTATED = StrategyParams(mode=Mode.DICTATED)


@dataclass(frozen=True)
class WeightVector:
    """Unnormalized choice weights, index ``i`` holding rank ``i + 1``."""

    weights: np.ndarray
    total: float

    def __post_init__(self):
        w = self.weights
        if w.ndim != 1 or w.size == 0:
            raise ValueError("weight vector must be one-dimensional and non-empty")
        if not np.all(np.isfinite(w)) or np.any(w < 0):
            raise ValueError("weights must be finite and non-negative")
        if not self.total > 0:
            raise ValueError("total weight must be positive")

    @classmethod
    def from_array(cls, weights) -> "WeightVector":
        w = np.array(weights, dtype=np.float64)
        w.setflags(write=False)
        return cls(w, float(w.sum()) if w.size else 0.0)

    def __len__(self) -> int:
        return self.weights.size

    def probabilities(self) -> np.ndarray:
        return self.weights / self.total


@functools.lru_cache(maxsize=32)
def _rank_log_weights(n: int, alpha: float) -> np.ndarray:
    out = alpha * np.log(np.arange(1, n + 1, dtype=np.float64))
    out.setflags(write=False)
    return out


@functools.lru_cache(maxsize=32)
def _rank_weights(n: int, alpha: float) -> np.ndarray:
    if alpha == 0:
        out = np.ones(n)
    else:
        out = np.arange(1, n + 1, dtype=np.float64) ** alpha
    out.setflags(write=False)
    return out


def compute_weights(params: StrategyParams, prev, n_restaurants: Optional[int] = None) -> WeightVector:
    """Weights ``k**alpha * exp(-n_k/T)`` for every rank, from last evening's crowd.

    ``prev`` is an ``OccupancyState`` or a plain array of counts.  Under
    ``T = 0`` a restaurant that was visited gets weight 0; if every one was
    visited the rank weights are used unchanged.  Finite ``T`` is evaluated
    in log space with the largest exponent subtracted, so the result is
    scaled by a common positive factor.
    """
    if params.mode is not Mode.PROBABILISTIC:
        raise ValueError("dictated rotation has no choice weights")
    counts = np.asarray(getattr(prev, "counts", prev))
    if counts.ndim != 1 or counts.size == 0:
        raise ValueError("restaurant set is empty")
    if n_restaurants is not None and counts.size != n_restaurants:
        raise ValueError(f"occupancy has {counts.size} restaurants, expected {n_restaurants}")
    n = counts.size
    kind = params.temperature.kind

    if kind is TemperatureKind.INFINITE:
        w = _rank_weights(n, params.alpha)
    elif kind is TemperatureKind.ZERO:
        vacant = counts == 0
        w = _rank_weights(n, params.alpha)
        if vacant.any():
            w = np.where(vacant, w, 0.0)
    else:
        exponent = _rank_log_weights(n, params.alpha) - counts / params.temperature.value
        w = np.exp(exponent - exponent.max())

    if not np.all(np.isfinite(w)):
        raise FloatingPointError("non-finite weight; parameters overflow")
    if w.flags.writeable:
        w.setflags(write=False)
    return WeightVector(w, float(w.sum()))


def choice_probabilities(params: StrategyParams, prev) -> np.ndarray:
    return compute_weights(params, prev).probabilities()
