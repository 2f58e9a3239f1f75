"""Closed-form utilization estimates for the three limits.

These are independent of the simulator and serve as its reference values:

* random choice: crowds are Poisson(lambda), utilization ``1 - e**-lambda``;
* strict rank: the pairing estimate ``f0 * f1``, where ranks ``k`` and
  ``N+1-k`` are paired, ``f0`` is the fraction of pairs visited and ``f1``
  the expected occupancy inside a visited pair.  This treats the two
  factors as independent and is an approximation of the real dynamics;
* avoid crowd: the root of ``(1-f)(1 - exp(-1/(1-f))) = f``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Callable


class Source(enum.Enum):
    POISSON_UTILIZATION = "PoissonUtilization"
    POISSON_PMF = "PoissonPmf"
    RANK_PAIRING = "RankPairing"
    AVOID_CROWD_FIXED_POINT = "AvoidCrowdFixedPoint"


@dataclass(frozen=True)
class AnalyticPrediction:
    value: float
    source: Source
    inputs: dict = field(default_factory=dict)
    terms: dict = field(default_factory=dict)

    def __post_init__(self):
        if not 0.0 <= self.value <= 1.0:
            raise ValueError(f"prediction {self.value} outside [0, 1]")

    def as_dict(self) -> dict:
        out = {"value": self.value, "source": self.source.value, "inputs": dict(self.inputs)}
        if self.terms:
            out["terms"] = dict(self.terms)
        return out


def _check_lambda(lam: float) -> float:
    lam = float(lam)
    if not math.isfinite(lam):
        raise ValueError("lambda must be finite")
    if lam < 0:
        raise ValueError(f"lambda must be non-negative, got {lam}")
    return lam


def poisson_pmf(lam: float, m: int) -> float:
    """``lam**m e**-lam / m!`` for crowd size ``m``."""
    lam = _check_lambda(lam)
    if m < 0 or int(m) != m:
        raise ValueError(f"m must be a non-negative integer, got {m}")
    m = int(m)
    if lam == 0:
        return 1.0 if m == 0 else 0.0
    if m <= 20:
        return lam**m * math.exp(-lam) / math.factorial(m)
    return math.exp(m * math.log(lam) - lam - math.lgamma(m + 1))


def poisson_utilization(lam: float) -> float:
    """Mean fraction of restaurants visited when crowds are Poisson(lam)."""
    return 1.0 - poisson_pmf(lam, 0)


def rank_pair_expectation(n: int, k: int) -> float:
    """Expected occupied restaurants in the pair (k, N+1-k) visited by two agents."""
    if n < 2 or n % 2:
        raise ValueError(f"N must be a positive even integer, got {n}")
    if not 1 <= k <= n // 2:
        raise ValueError(f"k must lie in 1..{n // 2}, got {k}")
    j = n + 1 - k
    return (k * k + j * j + 4 * k * j) / (n + 1) ** 2


@dataclass(frozen=True)
class RankEstimate:
    f0: float
    f1: float
    f_bar: float


def rank_utilization_estimate(n: int) -> RankEstimate:
    if n < 2 or n % 2:
        raise ValueError(f"N must be a positive even integer, got {n}")
    f0 = poisson_utilization(2.0)
    f1 = math.fsum(rank_pair_expectation(n, k) for k in range(1, n // 2 + 1)) / n
    return RankEstimate(f0, f1, f0 * f1)


def avoid_crowd_residual(f: float) -> float:
    """``g(f) = (1-f)(1 - exp(-1/(1-f))) - f``; strictly decreasing on [0, 1)."""
    v = 1.0 - f
    return -v * math.expm1(-1.0 / v) - f


@dataclass(frozen=True)
class BisectionResult:
    root: float
    residual: float
    iterations: int
    brackets: tuple


def bisect_decreasing(
    g: Callable[[float], float], lo: float, hi: float, tolerance: float, max_iterations: int = 200
) -> BisectionResult:
    """Root of a decreasing ``g`` on ``[lo, hi]`` by bisection, stopping at ``|g| < tolerance``.

    Every iterate's bracket is recorded so that callers can check it halves.
    """
    g_lo, g_hi = g(lo), g(hi)
    if not (g_lo > 0 > g_hi):
        raise ValueError(f"no sign change on [{lo}, {hi}]: g = {g_lo}, {g_hi}")
    brackets = [(lo, hi)]
    for i in range(1, max_iterations + 1):
        mid = 0.5 * (lo + hi)
        g_mid = g(mid)
        if abs(g_mid) < tolerance:
            return BisectionResult(mid, g_mid, i, tuple(brackets))
        if mid in (lo, hi):
            raise ArithmeticError(f"bracket collapsed before |g| < {tolerance}; tolerance below float resolution")
        if g_mid > 0:
            lo = mid
        else:
            hi = mid
        brackets.append((lo, hi))
    raise ArithmeticError(f"no convergence in {max_iterations} iterations")


FIXED_POINT_BRACKET = (0.0, 1.0 - 1e-15)


def _assert_decreasing(g: Callable[[float], float], lo: float, hi: float, samples: int = 4097) -> None:
    prev = g(lo)
    for i in range(1, samples):
        x = lo + (hi - lo) * i / (samples - 1)
        cur = g(x)
        if not cur < prev:
            raise ArithmeticError(f"residual not strictly decreasing near f = {x}")
        prev = cur


def solve_avoid_crowd(tolerance: float = 1e-12) -> BisectionResult:
    if not 0 < tolerance <= 1e-6:
        raise ValueError(f"tolerance must lie in (0, 1e-6], got {tolerance}")
    lo, hi = FIXED_POINT_BRACKET
    _assert_decreasing(avoid_crowd_residual, lo, hi)
    return bisect_decreasing(avoid_crowd_residual, lo, hi, tolerance)


def avoid_crowd_fixed_point(tolerance: float = 1e-12) -> float:
    """Self-consistent utilization when agents only pick last evening's vacant restaurants."""
    return solve_avoid_crowd(tolerance).root


# Prediction wrappers used by reports and the command line.

def predict_poisson_utilization(lam: float) -> AnalyticPrediction:
    return AnalyticPrediction(poisson_utilization(lam), Source.POISSON_UTILIZATION, {"lambda": float(lam)})


def predict_poisson_pmf(lam: float, m: int) -> AnalyticPrediction:
    return AnalyticPrediction(poisson_pmf(lam, m), Source.POISSON_PMF, {"lambda": float(lam), "m": int(m)})


def predict_rank(n: int) -> AnalyticPrediction:
    est = rank_utilization_estimate(n)
    return AnalyticPrediction(est.f_bar, Source.RANK_PAIRING, {"n": int(n)}, {"f0": est.f0, "f1": est.f1})


def predict_avoid_crowd(tolerance: float = 1e-12) -> AnalyticPrediction:
    res = solve_avoid_crowd(tolerance)
    return AnalyticPrediction(
        res.root,
        Source.AVOID_CROWD_FIXED_POINT,
        {"tolerance": tolerance},
        {"residual": res.residual, "iterations": res.iterations},
    )
