"""Distribution of evening utilization and its summary numbers.

Utilization takes only the values ``j/N``, so histograms use one bin per
attainable value, centred on it, rather than generic binning.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class Histogram:
    bin_edges: np.ndarray
    densities: np.ndarray
    n_samples: int

    @property
    def widths(self) -> np.ndarray:
        return np.diff(self.bin_edges)

    @property
    def centers(self) -> np.ndarray:
        return 0.5 * (self.bin_edges[:-1] + self.bin_edges[1:])

    @property
    def masses(self) -> np.ndarray:
        return self.densities * self.widths

    def total_mass(self) -> float:
        return float(self.masses.sum())

    def mean(self) -> float:
        return float((self.centers * self.masses).sum())

    def mode(self) -> float:
        """Centre of the highest bin; ties go to the lowest centre."""
        return float(self.centers[int(np.argmax(self.densities))])

    def __getitem__(self, value) -> float:
        """Probability mass of the bin containing ``value`` (0 outside the range)."""
        i = int(np.searchsorted(self.bin_edges, value, side="right")) - 1
        if 0 <= i < self.densities.size:
            return float(self.masses[i])
        return 0.0


@dataclass(frozen=True)
class SummaryStats:
    mean: float
    std: float
    mode: float
    skewness: float
    excess_kurtosis: float
    n: int


def _values(series) -> np.ndarray:
    return np.asarray(getattr(series, "values", series), dtype=np.float64)


def histogram(series, n_restaurants: int | None = None) -> Histogram:
    """Exact ``1/N`` lattice histogram of utilization values.

    Bins ``j = 0..N`` are centred on ``j/N`` with width ``1/N``; densities
    are normalized to unit total mass.
    """
    values = _values(series)
    if values.size == 0:
        raise ValueError("empty series")
    n = n_restaurants if n_restaurants is not None else getattr(series, "n_restaurants", None)
    if n is None or n < 1:
        raise ValueError("number of restaurants is required")
    slots = np.rint(values * n).astype(np.int64)
    if slots.min() < 0 or slots.max() > n:
        raise ValueError("utilization outside [0, 1]")
    counts = np.bincount(slots, minlength=n + 1)
    width = 1.0 / n
    edges = (np.arange(n + 2) - 0.5) * width
    return Histogram(edges, counts / (values.size * width), int(values.size))


def _moments(values: np.ndarray) -> tuple[float, float, float, float]:
    if values.min() == values.max():
        return float(values[0]), 0.0, 0.0, 0.0
    mean = float(values.mean())
    d = values - mean
    m2 = float(np.mean(d * d))
    m3 = float(np.mean(d**3))
    m4 = float(np.mean(d**4))
    std = math.sqrt(m2 * values.size / (values.size - 1))
    return mean, std, m3 / m2**1.5, m4 / m2**2 - 3.0


def summary(series, n_restaurants: int | None = None) -> SummaryStats:
    """Mean, sample std, histogram mode and moment-based shape.

    Skewness and excess kurtosis are the plain moment ratios ``g1`` and
    ``g2``; both are reported as 0 for a constant series.  Kurtosis is
    ``nan`` below four observations.
    """
    values = _values(series)
    if values.size < 2:
        raise ValueError("series too short: need at least 2 values")
    mean, std, skew, kurt = _moments(values)
    if values.size < 4:
        kurt = math.nan
    n = n_restaurants if n_restaurants is not None else getattr(series, "n_restaurants", None)
    mode = histogram(values, n).mode()
    return SummaryStats(mean, std, mode, skew, kurt, int(values.size))


@dataclass(frozen=True)
class GaussianReport:
    skewness: float
    excess_kurtosis: float
    max_cdf_gap: float


MIN_GAUSSIAN_SAMPLES = 1000


def _normal_cdf(x: np.ndarray) -> np.ndarray:
    return 0.5 * np.array([math.erfc(-v / math.sqrt(2.0)) for v in x.tolist()])


def gaussian_check(series) -> GaussianReport:
    values = _values(series)
    if values.size < MIN_GAUSSIAN_SAMPLES:
        raise ValueError(f"series too short: need at least {MIN_GAUSSIAN_SAMPLES} values")
    mean, std, skew, kurt = _moments(values)
    if std == 0:
        raise ValueError("series too short / zero variance")

    # Kolmogorov distance, evaluated at each distinct value from both sides
    uniq, counts = np.unique(values, return_counts=True)
    ecdf_hi = np.cumsum(counts) / values.size
    ecdf_lo = ecdf_hi - counts / values.size
    model = _normal_cdf((uniq - mean) / std)
    gap = float(max(np.abs(ecdf_hi - model).max(), np.abs(ecdf_lo - model).max()))
    return GaussianReport(skew, kurt, gap)
