"""Monte Carlo simulator and closed-form estimates for the Kolkata Paise Restaurant game."""

from .analytics import (
    AnalyticPrediction,
    avoid_crowd_fixed_point,
    poisson_pmf,
    poisson_utilization,
    rank_pair_expectation,
    rank_utilization_estimate,
)
from .engine import OccupancyState, SimulationConfig, UtilizationSeries, occupancy_census, run, step
from .sampler import CumulativeSampler, RngStream, build_sampler, draw, draw_naive
from .stats import Histogram, SummaryStats, gaussian_check, histogram, summary
from .strategy import (
    AVOID_CROWD,
    DICTATED,
    INFINITE,
    RANDOM_CHOICE,
    STRICT_RANK,
    ZERO,
    Mode,
    StrategyParams,
    Temperature,
    WeightVector,
    compute_weights,
)

__version__ = "0.1.0"
