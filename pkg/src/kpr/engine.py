"""The repeated restaurant game.

Each evening all ``M`` agents choose a restaurant independently from the
same distribution, computed from the previous evening's crowd sizes.  A
restaurant serves one customer, so the evening's utilization is the
fraction of restaurants with at least one arrival.  Which of several
arrivals is served never affects that fraction, so no serving lottery is
simulated and agents are kept as anonymous counts.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .sampler import RngStream, build_sampler, tally_draws
from .stats import Histogram
from .strategy import Mode, StrategyParams, compute_weights

DEFAULT_BURN_IN = 1000


@dataclass(frozen=True)
class SimulationConfig:
    restaurants: int
    agents: Optional[int] = None
    params: StrategyParams = field(default_factory=StrategyParams)
    evenings: int = 101_000
    burn_in: int = DEFAULT_BURN_IN
    seed: int = 0

    def __post_init__(self):
        if self.agents is None:
            object.__setattr__(self, "agents", self.restaurants)
        for name in ("restaurants", "agents", "evenings", "burn_in", "seed"):
            value = getattr(self, name)
            if isinstance(value, bool) or not isinstance(value, (int, np.integer)):
                raise TypeError(f"{name} must be an integer, got {value!r}")
        if self.restaurants < 1:
            raise ValueError("need at least one restaurant")
        if self.agents < 1:
            raise ValueError("need at least one agent")
        if self.evenings < 1:
            raise ValueError("need at least one evening")
        if not 0 <= self.burn_in < self.evenings:
            raise ValueError(f"burn_in must satisfy 0 <= burn_in < evenings ({self.burn_in} vs {self.evenings})")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be an unsigned 64-bit integer")

    @property
    def density(self) -> float:
        """Agents per restaurant (the Poisson parameter lambda)."""
        return self.agents / self.restaurants

    @property
    def recorded(self) -> int:
        return self.evenings - self.burn_in

    def as_dict(self) -> dict:
        return {
            "n": self.restaurants,
            "agents": self.agents,
            "alpha": self.params.alpha,
            "temperature": str(self.params.temperature),
            "mode": self.params.mode.value,
            "evenings": self.evenings,
            "burn_in": self.burn_in,
            "seed": self.seed,
        }

    def digest(self) -> str:
        blob = json.dumps(self.as_dict(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode()).hexdigest()[:16]


@dataclass(frozen=True)
class OccupancyState:
    counts: np.ndarray
    evening: int = 0

    @classmethod
    def empty(cls, n_restaurants: int) -> "OccupancyState":
        return cls(np.zeros(n_restaurants, dtype=np.int64), 0)

    @property
    def occupied(self) -> int:
        return int(np.count_nonzero(self.counts))


@dataclass(frozen=True)
class UtilizationSeries:
    values: np.ndarray
    n_restaurants: int
    config_digest: str = ""

    def __len__(self) -> int:
        return self.values.size

    def mean(self) -> float:
        return float(self.values.mean())


def dictated_ranks(evening: int, n_restaurants: int, n_agents: int) -> np.ndarray:
    """Ranks of agents ``1..M`` on ``evening`` under the dictated rotation."""
    agents = np.arange(1, n_agents + 1, dtype=np.int64)
    return (agents + evening - 1) % n_restaurants + 1


class _Stepper:
    """Advances the game one evening at a time for a fixed config.

    Under ``T = inf`` the weights never change, so the sampler is built once.
    """

    def __init__(self, cfg: SimulationConfig):
        self.cfg = cfg
        self._fixed_sampler = None
        params = cfg.params
        if params.mode is Mode.PROBABILISTIC and params.history_free:
            self._fixed_sampler = build_sampler(
                compute_weights(params, np.zeros(cfg.restaurants, dtype=np.int64))
            )

    def __call__(self, prev: OccupancyState, rng: Optional[RngStream]) -> tuple[OccupancyState, float]:
        cfg = self.cfg
        n = cfg.restaurants
        if prev.counts.shape != (n,):
            raise ValueError(f"occupancy has shape {prev.counts.shape}, expected ({n},)")
        t = prev.evening + 1
        if cfg.params.mode is Mode.DICTATED:
            counts = np.bincount(dictated_ranks(t, n, cfg.agents) - 1, minlength=n)
        else:
            sampler = self._fixed_sampler
            if sampler is None:
                sampler = build_sampler(compute_weights(cfg.params, prev.counts, n))
            counts = tally_draws(sampler, rng, cfg.agents)
        return OccupancyState(counts, t), np.count_nonzero(counts) / n


def step(prev: OccupancyState, cfg: SimulationConfig, rng: Optional[RngStream]) -> tuple[OccupancyState, float]:
    """Play one evening: returns the new occupancy and its utilization ``f``."""
    return _Stepper(cfg)(prev, rng)


def _play(cfg: SimulationConfig, census: bool = False):
    stepper = _Stepper(cfg)
    rng = RngStream(cfg.seed)
    state = OccupancyState.empty(cfg.restaurants)
    values = np.empty(cfg.recorded, dtype=np.float64)
    tally = np.zeros(cfg.agents + 1, dtype=np.int64) if census else None
    for t in range(1, cfg.evenings + 1):
        state, f = stepper(state, rng)
        if t > cfg.burn_in:
            values[t - cfg.burn_in - 1] = f
            if census:
                tally += np.bincount(state.counts, minlength=cfg.agents + 1)
    return UtilizationSeries(values, cfg.restaurants, cfg.digest()), tally


def run(cfg: SimulationConfig) -> UtilizationSeries:
    """Simulate ``cfg.evenings`` evenings from empty restaurants; keep post burn-in ``f``."""
    return _play(cfg)[0]


def occupancy_census(cfg: SimulationConfig):
    """Pooled distribution of arrivals per restaurant per evening, after burn-in.

    Returns a unit-width :class:`Histogram` over ``m = 0, 1, ...``
    up to the largest crowd observed.
    """
    tally = _play(cfg, census=True)[1]
    observed = np.flatnonzero(tally)
    tally = tally[: observed[-1] + 1]
    n_cells = int(tally.sum())
    edges = np.arange(tally.size + 1) - 0.5
    return Histogram(edges, tally / n_cells, n_cells)
