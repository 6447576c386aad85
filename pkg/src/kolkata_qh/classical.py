"""Classical baselines for the restaurant (KRP) and stadium (KSP) games.

Analytic pieces are the Poisson single-day fill, the day-to-day learning
recurrence and its continuum solution, the binomial gate probability, and
the large-N estimates for the all-happy outcomes. The Monte Carlo side
plays the games literally with independent uniform choices.

Two learning curves are kept apart on purpose. ``krp_recurrence`` is the
published update ``F + f (1 - F)^2``; ``krp_meanfield`` is the expected
update of the literal dynamics, where every unsuccessful agent re-picks
among all N restaurants, ``G + (1 - G)(1 - exp(-(1 - G)))``. They agree on
day one only, and the simulator tracks the latter.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import DomainError
from .sim_core import SummaryStats, binom_cdf, log_gamma, make_rng, run_trials, summarize

E = math.e


@dataclass(frozen=True)
class KrpConfig:
    n: int
    days: int = 10
    trials: int = 100
    seed: int = 0

    def __post_init__(self) -> None:
        if self.n < 1 or self.days < 1 or self.trials < 1:
            raise DomainError(f"invalid KrpConfig {self}")


@dataclass(frozen=True)
class KspConfig:
    agents_per_gate: int
    gates: int
    alpha: float = 1.0
    trials: int = 10_000
    seed: int = 0

    def __post_init__(self) -> None:
        if self.agents_per_gate < 1 or self.gates < 1 or self.trials < 1:
            raise DomainError(f"invalid KspConfig {self}")
        if not self.alpha >= 1.0:
            raise DomainError(f"alpha must be >= 1, got {self.alpha}")

    @property
    def total_agents(self) -> int:
        return self.agents_per_gate * self.gates

    @property
    def capacity(self) -> int:
        return gate_capacity(self.agents_per_gate, self.alpha)


@dataclass(frozen=True)
class TrajectoryRow:
    day: int
    f_recurrence: float
    f_continuum: float
    f_meanfield: float
    f_montecarlo: Optional[float] = None
    montecarlo_stderr: Optional[float] = None


@dataclass(frozen=True)
class GateOutcome:
    arrivals: tuple[int, ...]
    safe: int
    harmed: int


@dataclass(frozen=True)
class KspSummary:
    """Aggregates over KSP trials.

    ``gate_ok`` is the per-gate indicator ``arrivals <= capacity`` averaged
    over all gates of all trials; it estimates the single-gate probability
    returned by ``ksp_cumulative_prob``.
    """

    config: KspConfig
    harmed: SummaryStats
    gate_ok: SummaryStats
    all_safe: SummaryStats
    arrivals_min: int
    arrivals_max: int


@dataclass(frozen=True)
class BestOutcome:
    exact: float
    exp_minus_n: float
    stirling: float


def gate_capacity(agents_per_gate: int, alpha: float) -> int:
    """floor(alpha * N), robust to binary round-off such as 1.1 * 100."""
    raw = alpha * agents_per_gate
    nearest = round(raw)
    if abs(raw - nearest) <= 1e-9 * max(1.0, abs(raw)):
        return int(nearest)
    return math.floor(raw)


# ---------------------------------------------------------------------------
# restaurant problem, analytic
# ---------------------------------------------------------------------------


def krp_choice_prob(m: int) -> float:
    """Poisson(1) probability that a restaurant is picked by ``m`` agents."""
    if m < 0:
        raise DomainError(f"m must be >= 0, got {m}")
    return math.exp(-1.0 - log_gamma(m + 1.0))


def krp_single_day_fill() -> float:
    return 1.0 - math.exp(-1.0)


def krp_recurrence(days: int) -> list[float]:
    if days < 1:
        raise DomainError(f"days must be >= 1, got {days}")
    f = krp_single_day_fill()
    out = [f]
    for _ in range(days - 1):
        prev = out[-1]
        out.append(prev + f * (1.0 - prev) ** 2)
    return out


def krp_continuum(n: float) -> float:
    if not n >= 1:
        raise DomainError(f"continuum solution defined for n >= 1, got {n}")
    return 1.0 - E / (E * E + (n - 1.0) * (E - 1.0))


def krp_meanfield(days: int) -> list[float]:
    if days < 1:
        raise DomainError(f"days must be >= 1, got {days}")
    out = [krp_single_day_fill()]
    for _ in range(days - 1):
        free = 1.0 - out[-1]
        out.append(out[-1] + free * -math.expm1(-free))
    return out


# ---------------------------------------------------------------------------
# restaurant problem, Monte Carlo
# ---------------------------------------------------------------------------


def _serve(choices: np.ndarray, agents: np.ndarray, rng: np.random.Generator):
    """Resolve one round. Returns (restaurants served, winning agent ids).

    Arrivals at a restaurant are shuffled and the first one is served, so
    each arrival wins with equal probability.
    """
    order = rng.permutation(choices.size)
    restaurants, first = np.unique(choices[order], return_index=True)
    return restaurants, agents[order][first]


def _one_day(n: int, rng: np.random.Generator) -> float:
    choices = rng.integers(0, n, size=n)
    restaurants, _ = _serve(choices, np.arange(n), rng)
    return restaurants.size / n


def krp_simulate_day(n: int, seed: int) -> float:
    """Fraction of ``n`` restaurants visited when ``n`` agents pick at random."""
    if n < 1:
        raise DomainError(f"n must be >= 1, got {n}")
    return _one_day(n, make_rng(seed))


def _learning_trial(n: int, days: int, rng: np.random.Generator) -> np.ndarray:
    taken = np.zeros(n, dtype=bool)
    seated = np.zeros(n, dtype=bool)
    fills = np.empty(days)
    for d in range(days):
        free_agents = np.flatnonzero(~seated)
        if free_agents.size:
            # losers re-pick among all n restaurants, occupied ones included
            choices = rng.integers(0, n, size=free_agents.size)
            restaurants, winners = _serve(choices, free_agents, rng)
            empty = ~taken[restaurants]
            taken[restaurants[empty]] = True
            seated[winners[empty]] = True
        fills[d] = np.count_nonzero(taken) / n
    return fills


def krp_simulate_learning(cfg: KrpConfig, threads: int = 1) -> list[TrajectoryRow]:
    """Multi-day restaurant game where winners keep their table.

    Returns one row per day carrying the Monte Carlo mean occupancy over
    ``cfg.trials`` alongside the three analytic curves.
    """
    per_trial = run_trials(
        lambda _i, rng: _learning_trial(cfg.n, cfg.days, rng),
        cfg.seed,
        cfg.trials,
        threads,
    )
    fills = np.vstack(per_trial)
    rec = krp_recurrence(cfg.days)
    mf = krp_meanfield(cfg.days)
    rows = []
    for d in range(cfg.days):
        stats = summarize(fills[:, d])
        rows.append(
            TrajectoryRow(
                day=d + 1,
                f_recurrence=rec[d],
                f_continuum=krp_continuum(d + 1),
                f_meanfield=mf[d],
                f_montecarlo=stats.mean,
                montecarlo_stderr=stats.std_error,
            )
        )
    return rows


# ---------------------------------------------------------------------------
# stadium problem
# ---------------------------------------------------------------------------


def ksp_cumulative_prob(n: int, k: int, alpha: float) -> float:
    """P(1 <= arrivals at a given gate <= floor(alpha N)) with NK agents."""
    if n < 1 or k < 1:
        raise DomainError(f"n and k must be >= 1, got ({n}, {k})")
    if not alpha >= 1.0:
        raise DomainError(f"alpha must be >= 1, got {alpha}")
    total = n * k
    cap = min(gate_capacity(n, alpha), total)
    return binom_cdf(total, 1.0 / k, 1, cap)


def gate_outcome(arrivals: np.ndarray, capacity: int) -> GateOutcome:
    arr = tuple(int(a) for a in arrivals)
    safe = sum(min(a, capacity) for a in arr)
    return GateOutcome(arrivals=arr, safe=safe, harmed=sum(arr) - safe)


def ksp_trial(cfg: KspConfig, rng: np.random.Generator) -> GateOutcome:
    choices = rng.integers(0, cfg.gates, size=cfg.total_agents)
    arrivals = np.bincount(choices, minlength=cfg.gates)
    return gate_outcome(arrivals, cfg.capacity)


def ksp_simulate(cfg: KspConfig, threads: int = 1) -> KspSummary:
    outcomes = run_trials(lambda _i, rng: ksp_trial(cfg, rng), cfg.seed, cfg.trials, threads)
    cap = cfg.capacity
    arrivals = np.array([o.arrivals for o in outcomes])
    ok = arrivals <= cap
    return KspSummary(
        config=cfg,
        harmed=summarize(o.harmed for o in outcomes),
        # per-trial mean of the gate indicator; equal weights, so the mean of
        # these is the mean over every gate sample
        gate_ok=summarize(ok.mean(axis=1)),
        all_safe=summarize(ok.all(axis=1).astype(float)),
        arrivals_min=int(arrivals.min()),
        arrivals_max=int(arrivals.max()),
    )


# ---------------------------------------------------------------------------
# asymptotics of the perfect outcomes
# ---------------------------------------------------------------------------

ALL_SAFE_MAX_AGENTS = 10_000


def all_safe_exact(n: int, k: int) -> float:
    """Probability that each of K gates receives exactly N of NK agents."""
    if n < 1 or k < 1:
        raise DomainError(f"n and k must be >= 1, got ({n}, {k})")
    if n * k > ALL_SAFE_MAX_AGENTS:
        raise DomainError(f"n*k = {n * k} exceeds the guard {ALL_SAFE_MAX_AGENTS}")
    log_p = log_gamma(n * k + 1.0) - k * log_gamma(n + 1.0) - n * k * math.log(k)
    return math.exp(log_p)


def all_safe_asymptotic(n: int, k: int) -> float:
    if n < 1 or k < 1:
        raise DomainError(f"n and k must be >= 1, got ({n}, {k})")
    return math.exp(0.5 * (math.log(k) - (k - 1) * math.log(2.0 * math.pi * n)))


def best_outcome_prob(n: int) -> BestOutcome:
    """N!/N^N, with e^-N and the Stirling form e^-N sqrt(2 pi N) for comparison."""
    if n < 1:
        raise DomainError(f"n must be >= 1, got {n}")
    exact = math.exp(log_gamma(n + 1.0) - n * math.log(n))
    return BestOutcome(
        exact=exact,
        exp_minus_n=math.exp(-n),
        stirling=math.exp(-n) * math.sqrt(2.0 * math.pi * n),
    )
