"""Seeded randomness, log-space special functions and summary statistics.

Random streams
--------------
Every stochastic routine takes a 64-bit integer seed. A run has one master
seed; trial ``i`` draws from ``derive_substream(master, i)``, which is a
pure function of the pair, so the schedule of trials over threads cannot
change any drawn value. A substream seed keys numpy's ``Philox4x64-10``
counter-based bit generator directly (no ``SeedSequence`` hashing), whose
output is specified bit-for-bit and is the same on every platform.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence, TypeVar

import numpy as np
from scipy.special import gammaln

from .errors import DomainError

T = TypeVar("T")

MASK64 = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15


def _splitmix64_mix(z: int) -> int:
    # Stafford variant 13 finalizer; a bijection on 64-bit words.
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9 & MASK64
    z = (z ^ (z >> 27)) * 0x94D049BB133111EB & MASK64
    return z ^ (z >> 31)


def derive_substream(master: int, trial_index: int) -> int:
    """Seed for trial ``trial_index`` of a run keyed by ``master``.

    The map is injective in ``trial_index`` for a fixed master (an odd
    multiplier followed by a bijective mixer), and pure.
    """
    if trial_index < 0:
        raise DomainError(f"trial_index must be non-negative, got {trial_index}")
    state = (int(master) + _GOLDEN * (int(trial_index) + 1)) & MASK64
    return _splitmix64_mix(state)


def make_rng(seed: int) -> np.random.Generator:
    """Philox4x64-10 generator keyed by a 64-bit seed."""
    return np.random.Generator(np.random.Philox(key=int(seed) & MASK64))


def run_trials(
    fn: Callable[[int, np.random.Generator], T],
    master: int,
    n_trials: int,
    threads: int = 1,
) -> list[T]:
    """Evaluate ``fn(i, rng_i)`` for every trial, results in trial order.

    ``rng_i`` is built from ``derive_substream(master, i)``, so the returned
    list does not depend on ``threads``.
    """

    def one(i: int) -> T:
        return fn(i, make_rng(derive_substream(master, i)))

    if threads <= 1 or n_trials <= 1:
        return [one(i) for i in range(n_trials)]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(one, range(n_trials)))


# ---------------------------------------------------------------------------
# special functions
# ---------------------------------------------------------------------------


def log_gamma(x: float) -> float:
    """Natural log of the gamma function for ``x > 0``."""
    if not (x > 0) or math.isinf(x):
        raise DomainError(f"log_gamma requires finite x > 0, got {x!r}")
    return math.lgamma(x)


def _log_binom_pmf(n: int, p: float, m: np.ndarray) -> np.ndarray:
    log_coef = gammaln(n + 1.0) - gammaln(m + 1.0) - gammaln(n - m + 1.0)
    return log_coef + m * math.log(p) + (n - m) * math.log1p(-p)


def binom_cdf(n: int, p: float, m_lo: int, m_hi: int) -> float:
    """Binomial probability mass summed over ``m_lo <= m <= m_hi``.

    Terms are formed as log-pmf values and combined with a max shift, so no
    factorial is ever materialised.
    """
    if n < 0 or not (0 <= m_lo <= m_hi <= n):
        raise DomainError(f"need 0 <= m_lo <= m_hi <= n, got ({m_lo}, {m_hi}, {n})")
    if not (0.0 <= p <= 1.0):
        raise DomainError(f"p must lie in [0, 1], got {p!r}")
    if p == 0.0:
        return 1.0 if m_lo == 0 else 0.0
    if p == 1.0:
        return 1.0 if m_hi == n else 0.0
    m = np.arange(m_lo, m_hi + 1, dtype=np.float64)
    logs = _log_binom_pmf(n, p, m)
    shift = float(np.max(logs))
    total = math.exp(shift) * float(np.sum(np.exp(logs - shift)))
    return min(total, 1.0)


def _gamma_series(a: float, x: float) -> float:
    # lower regularized P(a, x), valid for x < a + 1
    term = 1.0 / a
    total = term
    ap = a
    for _ in range(10_000):
        ap += 1.0
        term *= x / ap
        total += term
        if abs(term) < abs(total) * 1e-16:
            break
    return total * math.exp(-x + a * math.log(x) - math.lgamma(a))


def _gamma_contfrac(a: float, x: float) -> float:
    # upper regularized Q(a, x) by modified Lentz, valid for x >= a + 1
    tiny = 1e-300
    b = x + 1.0 - a
    c = 1.0 / tiny
    d = 1.0 / b
    h = d
    for i in range(1, 10_000):
        an = -i * (i - a)
        b += 2.0
        d = an * d + b
        if abs(d) < tiny:
            d = tiny
        c = b + an / c
        if abs(c) < tiny:
            c = tiny
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < 1e-16:
            break
    return math.exp(-x + a * math.log(x) - math.lgamma(a)) * h


def gamma_q(a: float, x: float) -> float:
    """Regularized upper incomplete gamma ``Q(a, x)``."""
    if a <= 0 or x < 0:
        raise DomainError(f"gamma_q requires a > 0, x >= 0, got ({a}, {x})")
    if x == 0:
        return 1.0
    if x < a + 1.0:
        return max(0.0, 1.0 - _gamma_series(a, x))
    return min(1.0, _gamma_contfrac(a, x))


# ---------------------------------------------------------------------------
# statistics
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SummaryStats:
    n_samples: int
    mean: float
    std_error: float
    min: float
    max: float


@dataclass(frozen=True)
class ChiSquareResult:
    statistic: float
    dof: int
    p_value: float


def summarize(values: Iterable[float]) -> SummaryStats:
    """Mean, standard error, and range, summed with ``math.fsum``."""
    xs = [float(v) for v in values]
    n = len(xs)
    if n == 0:
        raise DomainError("summarize needs at least one sample")
    lo, hi = min(xs), max(xs)
    mean = min(max(math.fsum(xs) / n, lo), hi)
    if n > 1:
        var = math.fsum((x - mean) ** 2 for x in xs) / (n - 1)
        se = math.sqrt(var / n)
    else:
        se = 0.0
    return SummaryStats(n_samples=n, mean=mean, std_error=se, min=lo, max=hi)


def chi_square_uniform(counts: Sequence[int]) -> ChiSquareResult:
    """Pearson goodness-of-fit of ``counts`` against equal cell probabilities."""
    obs = [int(c) for c in counts]
    if len(obs) < 2:
        raise DomainError("chi_square_uniform needs at least two cells")
    if any(c < 0 for c in obs):
        raise DomainError("counts must be non-negative")
    total = sum(obs)
    if total < 1:
        raise DomainError("chi_square_uniform needs a positive total count")
    k = len(obs)
    # exact integer numerator: sum (k*c - total)^2 / (k * total)
    num = sum((k * c - total) ** 2 for c in obs)
    stat = num / (k * total)
    dof = k - 1
    return ChiSquareResult(statistic=stat, dof=dof, p_value=gamma_q(dof / 2.0, stat / 2.0))
