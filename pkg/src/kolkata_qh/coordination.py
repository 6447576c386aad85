"""From a measured momentum assignment to restaurant and gate choices."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import DomainError, IntegrityError
from .qhall import measurement_distribution, sample_measurements
from .sim_core import derive_substream, make_rng

FAIRNESS_CHUNK = 4096


@dataclass(frozen=True)
class RestaurantAssignment:
    agent_to_restaurant: tuple[int, ...]

    @property
    def occupancy(self) -> float:
        """Fraction of restaurants that received at least one agent."""
        n = len(self.agent_to_restaurant)
        return len(set(self.agent_to_restaurant)) / n


@dataclass(frozen=True)
class GateAssignment:
    agent_to_gate: tuple[int, ...]
    gates: int

    def arrivals(self) -> np.ndarray:
        return np.bincount(np.asarray(self.agent_to_gate, dtype=np.int64), minlength=self.gates)

    def harmed(self, capacity: int) -> int:
        return int(np.maximum(self.arrivals() - capacity, 0).sum())


def _check_outcome(outcome: Sequence[int]) -> tuple[int, ...]:
    momenta = tuple(int(v) for v in outcome)
    n = len(momenta)
    if n == 0 or sorted(momenta) != list(range(n)):
        raise IntegrityError(f"outcome is not a permutation of 0..{n - 1}: {momenta[:20]}")
    return momenta


def assign_restaurants(outcome: Sequence[int]) -> RestaurantAssignment:
    """Agent ``i`` goes to the restaurant labelled with its momentum."""
    return RestaurantAssignment(agent_to_restaurant=_check_outcome(outcome))


def gate_for_agent(momentum: int, k: int) -> int:
    if k < 1:
        raise DomainError(f"need at least one gate, got {k}")
    return momentum % k


def assign_gates(outcome: Sequence[int], k: int) -> GateAssignment:
    """Gate = momentum mod k; each gate then receives exactly len/k agents."""
    momenta = _check_outcome(outcome)
    if k < 1 or len(momenta) % k:
        raise DomainError(f"{len(momenta)} agents cannot be split evenly over {k} gates")
    return GateAssignment(agent_to_gate=tuple(gate_for_agent(m, k) for m in momenta), gates=k)


def fairness_report(n: int, samples: int, seed: int) -> np.ndarray:
    """Empirical (agent x restaurant) visit frequencies.

    Samples are drawn in fixed-size chunks, chunk ``c`` from substream
    ``c`` of ``seed``, so the matrix is independent of any scheduling.
    """
    if n < 2 or samples < 1:
        raise DomainError(f"need n >= 2 and samples >= 1, got ({n}, {samples})")
    counts = np.zeros((n, n), dtype=np.int64)
    agents = np.arange(n)
    done = 0
    chunk = 0
    while done < samples:
        size = min(FAIRNESS_CHUNK, samples - done)
        rng = make_rng(derive_substream(seed, chunk))
        outcomes = sample_measurements(n, size, rng)
        # assignment is the identity on momenta, so the outcome row is the
        # restaurant row
        np.add.at(counts, (np.broadcast_to(agents, outcomes.shape), outcomes), 1)
        done += size
        chunk += 1
    return counts / samples


def exact_fairness(n: int) -> np.ndarray:
    """Agent x restaurant probabilities by enumerating the measurement law."""
    probs = np.zeros((n, n))
    for outcome, p in measurement_distribution(n).items():
        for agent, restaurant in enumerate(assign_restaurants(outcome).agent_to_restaurant):
            probs[agent, restaurant] += float(p)
    return probs
