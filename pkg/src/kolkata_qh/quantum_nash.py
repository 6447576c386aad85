"""Two diners, two restaurants, a shared entangled pair.

The diners share ``a|R1 R2> + b|R2 R1>`` (a, b real, ``a_sq + b_sq = 1``).
Diner ``i`` applies the identity with probability ``p_i`` and the flip
``sigma_x`` otherwise, on its own factor. Payoffs are the expectations of
diagonal payoff operators. The basis order is fixed throughout::

    0: |R1 R1>   1: |R1 R2>   2: |R2 R1>   3: |R2 R2>

with the first label belonging to diner 1.

Payoffs are computed two ways: ``payoff_trace`` builds the density matrix
and takes ``Tr(P rho)``; ``payoff_closed`` evaluates the known polynomial
in ``(p1, p2, a_sq)``. The two must agree.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import DomainError, IntegrityError

BASIS = ("R1R1", "R1R2", "R2R1", "R2R2")

_I2 = np.eye(2)
_SX = np.array([[0.0, 1.0], [1.0, 0.0]])
_OPS = {
    (0, 0): np.kron(_I2, _I2),
    (0, 1): np.kron(_I2, _SX),
    (1, 0): np.kron(_SX, _I2),
    (1, 1): np.kron(_SX, _SX),
}

NASH_TOL = 1e-9


@dataclass(frozen=True)
class TwoPlayerQuantumGame:
    u1: float
    u2: float
    a_sq: float

    def __post_init__(self) -> None:
        if not (self.u1 > 0 and self.u2 > 0):
            raise DomainError(f"utilities must be positive, got ({self.u1}, {self.u2})")
        if not 0.0 <= self.a_sq <= 1.0:
            raise DomainError(f"a_sq must lie in [0, 1], got {self.a_sq}")

    @property
    def b_sq(self) -> float:
        return 1.0 - self.a_sq


@dataclass(frozen=True)
class StrategyProfile:
    """Probabilities of applying the identity, one per diner.

    Construction does not clamp; out-of-range values (a mixed candidate
    can land there) are reported through ``in_domain``.
    """

    p1: float
    p2: float

    @property
    def in_domain(self) -> bool:
        return 0.0 <= self.p1 <= 1.0 and 0.0 <= self.p2 <= 1.0

    def require_domain(self) -> None:
        if not self.in_domain:
            raise DomainError(f"strategy probabilities must lie in [0, 1], got {self}")


@dataclass(frozen=True)
class PayoffPair:
    dollar1: float
    dollar2: float


# ---------------------------------------------------------------------------
# density-matrix route
# ---------------------------------------------------------------------------


def initial_density(game: TwoPlayerQuantumGame) -> np.ndarray:
    """``|psi><psi|``, populations set from ``a_sq`` directly (no sqrt round trip)."""
    rho = np.zeros((4, 4))
    rho[1, 1] = game.a_sq
    rho[2, 2] = game.b_sq
    rho[1, 2] = rho[2, 1] = math.sqrt(game.a_sq * game.b_sq)
    return rho


def final_density(rho: np.ndarray, prof: StrategyProfile) -> np.ndarray:
    """Mixture of the four local operations weighted by the diners' choices."""
    rho = np.asarray(rho)
    if rho.shape != (4, 4) or abs(np.trace(rho) - 1.0) > 1e-9:
        raise IntegrityError("input is not a unit-trace 4x4 density matrix")
    prof.require_domain()
    w = {
        (0, 0): prof.p1 * prof.p2,
        (0, 1): prof.p1 * (1.0 - prof.p2),
        (1, 0): (1.0 - prof.p1) * prof.p2,
        (1, 1): (1.0 - prof.p1) * (1.0 - prof.p2),
    }
    out = np.zeros((4, 4), dtype=rho.dtype)
    for key, op in _OPS.items():
        out += w[key] * (op @ rho @ op.conj().T)
    return out


def payoff_operators(u1: float, u2: float) -> tuple[np.ndarray, np.ndarray]:
    if not (u1 > 0 and u2 > 0):
        raise DomainError(f"utilities must be positive, got ({u1}, {u2})")
    p1 = np.diag([0.5 * u1, u1, u2, 0.5 * u2])
    p2 = np.diag([0.5 * u1, u2, u1, 0.5 * u2])
    return p1, p2


def payoff_trace(game: TwoPlayerQuantumGame, prof: StrategyProfile) -> PayoffPair:
    rho = final_density(initial_density(game), prof)
    op1, op2 = payoff_operators(game.u1, game.u2)
    return PayoffPair(float(np.trace(op1 @ rho).real), float(np.trace(op2 @ rho).real))


# ---------------------------------------------------------------------------
# closed form
# ---------------------------------------------------------------------------


def payoff_closed(game: TwoPlayerQuantumGame, prof: StrategyProfile) -> PayoffPair:
    u1, u2, a2, b2 = game.u1, game.u2, game.a_sq, game.b_sq
    p1, p2 = prof.p1, prof.p2
    d1 = (
        0.5 * p1 * p2 * (u1 + u2)
        + p1 * (0.5 * u1 * a2 + 0.5 * u2 * b2 - u2 * a2 - u1 * b2)
        - 0.5 * p2 * (u1 * b2 + u2 * a2)
        + u2 * a2
        + u1 * b2
    )
    d2 = (
        0.5 * p1 * p2 * (u1 + u2)
        - 0.5 * p1 * (u1 * a2 + u2 * b2)
        + p2 * (0.5 * u1 * b2 + 0.5 * u2 * a2 - u1 * a2 - u2 * b2)
        + u1 * a2
        + u2 * b2
    )
    return PayoffPair(d1, d2)


def deviation_slopes(game: TwoPlayerQuantumGame, prof: StrategyProfile) -> tuple[float, float]:
    """d$1/dp1 at p2 fixed, and d$2/dp2 at p1 fixed.

    Each payoff is linear in the owner's probability, so the sign of the
    slope decides whether a unilateral move can help.
    """
    u1, u2, a2, b2 = game.u1, game.u2, game.a_sq, game.b_sq
    s1 = 0.5 * prof.p2 * (u1 + u2) + u1 * (0.5 * a2 - b2) - u2 * (a2 - 0.5 * b2)
    s2 = 0.5 * prof.p1 * (u1 + u2) + u2 * (0.5 * a2 - b2) - u1 * (a2 - 0.5 * b2)
    return s1, s2


def mixed_equilibrium(game: TwoPlayerQuantumGame) -> StrategyProfile:
    """Interior candidate where both slopes vanish. May fall outside [0, 1]^2."""
    u1, u2, a2 = game.u1, game.u2, game.a_sq
    s = u1 + u2
    p1 = -(u1 * (1.0 - 3.0 * a2) + u2 * (-2.0 + 3.0 * a2)) / s
    p2 = -(u1 * (-2.0 + 3.0 * a2) + u2 * (1.0 - 3.0 * a2)) / s
    # + 0.0 turns a negative zero into zero
    return StrategyProfile(p1 + 0.0, p2 + 0.0)


# ---------------------------------------------------------------------------
# equilibrium checks
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Candidate:
    kind: str
    profile: StrategyProfile
    in_domain: bool
    payoffs: Optional[PayoffPair]
    max_gain1: Optional[float]
    max_gain2: Optional[float]
    grid_nash: bool
    analytic_nash: bool

    @property
    def is_nash(self) -> bool:
        return self.in_domain and self.grid_nash


@dataclass(frozen=True)
class EquilibriumSet:
    game: TwoPlayerQuantumGame
    grid_points: int
    candidates: tuple[Candidate, ...] = field(default_factory=tuple)

    def __getitem__(self, kind: str) -> Candidate:
        for c in self.candidates:
            if c.kind == kind:
                return c
        raise KeyError(kind)

    @property
    def pure_11(self) -> Candidate:
        return self["pure_11"]

    @property
    def pure_00(self) -> Candidate:
        return self["pure_00"]

    @property
    def mixed(self) -> Candidate:
        return self["mixed"]


def best_response_gains(
    game: TwoPlayerQuantumGame, prof: StrategyProfile, grid_points: int = 101
) -> tuple[float, float]:
    """Largest payoff increase either diner can get by a unilateral grid move."""
    base = payoff_trace(game, prof)
    grid = np.linspace(0.0, 1.0, grid_points)
    g1 = max(payoff_trace(game, StrategyProfile(float(q), prof.p2)).dollar1 for q in grid)
    g2 = max(payoff_trace(game, StrategyProfile(prof.p1, float(q))).dollar2 for q in grid)
    return g1 - base.dollar1, g2 - base.dollar2


def analytic_nash(game: TwoPlayerQuantumGame, prof: StrategyProfile, tol: float = NASH_TOL) -> bool:
    """(p* - p) * slope >= 0 for every p in [0, 1], for both diners."""
    if not prof.in_domain:
        return False
    s1, s2 = deviation_slopes(game, prof)

    def ok(p_star: float, slope: float) -> bool:
        # worst deviations are the endpoints p = 0 and p = 1
        return min((p_star - 0.0) * slope, (p_star - 1.0) * slope) >= -tol

    return ok(prof.p1, s1) and ok(prof.p2, s2)


def _candidate(game: TwoPlayerQuantumGame, kind: str, prof: StrategyProfile, grid_points: int) -> Candidate:
    if not prof.in_domain:
        return Candidate(kind, prof, False, None, None, None, False, False)
    gain1, gain2 = best_response_gains(game, prof, grid_points)
    return Candidate(
        kind=kind,
        profile=prof,
        in_domain=True,
        payoffs=payoff_trace(game, prof),
        max_gain1=gain1,
        max_gain2=gain2,
        grid_nash=gain1 <= NASH_TOL and gain2 <= NASH_TOL,
        analytic_nash=analytic_nash(game, prof),
    )


def verify_equilibria(game: TwoPlayerQuantumGame, grid_points: int = 101) -> EquilibriumSet:
    """Check the three candidate equilibria (1,1), (0,0) and the interior one."""
    if grid_points < 11:
        raise DomainError(f"grid_points must be >= 11, got {grid_points}")
    profiles = (
        ("pure_11", StrategyProfile(1.0, 1.0)),
        ("pure_00", StrategyProfile(0.0, 0.0)),
        ("mixed", mixed_equilibrium(game)),
    )
    return EquilibriumSet(
        game=game,
        grid_points=grid_points,
        candidates=tuple(_candidate(game, k, p, grid_points) for k, p in profiles),
    )


@dataclass(frozen=True)
class OptimalEntanglement:
    a_sq: float
    payoff_11: PayoffPair
    payoff_00: PayoffPair
    diff_below: float
    diff_above: float

    @property
    def pure_payoffs_equal(self) -> bool:
        return (
            self.payoff_11.dollar1 == self.payoff_00.dollar1
            and self.payoff_11.dollar2 == self.payoff_00.dollar2
        )


def pure_payoff_gap(u1: float, u2: float, a_sq: float) -> float:
    """$1(1,1) - $1(0,0); diner 2's gap is its negative."""
    g = TwoPlayerQuantumGame(u1, u2, a_sq)
    return payoff_closed(g, StrategyProfile(1, 1)).dollar1 - payoff_closed(g, StrategyProfile(0, 0)).dollar1


def optimal_entanglement(u1: float, u2: float, delta: float = 0.1) -> OptimalEntanglement:
    """Equal superposition, at which both diners rank (1,1) and (0,0) alike."""
    a_sq = 0.5
    game = TwoPlayerQuantumGame(u1, u2, a_sq)
    return OptimalEntanglement(
        a_sq=a_sq,
        payoff_11=payoff_closed(game, StrategyProfile(1.0, 1.0)),
        payoff_00=payoff_closed(game, StrategyProfile(0.0, 0.0)),
        diff_below=pure_payoff_gap(u1, u2, a_sq - delta),
        diff_above=pure_payoff_gap(u1, u2, a_sq + delta),
    )
