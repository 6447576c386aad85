"""The filling-factor-one quantum Hall state and its measurement model.

Positions are complex numbers ``z = x - i y`` and lengths are in units of
the magnetic length ``l0`` (default 1).

Sign convention. ``det[z_j ** i]`` (row ``i`` = orbital, column ``j`` =
particle) equals ``prod_{j<k} (z_k - z_j)``, while ``vandermonde_amplitude``
returns ``prod_{j<k} (z_j - z_k)``. The two differ by the global factor
``(-1) ** (n (n - 1) / 2)``; ``vandermonde_sign`` returns it, and the
monomial expansion sums to the determinant.
"""

from __future__ import annotations

import cmath
import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .errors import CapacityError, DomainError, IntegrityError
from .sim_core import log_gamma, make_rng

MAX_EXPANSION = 8
MAX_DETERMINANT = 12


@dataclass(frozen=True)
class Orbital:
    m: int
    l0: float = 1.0

    def __post_init__(self) -> None:
        if self.m < 0:
            raise DomainError(f"angular momentum must be >= 0, got {self.m}")
        if not self.l0 > 0:
            raise DomainError(f"l0 must be positive, got {self.l0}")


@dataclass(frozen=True)
class SlaterState:
    """Orbitals 0..n_e-1 each holding one particle."""

    n_e: int
    l0: float = 1.0

    def __post_init__(self) -> None:
        if self.n_e < 1:
            raise DomainError(f"n_e must be >= 1, got {self.n_e}")
        if not self.l0 > 0:
            raise DomainError(f"l0 must be positive, got {self.l0}")


@dataclass(frozen=True)
class MonomialTerm:
    """``sign * prod_i z_i ** exponents[i]``.

    ``exponents[i] = sigma(i + 1) - 1`` for the permutation ``sigma`` of
    ``{1..n}``; the coefficient magnitude is always one.
    """

    exponents: tuple[int, ...]
    sign: int

    @property
    def coefficient(self) -> int:
        return self.sign

    def evaluate(self, zs: Sequence[complex]) -> complex:
        out = complex(self.sign)
        for z, e in zip(zs, self.exponents):
            out *= z**e
        return out


def position(x: float, y: float) -> complex:
    """Complex coordinate ``x - i y`` of the point (x, y)."""
    return complex(x, -y)


# ---------------------------------------------------------------------------
# single-particle orbitals
# ---------------------------------------------------------------------------


def lll_orbital(orb: Orbital, z: complex) -> complex:
    """Lowest-Landau-level orbital with angular momentum ``orb.m`` at ``z``.

    Evaluated as modulus and phase in log space so large ``m`` neither
    overflows ``m!`` nor ``|z|**m``.
    """
    m, l0 = orb.m, orb.l0
    w = complex(z) / l0
    r = abs(w)
    log_norm = -0.5 * (math.log(2.0 * math.pi * l0 * l0) + m * math.log(2.0) + log_gamma(m + 1.0))
    if r == 0.0:
        return complex(math.exp(log_norm)) if m == 0 else 0j
    log_mod = log_norm + m * math.log(r) - r * r / 4.0
    return cmath.rect(math.exp(log_mod), m * cmath.phase(w))


def orbital_area(orb: Orbital) -> float:
    """Expectation of pi r^2 in orbital ``m``: 2 (m + 1) pi l0^2."""
    return 2.0 * (orb.m + 1) * math.pi * orb.l0**2


def landau_capacity(area: float, l0: float = 1.0) -> tuple[int, int]:
    """Number of LLL orbitals fitting in ``area`` and the largest momentum.

    Returns ``(n_e, m_max)`` with ``n_e = floor(A / (2 pi l0^2))`` and
    ``m_max = n_e - 1``.
    """
    if not (area > 0 and l0 > 0):
        raise DomainError(f"area and l0 must be positive, got ({area}, {l0})")
    ratio = area / (2.0 * math.pi * l0 * l0)
    n_e = int(math.floor(ratio + 1e-9 * max(1.0, ratio)))
    return n_e, n_e - 1


# ---------------------------------------------------------------------------
# many-particle amplitudes
# ---------------------------------------------------------------------------


def slater_matrix(state: SlaterState, zs: Sequence[complex], normalized: bool = True) -> np.ndarray:
    zs = list(zs)
    if len(zs) != state.n_e:
        raise DomainError(f"expected {state.n_e} positions, got {len(zs)}")
    if state.n_e > MAX_DETERMINANT:
        raise CapacityError(f"determinant limited to n_e <= {MAX_DETERMINANT}")
    n = state.n_e
    mat = np.empty((n, n), dtype=complex)
    for i in range(n):
        for j, z in enumerate(zs):
            if normalized:
                mat[i, j] = lll_orbital(Orbital(i, state.l0), z)
            else:
                mat[i, j] = z**i
    return mat


def slater_amplitude(state: SlaterState, zs: Sequence[complex], normalized: bool = True) -> complex:
    """Determinant of ``[phi_i(z_j)]``, or of ``[z_j ** i]`` when not normalized."""
    det = complex(np.linalg.det(slater_matrix(state, zs, normalized)))
    if not cmath.isfinite(det):
        # LU can divide by a near-underflow pivot on numerically singular input
        raise IntegrityError(f"determinant is not finite for positions {list(zs)[:8]}")
    return det


def vandermonde_amplitude(zs: Sequence[complex]) -> complex:
    zs = [complex(z) for z in zs]
    if not zs:
        raise DomainError("need at least one position")
    out = 1 + 0j
    for j, k in itertools.combinations(range(len(zs)), 2):
        out *= zs[j] - zs[k]
    return out


def vandermonde_sign(n: int) -> int:
    """``det[z_j ** i] == vandermonde_sign(n) * vandermonde_amplitude(z)``."""
    return -1 if (n * (n - 1) // 2) % 2 else 1


def permutation_sign(perm: Sequence[int]) -> int:
    """Signature via cycle decomposition."""
    seen = [False] * len(perm)
    sign = 1
    for start in range(len(perm)):
        if seen[start]:
            continue
        length = 0
        i = start
        while not seen[i]:
            seen[i] = True
            i = perm[i]
            length += 1
        if length % 2 == 0:
            sign = -sign
    return sign


def expand_monomials(n_e: int) -> list[MonomialTerm]:
    """All ``n_e!`` signed monomials of the Vandermonde polynomial."""
    if n_e < 1:
        raise DomainError(f"n_e must be >= 1, got {n_e}")
    if n_e > MAX_EXPANSION:
        raise CapacityError(f"expansion limited to n_e <= {MAX_EXPANSION} ({n_e}! terms requested)")
    return [
        MonomialTerm(exponents=perm, sign=permutation_sign(perm))
        for perm in itertools.permutations(range(n_e))
    ]


def evaluate_expansion(terms: Sequence[MonomialTerm], zs: Sequence[complex]) -> complex:
    return sum((t.evaluate(zs) for t in terms), 0j)


def measurement_distribution(n_e: int) -> dict[tuple[int, ...], Fraction]:
    """Outcome probabilities from squared coefficient magnitudes.

    Keys are momentum assignments (entry ``i`` is the momentum found for
    particle ``i``). Values are exact fractions.
    """
    terms = expand_monomials(n_e)
    weights = {t.exponents: Fraction(abs(t.coefficient) ** 2) for t in terms}
    total = sum(weights.values())
    return {k: w / total for k, w in weights.items()}


def sample_measurement(n_e: int, seed: int) -> tuple[int, ...]:
    """One uniformly random assignment of momenta 0..n_e-1 to particles."""
    if n_e < 1:
        raise DomainError(f"n_e must be >= 1, got {n_e}")
    return tuple(int(v) for v in make_rng(seed).permutation(n_e))


def sample_measurements(n_e: int, count: int, rng: np.random.Generator) -> np.ndarray:
    """``count`` independent outcomes as rows of a ``(count, n_e)`` array."""
    if n_e < 1 or count < 0:
        raise DomainError(f"bad sample request ({n_e}, {count})")
    base = np.broadcast_to(np.arange(n_e), (count, n_e))
    return rng.permuted(base, axis=1)


def permutation_index(n_e: int) -> dict[tuple[int, ...], int]:
    return {p: i for i, p in enumerate(itertools.permutations(range(n_e)))}
