import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import stats

from kolkata_qh.errors import DomainError
from kolkata_qh.sim_core import (
    MASK64,
    binom_cdf,
    chi_square_uniform,
    derive_substream,
    gamma_q,
    log_gamma,
    make_rng,
    run_trials,
    summarize,
)


def exact_binom_sum(n, p, lo, hi):
    p = Fraction(p)
    return float(sum(math.comb(n, m) * p**m * (1 - p) ** (n - m) for m in range(lo, hi + 1)))


class TestSubstreams:
    def test_distinct_indices_give_distinct_seeds(self):
        assert derive_substream(7, 0) != derive_substream(7, 1)

    def test_deterministic(self):
        assert derive_substream(123, 45) == derive_substream(123, 45)

    def test_injective_over_many_indices(self):
        seeds = {derive_substream(2024, i) for i in range(50_000)}
        assert len(seeds) == 50_000

    @given(st.integers(0, MASK64), st.integers(0, 10**12))
    def test_fits_in_64_bits(self, master, idx):
        assert 0 <= derive_substream(master, idx) <= MASK64

    def test_negative_index_rejected(self):
        with pytest.raises(DomainError):
            derive_substream(1, -1)

    def test_rng_reproducible(self):
        a = make_rng(99).integers(0, 1000, size=20)
        b = make_rng(99).integers(0, 1000, size=20)
        assert np.array_equal(a, b)

    def test_run_trials_thread_invariant(self):
        def draw(i, rng):
            return (i, rng.integers(0, 1 << 62, size=3).tolist())

        serial = run_trials(draw, 5, 64, threads=1)
        parallel = run_trials(draw, 5, 64, threads=8)
        assert serial == parallel
        assert [t[0] for t in serial] == list(range(64))


class TestLogGamma:
    @pytest.mark.parametrize(
        "x, expected",
        [
            (5, math.log(24)),
            (1, 0.0),
            (2, 0.0),
            # ln(100!) from the exact integer factorial
            (101, math.log(math.factorial(100))),
        ],
    )
    def test_values(self, x, expected):
        assert log_gamma(x) == pytest.approx(expected, abs=1e-12)

    def test_ln_100_factorial_digits(self):
        assert log_gamma(101) == pytest.approx(363.7393756, abs=1e-7)

    @pytest.mark.parametrize("k", range(21))
    def test_matches_integer_factorial(self, k):
        assert math.exp(log_gamma(k + 1)) == pytest.approx(math.factorial(k), rel=1e-13)

    @pytest.mark.parametrize("x", [0.5, 3.7, 17.25, 1234.5, 98765.4321, 1e6])
    def test_against_mpmath(self, x):
        import mpmath

        mpmath.mp.dps = 40
        ref = float(mpmath.loggamma(x))
        # absolute 1e-12 until the value itself exceeds ~1e3, then a few ulps
        assert abs(log_gamma(x) - ref) <= max(1e-12, 4 * math.ulp(ref))

    @pytest.mark.parametrize("x", [0, -1, -0.5, float("nan")])
    def test_domain(self, x):
        with pytest.raises(DomainError):
            log_gamma(x)


class TestBinomCdf:
    def test_table1_first_row(self):
        assert round(binom_cdf(1000, 0.1, 1, 100), 4) == 0.5266

    def test_two_coins(self):
        assert binom_cdf(2, 0.5, 1, 1) == pytest.approx(0.5, abs=1e-15)

    def test_large_n_saturates(self):
        assert round(binom_cdf(100_000, 0.1, 1, 10_500), 4) == 1.0

    @pytest.mark.parametrize(
        "n, p, lo, hi",
        [(10, 0.3, 0, 4), (30, 0.1, 1, 3), (50, 1 / 3, 10, 25), (40, 0.05, 0, 40), (25, 0.9, 20, 24)],
    )
    def test_against_exact_rational(self, n, p, lo, hi):
        assert binom_cdf(n, p, lo, hi) == pytest.approx(exact_binom_sum(n, p, lo, hi), abs=1e-12)

    @pytest.mark.parametrize("n, p, hi", [(1000, 0.1, 100), (20_000, 0.05, 1050), (100_000, 0.1, 10_000)])
    def test_against_scipy(self, n, p, hi):
        ref = stats.binom.cdf(hi, n, p) - stats.binom.pmf(0, n, p)
        assert binom_cdf(n, p, 1, hi) == pytest.approx(ref, abs=5e-6)

    @pytest.mark.parametrize("n", [10, 1000, 100_000])
    @pytest.mark.parametrize("p", [0.1, 0.05, 1 / 3])
    def test_full_range_sums_to_one(self, n, p):
        assert binom_cdf(n, p, 0, n) == pytest.approx(1.0, abs=1e-9)

    def test_degenerate_p(self):
        assert binom_cdf(10, 0.0, 0, 0) == 1.0
        assert binom_cdf(10, 0.0, 1, 10) == 0.0
        assert binom_cdf(10, 1.0, 10, 10) == 1.0

    @pytest.mark.parametrize("args", [(10, 0.5, 5, 4), (10, 0.5, 0, 11), (10, 1.5, 0, 1), (10, 0.5, -1, 3)])
    def test_invalid(self, args):
        with pytest.raises(DomainError):
            binom_cdf(*args)


class TestChiSquare:
    def test_perfectly_uniform(self):
        r = chi_square_uniform([10, 10, 10, 10])
        assert r.statistic == 0
        assert r.dof == 3
        assert r.p_value == 1.0

    def test_hand_formula(self):
        r = chi_square_uniform([20, 0])
        assert r.statistic == 20
        assert r.dof == 1
        assert r.p_value == pytest.approx(stats.chi2.sf(20, 1), rel=1e-10)

    @pytest.mark.parametrize("a, x", [(0.5, 0.1), (0.5, 20), (3, 2.5), (3, 4.5), (59.5, 40), (59.5, 90), (500, 480)])
    def test_gamma_q_against_scipy(self, a, x):
        from scipy.special import gammaincc

        assert gamma_q(a, x) == pytest.approx(gammaincc(a, x), rel=1e-10, abs=1e-300)

    @given(st.lists(st.integers(0, 500), min_size=2, max_size=30).filter(lambda c: sum(c) > 0))
    @settings(max_examples=200)
    def test_matches_scipy_chisquare(self, counts):
        r = chi_square_uniform(counts)
        ref = stats.chisquare(counts)
        assert r.statistic == pytest.approx(ref.statistic, rel=1e-9, abs=1e-12)
        assert r.p_value == pytest.approx(ref.pvalue, rel=1e-7, abs=1e-14)

    @pytest.mark.parametrize("dof", [1, 4, 119])
    def test_p_value_monotone(self, dof):
        xs = np.linspace(0, 4 * dof + 40, 400)
        ps = [gamma_q(dof / 2, x / 2) for x in xs]
        assert all(b <= a for a, b in zip(ps, ps[1:]))

    @pytest.mark.parametrize("counts", [[], [5], [0, 0, 0]])
    def test_invalid(self, counts):
        with pytest.raises(DomainError):
            chi_square_uniform(counts)


class TestSummaryStats:
    def test_basic(self):
        s = summarize([1.0, 2.0, 3.0, 4.0])
        assert s.n_samples == 4
        assert s.mean == 2.5
        assert s.std_error == pytest.approx(np.std([1, 2, 3, 4], ddof=1) / 2)
        assert (s.min, s.max) == (1.0, 4.0)

    @given(st.lists(st.floats(-1e6, 1e6, allow_nan=False), min_size=1, max_size=50))
    def test_invariants(self, xs):
        s = summarize(xs)
        assert s.min <= s.mean <= s.max
        assert s.std_error >= 0

    def test_empty(self):
        with pytest.raises(DomainError):
            summarize([])
