"""Acceptance gate. One test per criterion, each prints a PASS/FAIL line.

Run alone with ``pytest tests/test_acceptance.py -v``.
"""

import itertools
import math
import time

import numpy as np
import pytest

from kolkata_qh import classical as cl
from kolkata_qh import coordination as co
from kolkata_qh import qhall as qh
from kolkata_qh import quantum_nash as qn
from kolkata_qh.cli import DEFAULT_SEED, TABLE1_ROWS, _sample_counts, main
from kolkata_qh.sim_core import chi_square_uniform, derive_substream, make_rng


@pytest.fixture
def report(capsys):
    def _report(label, ok, detail):
        with capsys.disabled():
            print(f"\n[{'PASS' if ok else 'FAIL'}] {label}: {detail}")
        assert ok, f"{label}: {detail}"

    return _report


def test_ac01_table1(report):
    start = time.perf_counter()
    diffs = [abs(cl.ksp_cumulative_prob(n, k, a) - p) for a, n, k, p in TABLE1_ROWS]
    elapsed = time.perf_counter() - start
    ok = len(diffs) == 16 and max(diffs) <= 1e-4 and elapsed < 5
    report("AC1 Table 1", ok, f"16 rows, max |P - published| = {max(diffs):.2e} (tol 1e-4), {elapsed:.2f}s (< 5s)")


def test_ac02_fig1(report):
    start = time.perf_counter()
    rec = cl.krp_recurrence(25)
    worst = max(abs(rec[i] - cl.krp_continuum(i + 1)) / rec[i] for i in range(25))
    elapsed = time.perf_counter() - start
    ok = worst < 0.05 and rec[9] < 0.90 and elapsed < 1
    report("AC2 Fig. 1", ok, f"max rel dev {worst:.4f} (< 0.05), F_10 = {rec[9]:.6f} (< 0.90), {elapsed:.3f}s")


def test_ac03_krp_montecarlo(report):
    start = time.perf_counter()
    rows = cl.krp_simulate_learning(cl.KrpConfig(n=10_000, days=1, trials=100, seed=DEFAULT_SEED))
    elapsed = time.perf_counter() - start
    target = 1 - math.exp(-1)
    mean = rows[0].f_montecarlo
    ok = abs(mean - target) <= 0.005 and elapsed < 30
    report("AC3 KRP Monte Carlo", ok, f"day-1 fill {mean:.5f} vs {target:.5f} (tol 0.005), {elapsed:.2f}s (< 30s)")


def test_ac04_ksp_montecarlo(report):
    start = time.perf_counter()
    s = cl.ksp_simulate(cl.KspConfig(100, 10, 1.0, trials=10_000, seed=DEFAULT_SEED))
    elapsed = time.perf_counter() - start
    ok = abs(s.gate_ok.mean - 0.5266) <= 0.01 and elapsed < 60
    report("AC4 KSP Monte Carlo", ok, f"gate indicator {s.gate_ok.mean:.5f} vs 0.5266 (tol 0.01), {elapsed:.2f}s (< 60s)")


def test_ac05_quantum_guarantees(report):
    occupancies = [
        co.assign_restaurants(qh.sample_measurement(50, derive_substream(DEFAULT_SEED, i))).occupancy
        for i in range(10_000)
    ]
    krp_ok = all(o == 1.0 for o in occupancies)
    gate_ok = True
    harmed_total = 0
    for i in range(10_000):
        ga = co.assign_gates(qh.sample_measurement(100, derive_substream(DEFAULT_SEED + 1, i)), 10)
        gate_ok &= ga.arrivals().tolist() == [10] * 10
        harmed_total += ga.harmed(cl.gate_capacity(10, 1.0))
    ok = krp_ok and gate_ok and harmed_total == 0
    report(
        "AC5 quantum guarantees",
        ok,
        f"N=50 occupancy == 1 in {sum(o == 1.0 for o in occupancies)}/10000 trials; "
        f"NK=100,K=10 all gates == 10: {gate_ok}; harmed total {harmed_total}",
    )


def test_ac06_measurement_oracle(report):
    from fractions import Fraction

    expansion_ok = True
    for n in range(1, 7):
        terms = qh.expand_monomials(n)
        dist = qh.measurement_distribution(n)
        expansion_ok &= len(terms) == math.factorial(n)
        expansion_ok &= all(abs(t.coefficient) == 1 for t in terms)
        expansion_ok &= len(dist) == math.factorial(n)
        expansion_ok &= all(p == Fraction(1, math.factorial(n)) for p in dist.values())
    samples = 100_000
    cells, marg = _sample_counts(5, samples, DEFAULT_SEED, threads=1)
    chi = chi_square_uniform(cells)
    sigma = math.sqrt(0.2 * 0.8 / samples)
    max_z = float(np.max(np.abs(marg / samples - 0.2)) / sigma)
    ok = expansion_ok and chi.p_value > 0.001 and max_z < 3
    report(
        "AC6 measurement model",
        ok,
        f"n_e<=6 exact n_e! unit terms, uniform 1/n_e!: {expansion_ok}; "
        f"chi2 p = {chi.p_value:.4f} (> 0.001); max marginal |z| = {max_z:.2f} (< 3)",
    )


def test_ac07_determinant_product(report):
    rng = make_rng(derive_substream(DEFAULT_SEED, 7))
    worst_rel = 0.0
    worst_swap = 0.0
    for trial in range(100):
        n = 1 + trial % 8
        zs = list(rng.normal(size=n) + 1j * rng.normal(size=n))
        det = qh.slater_amplitude(qh.SlaterState(n), zs, normalized=False)
        vdm = qh.vandermonde_amplitude(zs)
        worst_rel = max(worst_rel, abs(det - qh.vandermonde_sign(n) * vdm) / abs(vdm))
        if n >= 2:
            i, j = sorted(rng.choice(n, size=2, replace=False))
            sw = list(zs)
            sw[i], sw[j] = sw[j], sw[i]
            det_s = qh.slater_amplitude(qh.SlaterState(n), sw, normalized=False)
            worst_swap = max(
                worst_swap,
                abs(det + det_s) / max(1.0, abs(det)),
                abs(vdm + qh.vandermonde_amplitude(sw)) / max(1.0, abs(vdm)),
            )
    ok = worst_rel <= 1e-9 and worst_swap <= 1e-12
    report("AC7 det-product identity", ok, f"max rel err {worst_rel:.2e} (<= 1e-9), antisymmetry {worst_swap:.2e} (<= 1e-12)")


def test_ac08_two_diner_engine(report):
    grid = [i / 10 for i in range(11)]
    worst = 0.0
    for p1, p2, a in itertools.product(grid, grid, grid):
        g = qn.TwoPlayerQuantumGame(2, 1, a)
        t = qn.payoff_trace(g, qn.StrategyProfile(p1, p2))
        c = qn.payoff_closed(g, qn.StrategyProfile(p1, p2))
        worst = max(worst, abs(t.dollar1 - c.dollar1), abs(t.dollar2 - c.dollar2))

    eq = qn.verify_equilibria(qn.TwoPlayerQuantumGame(2, 1, 0.5), 101)
    pure = (eq.pure_11.payoffs, eq.pure_00.payoffs)
    pure_ok = all(p.dollar1 == 1.5 and p.dollar2 == 1.5 for p in pure)
    mixed_ok = eq.mixed.payoffs.dollar1 == 1.125 and eq.mixed.payoffs.dollar2 == 1.125
    flagged = [c for c in eq.candidates if c.is_nash]
    br_ok = len(flagged) == 3 and all(c.max_gain1 <= 1e-9 and c.max_gain2 <= 1e-9 for c in flagged)

    rng = make_rng(derive_substream(DEFAULT_SEED, 8))
    gap_err = 0.0
    for _ in range(20):
        u1, u2 = (float(x) for x in rng.uniform(0.1, 10, size=2))
        a = float(rng.uniform())
        gap_err = max(gap_err, abs(qn.pure_payoff_gap(u1, u2, a) - (u2 - u1) * (1 - 2 * a)))

    ok = worst <= 1e-12 and pure_ok and mixed_ok and br_ok and gap_err <= 1e-12
    report(
        "AC8 two-diner engine",
        ok,
        f"closed vs trace max {worst:.1e} (<= 1e-12); $(1,1)=$(0,0)=1.5: {pure_ok}; mixed 1.125: {mixed_ok}; "
        f"101-pt best response (<= 1e-9) on {len(flagged)} equilibria: {br_ok}; gap identity err {gap_err:.1e}",
    )


def test_ac09_asymptotics(report):
    ratio = cl.all_safe_exact(50, 2) / cl.all_safe_asymptotic(50, 2)
    b = cl.best_outcome_prob(100)
    target = math.exp(-100) * math.sqrt(200 * math.pi)
    rel = abs(b.exact / target - 1)
    ok = abs(ratio - 1) <= 0.05 and rel <= 1e-3
    report("AC9 asymptotics", ok, f"all-safe exact/asymptotic = {ratio:.5f} (within 5%); N!/N^N vs Stirling rel {rel:.2e} (<= 1e-3)")


REPRO_COMMANDS = [
    ["table1"],
    ["fig1"],
    ["krp", "--mode", "classical"],
    ["krp", "--mode", "quantum", "--n", "50", "--trials", "10000"],
    ["ksp", "--mode", "classical"],
    ["ksp", "--mode", "quantum"],
    ["nash", "--u1", "2", "--u2", "1", "--a-sq", "0.5"],
    ["nash", "--a-sq", "sweep"],
    ["quantum-verify", "--n-e", "5"],
]


def test_ac10_reproducibility(report, tmp_path):
    failures = []
    for idx, argv in enumerate(REPRO_COMMANDS):
        outputs = []
        for run, threads in enumerate(["1", "1", "8"]):
            path = tmp_path / f"c{idx}_{run}.csv"
            code = main([*argv, "--seed", "424242", "--threads", threads, "--out", str(path)])
            if code:
                failures.append(f"{argv} exit {code}")
            outputs.append(path.read_bytes())
        if len(set(outputs)) != 1:
            failures.append(" ".join(argv))
    ok = not failures
    report(
        "AC10 reproducibility",
        ok,
        f"{len(REPRO_COMMANDS)} commands x (seed repeat, threads 1 vs 8) byte-identical"
        + ("" if ok else f"; differing: {failures}"),
    )
