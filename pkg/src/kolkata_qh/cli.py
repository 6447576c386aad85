"""Command line entry point: ``kolkata-qh <command> [options]``.

Every command writes one CSV (header row, ``.`` decimal, ``\\n`` line
ends) to ``--out`` or standard output. When ``--out`` is a file, a JSON
manifest with the command line, seed, package version, SHA-256 of the CSV
and wall-clock time is written next to it as ``<out>.manifest.json``.

Exit status: 0 success, 2 usage error, 3 domain error, 4 capacity error,
5 integrity error.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import math
import sys
import time
from pathlib import Path
from typing import Callable, Iterable, Sequence

import numpy as np

from . import __version__
from . import classical as cl
from . import coordination as co
from . import qhall as qh
from . import quantum_nash as qn
from .errors import CapacityError, DomainError, KolkataError
from .sim_core import chi_square_uniform, derive_substream, make_rng, run_trials, summarize

DEFAULT_SEED = 20240601

# (alpha, N, K, published P)
TABLE1_ROWS = (
    (1.0, 100, 10, 0.5266),
    (1.0, 500, 10, 0.5119),
    (1.0, 1000, 10, 0.5084),
    (1.0, 10000, 10, 0.5027),
    (1.0, 100, 20, 0.5266),
    (1.0, 500, 20, 0.5119),
    (1.0, 1000, 20, 0.5084),
    (1.0, 10000, 20, 0.5027),
    (1.05, 100, 10, 0.7221),
    (1.05, 500, 10, 0.8848),
    (1.05, 1000, 10, 0.9531),
    (1.05, 10000, 10, 1.0000),
    (1.1, 100, 10, 0.8652),
    (1.1, 500, 10, 0.9907),
    (1.1, 1000, 10, 0.9995),
    (1.1, 10000, 10, 1.0000),
)

SAMPLE_CHUNK = 4096


def p6(x: float) -> str:
    return f"{x:.6f}"


def num(x: float) -> str:
    # non-probability reals: shortest round-trip repr
    return repr(float(x))


def g(x: float) -> str:
    return f"{x:.6g}"


class Output:
    """Collects rows, then writes CSV and manifest in one go."""

    def __init__(self, header: Sequence[str]):
        self.buf = io.StringIO()
        self.writer = csv.writer(self.buf, lineterminator="\n")
        self.writer.writerow(header)
        self.notes: list[str] = []

    def row(self, values: Iterable[object]) -> None:
        self.writer.writerow(values)

    def text(self) -> str:
        return self.buf.getvalue()


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------


def cmd_table1(args: argparse.Namespace) -> Output:
    out = Output(["alpha", "N", "K", "capacity", "P", "P_4dp", "paper_P"])
    for alpha, n, k, published in TABLE1_ROWS:
        p = cl.ksp_cumulative_prob(n, k, alpha)
        out.row([alpha, n, k, cl.gate_capacity(n, alpha), p6(p), f"{p:.4f}", f"{published:.4f}"])
    return out


def cmd_fig1(args: argparse.Namespace) -> Output:
    days = args.days
    if days < 1:
        raise DomainError(f"--days must be >= 1, got {days}")
    rec = cl.krp_recurrence(days)
    mf = cl.krp_meanfield(days)
    out = Output(["n", "F_recurrence", "F_continuum", "rel_error", "G_meanfield"])
    for i in range(days):
        f_c = cl.krp_continuum(i + 1)
        out.row([i + 1, p6(rec[i]), p6(f_c), p6(abs(rec[i] - f_c) / rec[i]), p6(mf[i])])
    return out


def cmd_krp(args: argparse.Namespace) -> Output:
    if args.mode == "classical":
        cfg = cl.KrpConfig(n=args.n, days=args.days, trials=args.trials, seed=args.seed)
        rows = cl.krp_simulate_learning(cfg, threads=args.threads)
        out = Output(
            ["day", "F_recurrence", "F_continuum", "G_meanfield", "F_montecarlo", "F_montecarlo_stderr"]
        )
        for r in rows:
            out.row([r.day, p6(r.f_recurrence), p6(r.f_continuum), p6(r.f_meanfield),
                     p6(r.f_montecarlo), p6(r.montecarlo_stderr)])
        return out

    n = args.n
    if n < 1 or args.trials < 1:
        raise DomainError("--n and --trials must be >= 1")

    def trial(_i: int, rng: np.random.Generator) -> co.RestaurantAssignment:
        return co.assign_restaurants(qh.sample_measurements(n, 1, rng)[0])

    out = Output(["trial", "n", "occupancy", "agents_served", "restaurants_empty"])
    for i, a in enumerate(run_trials(trial, args.seed, args.trials, args.threads)):
        served = len(set(a.agent_to_restaurant))
        out.row([i, n, p6(a.occupancy), served, n - served])
    return out


def cmd_ksp(args: argparse.Namespace) -> Output:
    cfg = cl.KspConfig(
        agents_per_gate=args.n, gates=args.k, alpha=args.alpha, trials=args.trials, seed=args.seed
    )
    header = [
        "mode", "N", "K", "alpha", "capacity", "trials",
        "harmed_mean", "harmed_stderr", "harmed_max",
        "gate_ok_mean", "gate_ok_stderr", "all_safe_mean",
        "arrivals_min", "arrivals_max", "table1_P",
    ]
    out = Output(header)
    if args.mode == "classical":
        s = cl.ksp_simulate(cfg, threads=args.threads)
    else:
        cap = cfg.capacity

        def trial(_i: int, rng: np.random.Generator) -> cl.GateOutcome:
            outcome = qh.sample_measurements(cfg.total_agents, 1, rng)[0]
            return cl.gate_outcome(co.assign_gates(outcome, cfg.gates).arrivals(), cap)

        outcomes = run_trials(trial, cfg.seed, cfg.trials, args.threads)
        arrivals = np.array([o.arrivals for o in outcomes])
        ok = arrivals <= cap
        s = cl.KspSummary(
            config=cfg,
            harmed=summarize(o.harmed for o in outcomes),
            gate_ok=summarize(ok.mean(axis=1)),
            all_safe=summarize(ok.all(axis=1).astype(float)),
            arrivals_min=int(arrivals.min()),
            arrivals_max=int(arrivals.max()),
        )
    out.row([
        args.mode, cfg.agents_per_gate, cfg.gates, args.alpha, cfg.capacity, cfg.trials,
        p6(s.harmed.mean), p6(s.harmed.std_error), int(s.harmed.max),
        p6(s.gate_ok.mean), p6(s.gate_ok.std_error), p6(s.all_safe.mean),
        s.arrivals_min, s.arrivals_max,
        p6(cl.ksp_cumulative_prob(cfg.agents_per_gate, cfg.gates, cfg.alpha)),
    ])
    return out


def _parse_a_sq(text: str) -> float | None:
    if text == "sweep":
        return None
    try:
        return float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a number or 'sweep', got {text!r}") from None


def cmd_nash(args: argparse.Namespace) -> Output:
    if args.grid < 11:
        raise DomainError(f"--grid must be >= 11, got {args.grid}")
    if args.a_sq is None:
        if args.sweep_points < 2:
            raise DomainError("--sweep-points must be >= 2")
        values = [i / (args.sweep_points - 1) for i in range(args.sweep_points)]
    else:
        values = [args.a_sq]
    out = Output(["u1", "u2", "a_sq", "p1", "p2", "payoff1", "payoff2", "candidate_type", "is_nash"])
    if args.u1 == args.u2:
        note = "degenerate utilities u1 == u2: pure equilibria pay (u1 + u2) / 2 for every a_sq"
        out.notes.append(note)
        print(f"note: {note}", file=sys.stderr)
    for a_sq in values:
        eq = qn.verify_equilibria(qn.TwoPlayerQuantumGame(args.u1, args.u2, a_sq), args.grid)
        for c in eq.candidates:
            pay = ("", "") if c.payoffs is None else (p6(c.payoffs.dollar1), p6(c.payoffs.dollar2))
            out.row([num(args.u1), num(args.u2), p6(a_sq), p6(c.profile.p1), p6(c.profile.p2),
                     *pay, c.kind, int(c.is_nash)])
    return out


def _sample_counts(n_e: int, samples: int, seed: int, threads: int) -> tuple[np.ndarray, np.ndarray]:
    """Permutation-cell counts and (agent x momentum) counts from the sampler."""
    index = qh.permutation_index(n_e)
    n_chunks = -(-samples // SAMPLE_CHUNK)

    def chunk(c: int, rng: np.random.Generator) -> np.ndarray:
        size = min(SAMPLE_CHUNK, samples - c * SAMPLE_CHUNK)
        return qh.sample_measurements(n_e, size, rng)

    cells = np.zeros(len(index), dtype=np.int64)
    marg = np.zeros((n_e, n_e), dtype=np.int64)
    agents = np.arange(n_e)
    for block in run_trials(chunk, seed, n_chunks, threads):
        for row in block:
            cells[index[tuple(int(v) for v in row)]] += 1
        np.add.at(marg, (np.broadcast_to(agents, block.shape), block), 1)
    return cells, marg


def amplitude_identity_errors(n_max: int, draws: int, seed: int) -> tuple[float, float]:
    """Max relative determinant-vs-product error and max antisymmetry error."""
    rng = make_rng(derive_substream(seed, 1 << 32))
    worst_rel = 0.0
    worst_swap = 0.0
    for d in range(draws):
        n = 2 + d % (n_max - 1) if n_max >= 2 else 1
        zs = list(rng.normal(size=n) + 1j * rng.normal(size=n))
        det = qh.slater_amplitude(qh.SlaterState(n), zs, normalized=False)
        prod = qh.vandermonde_sign(n) * qh.vandermonde_amplitude(zs)
        worst_rel = max(worst_rel, abs(det - prod) / abs(prod))
        if n >= 2:
            swapped = list(zs)
            swapped[0], swapped[-1] = swapped[-1], swapped[0]
            det_s = qh.slater_amplitude(qh.SlaterState(n), swapped, normalized=False)
            prod_s = qh.vandermonde_amplitude(swapped)
            worst_swap = max(
                worst_swap,
                abs(det_s + det) / max(1.0, abs(det)),
                abs(prod_s + qh.vandermonde_amplitude(zs)) / max(1.0, abs(prod)),
            )
    return worst_rel, worst_swap


def cmd_quantum_verify(args: argparse.Namespace) -> Output:
    n_e = args.n_e
    if n_e > qh.MAX_EXPANSION:
        raise CapacityError(f"--n-e limited to {qh.MAX_EXPANSION}, got {n_e}")
    if n_e < 2 or args.samples < 1:
        raise DomainError("need --n-e >= 2 and --samples >= 1")
    terms = qh.expand_monomials(n_e)
    dist = qh.measurement_distribution(n_e)
    expected = math.factorial(n_e)
    uniform = len(dist) == expected and all(p == dist[next(iter(dist))] for p in dist.values())
    cells, marg = _sample_counts(n_e, args.samples, args.seed, args.threads)
    chi = chi_square_uniform(cells)
    p = 1.0 / n_e
    sigma = math.sqrt(p * (1.0 - p) / args.samples)
    max_z = float(np.max(np.abs(marg / args.samples - p)) / sigma)
    rel, swap = amplitude_identity_errors(n_e, args.draws, args.seed)
    out = Output([
        "n_e", "terms", "expected_terms", "all_coeff_unit", "distribution_uniform",
        "samples", "chi2_statistic", "chi2_dof", "chi2_p_value", "marginal_max_z",
        "det_product_max_rel_error", "antisymmetry_max_error",
    ])
    out.row([
        n_e, len(terms), expected, int(all(abs(t.coefficient) == 1 for t in terms)), int(uniform),
        args.samples, g(chi.statistic), chi.dof, p6(chi.p_value), g(max_z), g(rel), g(swap),
    ])
    return out


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------


def _uint64(text: str) -> int:
    v = int(text, 0)
    if not 0 <= v < 1 << 64:
        raise argparse.ArgumentTypeError(f"seed must fit in 64 unsigned bits, got {text}")
    return v


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=_uint64, default=DEFAULT_SEED, help="master seed (64-bit)")
    common.add_argument("--out", default="-", help="output CSV path, '-' for stdout")
    common.add_argument("--threads", type=int, default=1, help="worker threads; never changes results")

    parser = argparse.ArgumentParser(prog="kolkata-qh", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    sub.add_parser("table1", parents=[common], help="stadium gate probabilities")

    p = sub.add_parser("fig1", parents=[common], help="learning recurrence vs continuum")
    p.add_argument("--days", type=int, default=25)

    p = sub.add_parser("krp", parents=[common], help="restaurant game simulation")
    p.add_argument("--n", type=int, default=10_000)
    p.add_argument("--days", type=int, default=10)
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--mode", choices=("classical", "quantum"), default="classical")

    p = sub.add_parser("ksp", parents=[common], help="stadium game simulation")
    p.add_argument("--n", type=int, default=100, help="agents per gate")
    p.add_argument("--k", type=int, default=10, help="number of gates")
    p.add_argument("--alpha", type=float, default=1.0)
    p.add_argument("--trials", type=int, default=10_000)
    p.add_argument("--mode", choices=("classical", "quantum"), default="classical")

    p = sub.add_parser("nash", parents=[common], help="two-diner quantum Nash equilibria")
    p.add_argument("--u1", type=float, default=2.0)
    p.add_argument("--u2", type=float, default=1.0)
    p.add_argument("--a-sq", type=_parse_a_sq, default=0.5, help="|a|^2, or 'sweep'")
    p.add_argument("--sweep-points", type=int, default=21)
    p.add_argument("--grid", type=int, default=101)

    p = sub.add_parser("quantum-verify", parents=[common], help="measurement-model oracle checks")
    p.add_argument("--n-e", type=int, default=5)
    p.add_argument("--samples", type=int, default=100_000)
    p.add_argument("--draws", type=int, default=100)

    return parser


COMMANDS: dict[str, Callable[[argparse.Namespace], Output]] = {
    "table1": cmd_table1,
    "fig1": cmd_fig1,
    "krp": cmd_krp,
    "ksp": cmd_ksp,
    "nash": cmd_nash,
    "quantum-verify": cmd_quantum_verify,
}


def _write(args: argparse.Namespace, argv: Sequence[str], out: Output, elapsed: float) -> None:
    text = out.text()
    if args.out == "-":
        sys.stdout.write(text)
        sys.stdout.flush()
        return
    path = Path(args.out)
    path.parent.mkdir(parents=True, exist_ok=True)
    data = text.encode("utf-8")
    path.write_bytes(data)
    manifest = {
        "command": ["kolkata-qh", *argv],
        "seed": args.seed,
        "version": __version__,
        "outputs": {path.name: hashlib.sha256(data).hexdigest()},
        "duration_s": round(elapsed, 3),
        "notes": out.notes,
    }
    Path(f"{path}.manifest.json").write_text(json.dumps(manifest, indent=2) + "\n", encoding="utf-8")


def main(argv: Sequence[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.threads < 1:
        parser.error("--threads must be >= 1")
    start = time.perf_counter()
    try:
        out = COMMANDS[args.command](args)
    except KolkataError as exc:
        print(f"kolkata-qh {args.command}: {type(exc).__name__}: {exc}", file=sys.stderr)
        return exc.exit_code
    _write(args, argv, out, time.perf_counter() - start)
    return 0


if __name__ == "__main__":
    sys.exit(main())
