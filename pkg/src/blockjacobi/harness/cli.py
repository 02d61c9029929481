"""Command line interface: solver verbs, matrix generation, and the
benchmark experiments.  Exit code 0 on full success, 2 when any case did not
converge."""

from __future__ import annotations

import argparse
import os
import sys

import numpy as np

from ..blocksolve import SolverConfig, solve_hermitian, solve_j_hermitian, solve_normal
from ..matcore import PartitionedHermitian, read_matrix_text, write_matrix_text
from ..pivot import read_ordering_text
from .bench import BenchmarkSpec, TRACE_HEADER, _write_csv, random_row_serial, run_benchmark
from .generators import gen_ill_conditioned, gen_random_hermitian, gen_random_normal, gen_spd


def _parse_blocks(text: str) -> tuple[int, ...]:
    return tuple(int(tok) for tok in text.split(",") if tok)


def _add_common(sub: argparse.ArgumentParser):
    sub.add_argument("--n", type=int, default=100)
    sub.add_argument("--blocks", type=str, default="2",
                     help="block size, or comma list for bench-blocksizes/accuracy")
    sub.add_argument("--strategy-seed", type=int, default=0)
    sub.add_argument("--matrix-seed", type=int, default=0)
    sub.add_argument("--tol", type=float, default=1e-13)
    sub.add_argument("--max-cycles", type=int, default=30)
    sub.add_argument("--rho", type=float, default=1.0)
    sub.add_argument("--attr-r", action=argparse.BooleanOptionalAction, default=True)
    sub.add_argument("--out", type=str, default=".", help="output directory")
    sub.add_argument("--paper-scale", action="store_true",
                     help="use n=200 regardless of --n")


def _effective_n(args) -> int:
    return 200 if args.paper_scale else args.n


def _config(args, ordering=None) -> SolverConfig:
    return SolverConfig(
        ordering=ordering,
        rho=args.rho,
        tol=args.tol,
        max_cycles=args.max_cycles,
        use_attr_R=args.attr_r,
        seed=args.matrix_seed,
    )


def _load_or_generate(args, kind: str):
    n = _effective_n(args)
    b = _parse_blocks(args.blocks)[0]
    sizes = (b,) * (n // b)
    if args.infile:
        p, arr = read_matrix_text(args.infile)
        return p, arr
    if kind == "hermitian":
        a = gen_random_hermitian(n, args.matrix_seed, sizes=sizes)
        return a.partition, a.entries
    if kind == "normal":
        arr, p, _ = gen_random_normal(n, args.matrix_seed, min_real_gap=0.5, sizes=sizes)
        return p, arr
    a, _ = gen_spd(n, args.nu, args.matrix_seed, sizes=sizes)
    return a.partition, a.entries


def _write_trace(args, experiment: str, case_id: str, trace, normf: float) -> str:
    os.makedirs(args.out, exist_ok=True)
    path = os.path.join(args.out, "trace.csv")
    rows = [
        (experiment, case_id, cycle, off, off / normf)
        for cycle, off in enumerate(trace.per_cycle_off)
    ]
    _write_csv(path, TRACE_HEADER, rows)
    return path


def _cmd_gen_matrix(args) -> int:
    n = _effective_n(args)
    b = _parse_blocks(args.blocks)[0]
    sizes = (b,) * (n // b)
    if args.kind == "hermitian":
        a = gen_random_hermitian(n, args.matrix_seed, sizes=sizes)
        p, arr = a.partition, a.entries
    elif args.kind == "illcond":
        a = gen_ill_conditioned(n, args.matrix_seed, args.cond_exp, sizes=sizes)
        p, arr = a.partition, a.entries
    elif args.kind == "normal":
        arr, p, _ = gen_random_normal(n, args.matrix_seed, min_real_gap=args.min_real_gap,
                                      sizes=sizes)
    else:
        a, _ = gen_spd(n, args.nu, args.matrix_seed, sizes=sizes)
        p, arr = a.partition, a.entries
    write_matrix_text(args.out_file, arr, p)
    print(f"wrote {args.kind} matrix n={n} blocks={b} -> {args.out_file}")
    return 0


def _resolve_cli_ordering(args, m: int):
    if getattr(args, "ordering_file", None):
        ordering = read_ordering_text(args.ordering_file)
        if ordering.m != m:
            raise SystemExit(f"ordering file is over m={ordering.m}, matrix has m={m}")
        return ordering
    return random_row_serial(m, args.strategy_seed) if m >= 2 else None


def _cmd_solve_hermitian(args) -> int:
    p, arr = _load_or_generate(args, "hermitian")
    a = PartitionedHermitian(arr, p)
    ordering = _resolve_cli_ordering(args, p.m)
    res = solve_hermitian(a, _config(args, ordering))
    normf = float(np.linalg.norm(a.entries))
    path = _write_trace(args, "solve-hermitian", f"n{p.n}-m{p.m}", res.trace, normf)
    print(f"solve-hermitian: n={p.n} m={p.m} cycles={res.trace.cycles_used} "
          f"converged={res.trace.converged} trace={path}")
    return 0 if res.trace.converged else 2


def _cmd_solve_normal(args) -> int:
    p, arr = _load_or_generate(args, "normal")
    ordering = _resolve_cli_ordering(args, p.m)
    res = solve_normal(arr, p, _config(args, ordering), driver=args.driver)
    normf = float(np.linalg.norm(arr))
    path = _write_trace(args, "solve-normal", f"n{p.n}-m{p.m}", res.trace, normf)
    for w in res.warnings:
        print(f"warning: {w}")
    print(f"solve-normal: n={p.n} m={p.m} cycles={res.trace.cycles_used} "
          f"converged={res.trace.converged} trace={path}")
    return 0 if res.trace.converged else 2


def _cmd_solve_jjacobi(args) -> int:
    p, arr = _load_or_generate(args, "spd")
    a = PartitionedHermitian(arr, p)
    ordering = _resolve_cli_ordering(args, p.m)
    res = solve_j_hermitian(a, args.nu, _config(args, ordering))
    normf = float(np.linalg.norm(a.entries))
    path = _write_trace(args, "solve-jjacobi", f"n{p.n}-m{p.m}-nu{args.nu}", res.trace, normf)
    print(f"solve-jjacobi: n={p.n} m={p.m} nu={args.nu} cycles={res.trace.cycles_used} "
          f"converged={res.trace.converged} trace={path}")
    return 0 if res.trace.converged else 2


def _cmd_bench(args, experiment: str) -> int:
    spec = BenchmarkSpec(
        experiment=experiment,
        n=_effective_n(args),
        block_sizes=_parse_blocks(args.blocks),
        strategy_seed=args.strategy_seed,
        matrix_seed=args.matrix_seed,
        cond_exp=args.cond_exp,
        tol=args.tol,
        max_cycles=args.max_cycles,
        rho=args.rho,
        use_attr_R=args.attr_r,
        out_dir=args.out,
    )
    result = run_benchmark(spec)
    for line in result.summary:
        print(line)
    for path in result.paths:
        print(f"wrote {path}")
    return 0 if result.all_converged else 2


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="blockjacobi",
        description="Complex block Jacobi eigensolvers and benchmarks",
    )
    subs = parser.add_subparsers(dest="verb", required=True)

    for verb in ("solve-hermitian", "solve-normal", "solve-jjacobi",
                 "bench-strategies", "bench-blocksizes", "bench-accuracy",
                 "verify-annihilators"):
        sub = subs.add_parser(verb)
        _add_common(sub)
        sub.add_argument("--in", dest="infile", type=str, default=None,
                         help="matrix text file (otherwise generated)")
        sub.add_argument("--ordering-file", type=str, default=None,
                         help="pivot ordering text file (validated on load)")
        sub.add_argument("--cond-exp", type=float, default=10.0)
        if verb == "solve-normal":
            sub.add_argument("--driver", choices=["auto", "hermitian_part", "skew_part"],
                             default="auto")
        if verb == "solve-jjacobi":
            sub.add_argument("--nu", type=int, default=None)

    gen = subs.add_parser("gen-matrix")
    _add_common(gen)
    gen.add_argument("--kind", choices=["hermitian", "illcond", "normal", "spd"],
                     required=True)
    gen.add_argument("--cond-exp", type=float, default=10.0)
    gen.add_argument("--min-real-gap", type=float, default=0.5)
    gen.add_argument("--nu", type=int, default=None)
    gen.add_argument("--out-file", type=str, required=True)

    args = parser.parse_args(argv)
    if getattr(args, "nu", None) is None and args.verb in ("solve-jjacobi",):
        args.nu = _effective_n(args) // 2
    if args.verb == "gen-matrix" and args.kind == "spd" and args.nu is None:
        args.nu = _effective_n(args) // 2

    if args.verb == "gen-matrix":
        return _cmd_gen_matrix(args)
    if args.verb == "solve-hermitian":
        return _cmd_solve_hermitian(args)
    if args.verb == "solve-normal":
        return _cmd_solve_normal(args)
    if args.verb == "solve-jjacobi":
        return _cmd_solve_jjacobi(args)
    return _cmd_bench(args, args.verb.removeprefix("bench-") if args.verb.startswith("bench-")
                      else args.verb)


if __name__ == "__main__":
    sys.exit(main())
