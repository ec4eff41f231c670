"""Command line: partition, refine, evaluate and benchmark.

Exit codes: 0 ok, 1 usage or input error, 2 time limit hit without a
solution, 3 no balanced bipartition could be produced.
"""

from __future__ import annotations

import argparse
import csv
import io
import math
import os
import re
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, fields
from decimal import Decimal, localcontext
from fractions import Fraction
from pathlib import Path

import numpy as np

from .baseline import baseline_partition
from .executor import ExecutorConfig, NoSolutionError, partition
from .hypergraph import (
    Bipartition,
    FormatError,
    Hypergraph,
    load_hmetis,
    read_partition,
    write_partition,
)
from .refine import RefineConfig, RefinementError, rebahfc

EXIT_OK, EXIT_USAGE, EXIT_TIMEOUT, EXIT_INFEASIBLE = 0, 1, 2, 3
TIMEOUT_RATIO = 2.0
_DECIMAL = re.compile(r"^\d+(\.\d+)?$")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def parse_epsilon(text: str) -> Fraction:
    """Decimal literal such as ``0.03``, read exactly."""
    if not _DECIMAL.match(text):
        raise argparse.ArgumentTypeError(f"epsilon must be a decimal literal, got {text!r}")
    eps = Fraction(text)
    if eps >= 1:
        raise argparse.ArgumentTypeError("epsilon must be below 1")
    return eps


def decimal_text(eps: Fraction) -> str:
    """Exact decimal spelling of a terminating fraction."""
    with localcontext() as ctx:
        ctx.prec = 60
        d = Decimal(eps.numerator) / Decimal(eps.denominator)
    text = format(d.normalize(), "f")
    return text if text != "-0" else "0"


def parse_pairs(text: str) -> int | str:
    if text == "waves":
        return text
    try:
        q = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"--pairs takes a positive integer or 'waves', got {text!r}") from None
    if q < 1:
        raise argparse.ArgumentTypeError("--pairs must be positive")
    return q


@dataclass
class RunRecord:
    instance: str
    algorithm: str
    seed: int
    epsilon: str
    cut: int | str
    block0: int | str
    block1: int | str
    imbalance: str
    initial_cut: int | str
    wall_time: str
    status: str

    @classmethod
    def from_bipartition(cls, instance, algorithm, seed, eps_text, bip: Bipartition | None,
                         status: str, wall: float | None, initial: Bipartition | None = None) -> RunRecord:
        if bip is None:
            cut = b0 = b1 = imb = ""
        else:
            cut, (b0, b1), imb = bip.cut_size, bip.block_sizes, f"{bip.imbalance:.6f}"
        return cls(instance, algorithm, seed, eps_text, cut, b0, b1, imb,
                   "" if initial is None else initial.cut_size,
                   "" if wall is None else f"{wall:.6f}", status)


HEADER = [f.name for f in fields(RunRecord)]


def write_records(records, path=None) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(HEADER)
    for r in records:
        w.writerow([getattr(r, k) for k in HEADER])
    text = buf.getvalue()
    if path is not None:
        Path(path).write_text(text)
    return text


def read_records(path) -> list[RunRecord]:
    with open(path, newline="") as f:
        return [RunRecord(**row) for row in csv.DictReader(f)]


def _load(path) -> Hypergraph:
    if not os.path.isfile(path):
        raise UsageError(f"no such file: {path}")
    try:
        return load_hmetis(path)
    except FormatError as exc:
        raise UsageError(str(exc)) from None


def _status(bip: Bipartition, eps, zero_cut: bool = False) -> str:
    if not bip.is_balanced(eps):
        return "unbalanced"
    return "zero-cut-preprocessing" if zero_cut else "ok"


# ---- algorithms -------------------------------------------------------------

def run_algorithm(h: Hypergraph, algorithm: str, eps: Fraction, seed: int,
                  time_limit: float | None, alpha=None, initial: np.ndarray | None = None):
    """Returns ``(bipartition or None, status, initial bipartition or None)``."""
    if algorithm == "baseline":
        bip = baseline_partition(h, eps, seed)
        return bip, _status(bip, eps), None
    if algorithm == "rebahfc":
        init = (Bipartition.from_assignment(h, initial, eps) if initial is not None
                else baseline_partition(h, eps, seed))
        try:
            bip = rebahfc(h, init, RefineConfig(alpha=alpha, epsilon=eps, seed=seed))
        except RefinementError:
            return None, "unbalanced", init
        return bip, _status(bip, eps), init
    m = re.fullmatch(r"hfc-(\d+|waves)", algorithm)
    if not m:
        raise UsageError(f"unknown algorithm {algorithm!r}")
    pairs = parse_pairs(m.group(1))
    if pairs == "waves":
        cfg = ExecutorConfig(time_limit=time_limit, seed=seed, epsilon=eps)
    else:
        cfg = ExecutorConfig.with_pairs(pairs, time_limit=time_limit, seed=seed, epsilon=eps)
    try:
        res = partition(h, cfg)
    except NoSolutionError:
        return None, "timeout", None
    return res.bipartition, _status(res.bipartition, eps, res.status == "zero-cut-preprocessing"), None


# ---- subcommands ------------------------------------------------------------

def _emit(args, name, algorithm, bip, status, wall, initial=None) -> None:
    rec = RunRecord.from_bipartition(name, algorithm, args.seed, args.epsilon_text, bip, status,
                                     wall if args.timing else None, initial)
    if bip is not None and args.output_partition:
        write_partition(bip.assignment, args.output_partition)
    if args.output_metrics:
        write_records([rec], args.output_metrics)
    if bip is None:
        print(f"{name}: {status}")
    else:
        extra = "" if initial is None else f" initial_cut={initial.cut_size}"
        print(f"{name}: cut={bip.cut_size} blocks={bip.block_sizes[0]}/{bip.block_sizes[1]}"
              f"{extra} status={status}")


def cmd_partition(args) -> int:
    h = _load(args.input)
    algorithm = f"hfc-{args.pairs}"
    t0 = time.perf_counter()
    bip, status, _ = run_algorithm(h, algorithm, args.epsilon, args.seed, args.time_limit)
    _emit(args, Path(args.input).stem, algorithm, bip, status, time.perf_counter() - t0)
    return {"timeout": EXIT_TIMEOUT, "unbalanced": EXIT_INFEASIBLE}.get(status, EXIT_OK)


def cmd_refine(args) -> int:
    h = _load(args.input)
    initial = None
    if args.initial_partition:
        if not os.path.isfile(args.initial_partition):
            raise UsageError(f"no such file: {args.initial_partition}")
        try:
            initial = read_partition(args.initial_partition, h.n)
        except FormatError as exc:
            raise UsageError(str(exc)) from None
    t0 = time.perf_counter()
    try:
        cfg = RefineConfig(alpha=args.alpha, epsilon=args.epsilon, pair_count=args.pairs, seed=args.seed)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    init = (Bipartition.from_assignment(h, initial, args.epsilon) if initial is not None
            else baseline_partition(h, args.epsilon, args.seed))
    if min(init.block_sizes) == 0:
        raise UsageError("initial partition has an empty block")
    try:
        bip = rebahfc(h, init, cfg)
        status = _status(bip, args.epsilon)
    except RefinementError:
        bip, status = None, "unbalanced"
    _emit(args, Path(args.input).stem, "rebahfc", bip, status, time.perf_counter() - t0, init)
    return EXIT_OK if status == "ok" else EXIT_INFEASIBLE


def cmd_evaluate(args) -> int:
    h = _load(args.input)
    if not os.path.isfile(args.partition):
        raise UsageError(f"no such file: {args.partition}")
    try:
        a = read_partition(args.partition, h.n)
    except FormatError as exc:
        raise UsageError(str(exc)) from None
    bip = Bipartition.from_assignment(h, a, args.epsilon)
    print(f"cut {bip.cut_size}")
    print(f"blocks {bip.block_sizes[0]} {bip.block_sizes[1]}")
    print(f"imbalance {bip.imbalance:.6f}")
    print(f"balanced {'yes' if bip.is_balanced() else 'no'} (epsilon {args.epsilon_text})")
    return EXIT_OK


def _bench_instance(job):
    path, algorithms, seeds, eps_text, time_limit, timing = job
    h = load_hmetis(path)
    eps = Fraction(eps_text)
    out = []
    for alg in algorithms:
        for seed in range(seeds):
            t0 = time.perf_counter()
            bip, status, init = run_algorithm(h, alg, eps, seed, time_limit)
            wall = time.perf_counter() - t0
            out.append(RunRecord.from_bipartition(Path(path).stem, alg, seed, eps_text, bip, status,
                                                  wall if timing else None, init))
    return out


def performance_ratios(records) -> list[tuple[str, str, float]]:
    """``(algorithm, instance, ratio)`` sorted by algorithm then increasing ratio.

    An algorithm's cut on an instance is its minimum over valid runs; runs that
    timed out or ended unbalanced do not count, and an algorithm without a
    valid run gets the sentinel ratio.
    """
    algs = sorted({r.algorithm for r in records})
    insts = sorted({r.instance for r in records})
    mins: dict[tuple[str, str], int] = {}
    for r in records:
        if r.status in ("ok", "zero-cut-preprocessing"):
            key = (r.algorithm, r.instance)
            mins[key] = min(int(r.cut), mins.get(key, math.inf))
    rows = []
    for inst in insts:
        valid = [mins[(a, inst)] for a in algs if (a, inst) in mins]
        best = min(valid) if valid else None
        for a in algs:
            cut = mins.get((a, inst))
            if cut is None:
                ratio = TIMEOUT_RATIO
            elif best == 0:
                ratio = 0.0 if cut == 0 else 1.0
            else:
                ratio = 1 - best / cut
            rows.append((a, inst, ratio))
    rows.sort(key=lambda r: (r[0], r[2], r[1]))
    return rows


def best_cuts(records) -> dict[str, int | None]:
    best: dict[str, int | None] = {}
    for r in records:
        best.setdefault(r.instance, None)
        if r.status in ("ok", "zero-cut-preprocessing"):
            c = int(r.cut)
            if best[r.instance] is None or c < best[r.instance]:
                best[r.instance] = c
    return dict(sorted(best.items()))


def geometric_mean_times(records) -> dict[str, float]:
    logs: dict[str, list[float]] = {}
    for r in records:
        if r.wall_time != "":
            logs.setdefault(r.algorithm, []).append(math.log(max(float(r.wall_time), 1e-9)))
    return {a: math.exp(sum(v) / len(v)) for a, v in sorted(logs.items())}


def cmd_bench(args) -> int:
    inst_dir = Path(args.instances)
    if not inst_dir.is_dir():
        raise UsageError(f"no such directory: {inst_dir}")
    paths = sorted(str(p) for p in inst_dir.glob("*.hgr"))
    if not paths:
        raise UsageError(f"no .hgr instances in {inst_dir}")
    algorithms = [a.strip() for a in args.algorithms.split(",") if a.strip()]
    for a in algorithms:
        if a not in ("baseline", "rebahfc") and not re.fullmatch(r"hfc-(\d+|waves)", a):
            raise UsageError(f"unknown algorithm {a!r}")
    for p in paths:
        _load(p)
    jobs = [(p, algorithms, args.seeds, args.epsilon_text, args.time_limit, args.timing) for p in paths]
    if args.jobs > 1:
        with ProcessPoolExecutor(args.jobs) as pool:
            results = list(pool.map(_bench_instance, jobs))
    else:
        results = [_bench_instance(j) for j in jobs]
    records = [r for chunk in results for r in chunk]

    out = Path(args.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    write_records(records, out / "runs.csv")
    with open(out / "best.csv", "w", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(["instance", "best_cut"])
        for inst, c in best_cuts(records).items():
            w.writerow([inst, "" if c is None else c])
    with open(out / "ratios.csv", "w", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(["algorithm", "instance", "ratio"])
        for a, inst, ratio in performance_ratios(records):
            w.writerow([a, inst, f"{ratio:.6f}"])
    if args.timing:
        with open(out / "times.csv", "w", newline="") as f:
            w = csv.writer(f, lineterminator="\n")
            w.writerow(["algorithm", "geomean_seconds"])
            for a, t in geometric_mean_times(records).items():
                w.writerow([a, f"{t:.6f}"])
    print(f"{len(records)} runs on {len(paths)} instances written to {out}")
    return EXIT_OK


# ---- parser -----------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="hfc", description="Balanced hypergraph bipartitioning with incremental max flows.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp, seed=True):
        sp.add_argument("--epsilon", type=parse_epsilon, default=Fraction(0), metavar="DECIMAL",
                        help="allowed imbalance, e.g. 0.03 (default 0)")
        if seed:
            sp.add_argument("--seed", type=int, default=0)
            sp.add_argument("--output-partition", metavar="FILE")
            sp.add_argument("--output-metrics", metavar="CSV")
            sp.add_argument("--timing", action="store_true",
                            help="fill the wall_time column (makes output run-dependent)")

    sp = sub.add_parser("partition", help="partition an hMETIS hypergraph")
    sp.add_argument("--input", required=True, metavar="HGR")
    sp.add_argument("--pairs", type=parse_pairs, default="waves",
                    help="number of terminal pairs in one wave, or 'waves' for the default schedule")
    sp.add_argument("--time-limit", type=float, default=None, metavar="SECONDS")
    common(sp)
    sp.set_defaults(func=cmd_partition)

    sp = sub.add_parser("refine", help="refine or rebalance an existing bipartition")
    sp.add_argument("--input", required=True, metavar="HGR")
    src = sp.add_mutually_exclusive_group(required=True)
    src.add_argument("--initial-partition", metavar="FILE")
    src.add_argument("--baseline", action="store_true", help="start from the built-in partitioner")
    sp.add_argument("--alpha", type=float, default=None,
                    help="relative size of the fixed block interiors (default depends on epsilon)")
    sp.add_argument("--pairs", type=int, default=5, help="number of runs from the same terminals")
    common(sp)
    sp.set_defaults(func=cmd_refine)

    sp = sub.add_parser("evaluate", help="report cut and balance of a partition file")
    sp.add_argument("--input", required=True, metavar="HGR")
    sp.add_argument("--partition", required=True, metavar="FILE")
    common(sp, seed=False)
    sp.set_defaults(func=cmd_evaluate)

    sp = sub.add_parser("bench", help="run algorithms over a directory of instances")
    sp.add_argument("--instances", required=True, metavar="DIR")
    sp.add_argument("--algorithms", default="hfc-waves,rebahfc",
                    help="comma separated: baseline, rebahfc, hfc-<q>, hfc-waves")
    sp.add_argument("--seeds", type=int, default=5)
    sp.add_argument("--time-limit", type=float, default=None, metavar="SECONDS")
    sp.add_argument("--output-dir", default="bench-out")
    sp.add_argument("--jobs", type=int, default=1)
    sp.add_argument("--timing", action="store_true")
    common(sp, seed=False)
    sp.set_defaults(func=cmd_bench)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    args.epsilon_text = decimal_text(args.epsilon)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"hfc: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
