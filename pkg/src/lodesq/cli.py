"""Command line interface: ``lodesq {gen,measure,optimize,lattice}``.

Exit codes: 0 success, 1 usage error, 2 numerical or degeneracy failure,
3 budget exceeded.
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import re
import sys
import time

from .core import (
    BudgetExceededError,
    DegenerateSetError,
    InvalidArgumentError,
    LodesqError,
    ParseError,
    load_points_csv,
    save_points_csv,
    torus_displacement,
)
from .discrepancy import quality_report
from .energy import DegenerateCoordinateError, partition_count
from .generators import GeneratorSpec, UnsupportedDimensionError, generate
from .lattice import coprime_pairs, lattice_report, write_report_csv
from .optimizer import (
    OptimizerConfig,
    UnrepairableSetError,
    jitter_degenerate,
    optimize,
    write_trace_csv,
)

logger = logging.getLogger("lodesq")

EXIT_OK, EXIT_USAGE, EXIT_NUMERIC, EXIT_BUDGET = 0, 1, 2, 3
CRITICALITY_TOLERANCE = 1e-9

_CONSTANTS = {"pi": math.pi, "e": math.e}
_SQRT = re.compile(r"^sqrt\(?([^()]+)\)?$")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def parse_real(token: str) -> float:
    """A float literal, ``pi``, ``e``, or ``sqrt(<value>)`` / ``sqrt<value>``."""
    tok = token.strip().lower()
    m = _SQRT.match(tok)
    if m:
        return math.sqrt(parse_real(m.group(1)))
    if tok in _CONSTANTS:
        return _CONSTANTS[tok]
    return float(tok)


def _param_list(raw: str | None):
    if not raw:
        return ()
    try:
        return tuple(parse_real(t) for t in raw.split(","))
    except ValueError:
        raise UsageError(f"--params: cannot parse {raw!r}") from None


def _int_params(values, kind):
    out = []
    for v in values:
        if v != int(v):
            raise UsageError(f"--params: {kind} expects integers, got {v}")
        out.append(int(v))
    return tuple(out)


def cmd_gen(args) -> int:
    if args.n < 1:
        raise UsageError("--n must be a positive integer")
    params = _param_list(args.params)
    kind = {"vdc": "van_der_corput"}.get(args.kind, args.kind)
    if kind != "kronecker":
        params = _int_params(params, kind)
    spec = GeneratorSpec(kind, args.n, params, dim=args.dim,
                         start_index=args.start_index, seed=args.seed,
                         inverse_offset=args.inverse_offset)
    try:
        X = generate(spec)
    except UnsupportedDimensionError as exc:
        raise UsageError(f"--dim: {exc}") from None
    except InvalidArgumentError as exc:
        raise UsageError(f"--params: {exc}") from None
    save_points_csv(X, args.out)
    print(json.dumps({"kind": spec.kind, "n": X.n_points, "d": X.dim}))
    return EXIT_OK


def _metric_list(raw):
    names = [m.strip() for m in raw.split(",") if m.strip()]
    unknown = set(names) - {"star", "l2", "energy", "etk"}
    if unknown or not names:
        raise UsageError(f"--metrics: unknown metric(s) {sorted(unknown)}")
    return names


def cmd_measure(args) -> int:
    metrics = _metric_list(args.metrics)
    X = load_points_csv(args.input)
    report = quality_report(X, metrics=metrics, etk_M=args.etk_m,
                            n_anchors=args.anchors, seed=args.seed)
    out = {k: v for k, v in report.as_dict().items() if v is not None}
    if "star" not in metrics:
        out.pop("star_disc_exact")
    if args.json:
        print(json.dumps(out, sort_keys=True))
    else:
        for key, value in out.items():
            suffix = ""
            if key == "star_disc" and not report.star_disc_exact:
                suffix = "  (sampled lower bound)"
            print(f"{key:16s} {value}{suffix}")
    return EXIT_OK


def cmd_optimize(args) -> int:
    cfg = OptimizerConfig(
        alpha=args.alpha,
        max_iters=args.iters,
        grad_tolerance=args.grad_tolerance,
        min_separation=args.min_separation,
        jitter=args.jitter,
        adaptive=args.adaptive,
        trace_every=args.trace_every,
        seed=args.seed,
    )
    X = load_points_csv(args.input)
    start = time.perf_counter()
    X0 = jitter_degenerate(X, cfg)
    if X0 is not X:
        logger.warning("input set has coincident coordinates; jittered before descent")
    initial = quality_report(X0, metrics=("energy", "star", "l2"), seed=args.seed)
    Y, trace = optimize(X, cfg)
    final = quality_report(Y, metrics=("energy", "star", "l2"), seed=args.seed)
    wall = time.perf_counter() - start

    save_points_csv(Y, args.out)
    if args.trace:
        write_trace_csv(trace, args.trace)
    summary = {
        "config": {
            "command": "optimize",
            "in": args.input,
            "out": args.out,
            "trace": args.trace,
            **cfg.as_dict(),
        },
        "initial": initial.as_dict(),
        "final": final.as_dict(),
        "iterations": trace[-1].iter,
        "max_displacement": torus_displacement(X, Y),
        "wall_time_s": wall,
    }
    text = json.dumps(summary, indent=2, sort_keys=True)
    if args.summary:
        with open(args.summary, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    else:
        print(text)
    return EXIT_OK


def cmd_lattice(args) -> int:
    if args.sweep:
        if args.n_max is None or args.n_max < 2:
            raise UsageError("--n-max must be an integer >= 2 with --sweep")
        pairs = list(coprime_pairs(args.n_max))
    else:
        if args.n is None or args.a is None:
            raise UsageError("either --n and --a, or --sweep --n-max, are required")
        if args.n < 2 or math.gcd(args.a, args.n) != 1:
            logger.warning("skipping (n=%d, a=%d): not a valid coprime pair", args.n, args.a)
            pairs = []
        else:
            pairs = [(args.n, args.a)]

    reports, failed = [], []
    for n, a in pairs:
        r = lattice_report(n, a)
        reports.append(r)
        if r.grad_residual > CRITICALITY_TOLERANCE:
            failed.append(f"(n={n}, a={a}) gradient residual {r.grad_residual:.3g}")
        if r.involution and not r.second_order_ok:
            failed.append(f"(n={n}, a={a}) second-order inequality fails for an involution")

    if args.out:
        write_report_csv(reports, args.out)
    else:
        write_report_csv(reports, sys.stdout)
    for msg in failed:
        logger.error("assertion failed: %s", msg)
    return EXIT_NUMERIC if failed else EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="lodesq", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    g = sub.add_parser("gen", help="generate a point set")
    g.add_argument("--kind", required=True,
                   choices=["halton", "hammersley", "kronecker", "lattice", "sobol", "random", "vdc"])
    g.add_argument("--params", help="comma list: bases, lattice multiplier, or Kronecker alphas "
                                    "(accepts pi, e, sqrt(x))")
    g.add_argument("--n", type=int, required=True)
    g.add_argument("--dim", type=int, help="dimension for sobol/random")
    g.add_argument("--start-index", type=int)
    g.add_argument("--inverse-offset", type=int, default=0,
                   help="hammersley only: evaluate radical inverses at n + offset")
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--out", required=True)
    g.set_defaults(func=cmd_gen)

    m = sub.add_parser("measure", help="report discrepancies and energy of a point set")
    m.add_argument("--in", dest="input", required=True)
    m.add_argument("--metrics", default="star,l2,energy,etk")
    m.add_argument("--etk-m", type=int, help="ETK frequency cutoff (default N)")
    m.add_argument("--anchors", type=int, default=100_000,
                   help="anchors for the sampled star discrepancy fallback")
    m.add_argument("--seed", type=int, default=0)
    m.add_argument("--json", action="store_true")
    m.set_defaults(func=cmd_measure)

    o = sub.add_parser("optimize", help="run gradient descent on the energy")
    o.add_argument("--in", dest="input", required=True)
    o.add_argument("--out", required=True)
    o.add_argument("--alpha", type=float, default=1e-5)
    o.add_argument("--iters", type=int, default=200)
    o.add_argument("--adaptive", action="store_true")
    o.add_argument("--grad-tolerance", type=float, default=1e-9)
    o.add_argument("--min-separation", type=float, default=1e-12)
    o.add_argument("--jitter", type=float, default=1e-9)
    o.add_argument("--trace")
    o.add_argument("--trace-every", type=int, default=10)
    o.add_argument("--summary", help="write the summary JSON here instead of stdout")
    o.add_argument("--seed", type=int, default=0)
    o.set_defaults(func=cmd_optimize)

    lat = sub.add_parser("lattice", help="verify lattice-rule criticality and second-order sums")
    lat.add_argument("--n", type=int)
    lat.add_argument("--a", type=int)
    lat.add_argument("--sweep", action="store_true")
    lat.add_argument("--n-max", type=int)
    lat.add_argument("--out")
    lat.set_defaults(func=cmd_lattice)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s: %(message)s", stream=sys.stderr)
    try:
        partition_count()
        return args.func(args)
    except (UsageError, ParseError, FileNotFoundError, IsADirectoryError) as exc:
        print(f"lodesq {args.command}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except BudgetExceededError as exc:
        print(f"lodesq {args.command}: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except (DegenerateSetError, DegenerateCoordinateError, UnrepairableSetError) as exc:
        print(f"lodesq {args.command}: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except InvalidArgumentError as exc:
        print(f"lodesq {args.command}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except LodesqError as exc:
        print(f"lodesq {args.command}: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
