"""Command-line interface.

Subcommands:
  estimate {xi|zeta|lambda|tau|heights}  seeded Monte Carlo on cubes
  exact --graph FILE --checks ...        exact counts/identities on one graph
  verify [--fuzz N --max-edges M]        the exact-identity suite
  theorem --xi RATIONAL --dim D          closed-form values from xi

Exit codes: 0 success, 2 verification failure, 3 bad configuration.
All output is a deterministic function of the arguments.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

from .formulas import theorem_values
from .graph import from_edge_list_text
from .harness import (ExperimentConfig, report_to_csv, report_to_json,
                      run_experiment)
from .verify import run_verification_suite

EXIT_OK = 0
EXIT_VERIFY_FAILED = 2
EXIT_BAD_CONFIG = 3

EXACT_CHECKS = ("kappa", "u", "tutte", "merino", "mean-height", "expected-cycle")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.exit(EXIT_BAD_CONFIG, f"{self.prog}: error: {message}\n")


def build_parser() -> _Parser:
    p = _Parser(prog="loopstats")
    sub = p.add_subparsers(dest="command", required=True)

    est = sub.add_parser("estimate", help="seeded Monte Carlo estimates on cubes")
    est.add_argument("statistic", choices=["xi", "zeta", "lambda", "tau", "heights"])
    est.add_argument("--dim", type=int, default=2)
    est.add_argument("--radius", type=str, default="8",
                     help="comma-separated cube radii, e.g. 16,32,64")
    est.add_argument("--samples", type=int, required=True)
    est.add_argument("--seed", type=int, required=True)
    est.add_argument("--workers", type=int, default=1)
    est.add_argument("--format", choices=["json", "csv"], default="json")
    est.add_argument("--estimator", choices=["forest", "lerw"], default="forest",
                     help="xi only: which estimator")
    est.add_argument("--draw-log", type=str, default=None,
                     help="lambda only: write per-draw csv seed,draw_index,cycle_length")

    ex = sub.add_parser("exact", help="exact checks on an edge-list file")
    ex.add_argument("--graph", required=True)
    ex.add_argument("--checks", default="kappa,u",
                    help=f"comma list from {','.join(EXACT_CHECKS)}")

    ver = sub.add_parser("verify", help="run the exact-identity suite")
    ver.add_argument("--fuzz", type=int, default=200)
    ver.add_argument("--max-edges", type=int, default=12)
    ver.add_argument("--seed", type=int, default=20251221)

    th = sub.add_parser("theorem", help="closed-form values from xi")
    th.add_argument("--xi", required=True, help="rational, e.g. 5/4")
    th.add_argument("--dim", type=int, required=True)
    return p


def _cmd_estimate(args) -> int:
    try:
        radii = tuple(int(tok) for tok in args.radius.split(","))
        config = ExperimentConfig(
            statistic=args.statistic, dimension=args.dim, radii=radii,
            samples=args.samples, seed=args.seed, workers=args.workers,
            fmt=args.format, estimator=args.estimator)
    except ValueError as exc:
        print(f"loopstats: bad configuration: {exc}", file=sys.stderr)
        return EXIT_BAD_CONFIG
    report = run_experiment(config)
    if args.draw_log and args.statistic == "lambda":
        _write_draw_log(args, config)
    out = report_to_json(report) if config.fmt == "json" else report_to_csv(report)
    sys.stdout.write(out)
    return EXIT_OK


def _write_draw_log(args, config: ExperimentConfig):
    """Per-draw cycle lengths for the first configured radius."""
    from .graph import collapse_boundary
    from .lattice import build_cube_region
    from .unicycle import sample_ustplus
    from .rng import RandomStream

    g = collapse_boundary(build_cube_region(config.dimension, config.radii[0]))
    stream = RandomStream(config.seed)
    lines = ["seed,draw_index,cycle_length"]
    for i in range(config.samples):
        uni = sample_ustplus(g, stream.split(i))
        lines.append(f"{config.seed},{i},{uni.cycle_length}")
    with open(args.draw_log, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def _cmd_exact(args) -> int:
    from .spanning import spanning_tree_count, unicycle_count
    from .tutte import (TutteCapExceeded, mean_height_identity_check,
                        merino_check, tutte_polynomial)
    from .unicycle import exact_expected_cycle

    try:
        with open(args.graph) as fh:
            g = from_edge_list_text(fh.read())
    except (OSError, ValueError) as exc:
        print(f"loopstats: cannot load graph: {exc}", file=sys.stderr)
        return EXIT_BAD_CONFIG
    checks = [tok.strip() for tok in args.checks.split(",") if tok.strip()]
    bad = [c for c in checks if c not in EXACT_CHECKS]
    if bad:
        print(f"loopstats: unknown checks: {','.join(bad)}", file=sys.stderr)
        return EXIT_BAD_CONFIG
    out = {}
    failed = False
    try:
        for c in checks:
            if c == "kappa":
                out["kappa"] = spanning_tree_count(g)
            elif c == "u":
                out["u"] = unicycle_count(g)
            elif c == "tutte":
                out["tutte"] = tutte_polynomial(g).to_json_map()
            elif c == "merino":
                ok, detail = merino_check(g)
                out["merino"] = {"ok": ok}
                failed |= not ok
            elif c == "mean-height":
                ok, detail = mean_height_identity_check(g)
                out["mean-height"] = {
                    "ok": ok,
                    "mean": str(detail["direct_mean"]),
                }
                failed |= not ok
            elif c == "expected-cycle":
                out["expected-cycle"] = str(exact_expected_cycle(g))
    except (TutteCapExceeded, ValueError) as exc:
        print(f"loopstats: {exc}", file=sys.stderr)
        return EXIT_BAD_CONFIG
    sys.stdout.write(json.dumps(out, indent=2) + "\n")
    return EXIT_VERIFY_FAILED if failed else EXIT_OK


def _cmd_verify(args) -> int:
    if args.fuzz < 0 or args.max_edges < 1:
        print("loopstats: bad configuration", file=sys.stderr)
        return EXIT_BAD_CONFIG
    report = run_verification_suite(fuzz=args.fuzz, max_edges=args.max_edges,
                                    seed=args.seed)
    sys.stdout.write(report.text())
    return EXIT_OK if report.ok else EXIT_VERIFY_FAILED


def _cmd_theorem(args) -> int:
    try:
        xi = Fraction(args.xi)
        vals = theorem_values(xi, args.dim)
    except (ValueError, ZeroDivisionError) as exc:
        print(f"loopstats: bad configuration: {exc}", file=sys.stderr)
        return EXIT_BAD_CONFIG
    out = {
        "xi": str(vals.xi),
        "dim": vals.d,
        "tau": str(vals.tau),
        "zeta": str(vals.zeta),
        "lambda": str(vals.lam),
    }
    sys.stdout.write(json.dumps(out, indent=2) + "\n")
    return EXIT_OK


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "estimate":
        return _cmd_estimate(args)
    if args.command == "exact":
        return _cmd_exact(args)
    if args.command == "verify":
        return _cmd_verify(args)
    if args.command == "theorem":
        return _cmd_theorem(args)
    return EXIT_BAD_CONFIG


if __name__ == "__main__":
    sys.exit(main())
