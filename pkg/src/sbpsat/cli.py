"""Command line front end: ``sbpsat run | verify-operators | energy-audit | derive-operators``."""

from __future__ import annotations

import argparse
import contextlib
import json
import logging
import sys
from pathlib import Path

import numpy as np
from threadpoolctl import threadpool_limits

from sbpsat.errors import ConfigurationError, DerivationError, MediaError, NumericalError

EXIT_OK = 0
EXIT_IO = 1
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3
EXIT_VERIFY = 4

log = logging.getLogger("sbpsat")


def _seed(text: str) -> int:
    value = int(text)
    if not 0 <= value < 2 ** 64:
        raise argparse.ArgumentTypeError(f"seed must be an unsigned 64-bit integer, got {text}")
    return value


def _positive(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return value


def cmd_run(args) -> int:
    from sbpsat.config import load_config
    from sbpsat.simulation import run_simulation, write_result

    config = load_config(args.config)
    result = run_simulation(config, seed=args.seed)
    out_dir = Path(args.output or config.outputs.dir)
    written = write_result(result, out_dir)
    print(result.cfl.message())
    print(f"steps: {result.time.n_steps}")
    print(f"wall time: {result.wall_time:.3f} s")
    print(f"final e_total: {result.final_energy:.17g}")
    for path in written:
        print(f"wrote {path}")
    return EXIT_OK


def cmd_verify_operators(args) -> int:
    from sbpsat.operators1d import (MIN_BOUNDED_POINTS, MIN_PERIODIC_POINTS, build_periodic_ops,
                                    derive_bounded_ops, derive_bounded_tables, verify_ops)
    from sbpsat.transfer import MIN_COARSE_POINTS, build_transfer_pair, verify_transfer_pair

    for n in args.sizes:
        if n < MIN_BOUNDED_POINTS:
            raise ConfigurationError(f"bounded size {n} is below the minimum {MIN_BOUNDED_POINTS}")
    for n in args.periodic_sizes:
        if n < MIN_PERIODIC_POINTS:
            raise ConfigurationError(f"periodic size {n} is below the minimum {MIN_PERIODIC_POINTS}")
    for n in args.transfer_sizes:
        if n < MIN_COARSE_POINTS:
            raise ConfigurationError(f"transfer size {n} is below the minimum {MIN_COARSE_POINTS}")

    reports = []
    ok = True
    for n in args.periodic_sizes:
        rep = verify_ops(build_periodic_ops(n, 1.0 / n))
        reports.append(rep.to_dict())
        ok &= rep.all_pass
        print(f"periodic n={n}: identity residual {rep.identity_residual:.3e} "
              f"{'PASS' if rep.all_pass else 'FAIL'}")
    for n in args.sizes:
        ops = derive_bounded_ops(n, 1.0 / (n - 1), args.qb, args.qp)
        rep = verify_ops(ops)
        reports.append(rep.to_dict())
        ok &= rep.all_pass
        print(f"bounded nN={n} (q_b={ops.q_b}, q_p={ops.q_p}): identity residual "
              f"{rep.identity_residual:.3e} {'PASS' if rep.all_pass else 'FAIL'}")
        for name, passed in rep.checks.items():
            if not passed:
                print(f"  failed: {name}")
    tables = derive_bounded_tables(args.qb, args.qp)
    if args.sizes:
        ladder = ", ".join(f"({b},{p}) {why}" for b, p, why in tables.ladder)
        print(f"closure ladder: {ladder}")
        if tables.fallback_used:
            print(f"ladder fallback used: requested (q_b={args.qb}, q_p={args.qp}), "
                  f"got (q_b={tables.q_b}, q_p={tables.q_p})")
    for nc in args.transfer_sizes:
        pair = build_transfer_pair(nc, 2 * nc, 2.0 / nc, 1.0 / nc)
        checks = verify_transfer_pair(pair)
        passed = all(checks.values())
        ok &= passed
        reports.append({"kind": "transfer", "nc": nc, "checks": checks,
                        "adjoint_residual": pair.adjoint_residual()})
        print(f"transfer 1:2 nc={nc}: adjoint residual {pair.adjoint_residual():.3e} "
              f"{'PASS' if passed else 'FAIL'}")
    if args.json:
        Path(args.json).write_text(json.dumps(reports, indent=2, default=str) + "\n")
    print("all checks passed" if ok else "verification FAILED")
    return EXIT_OK if ok else EXIT_VERIFY


def cmd_energy_audit(args) -> int:
    from sbpsat.config import load_config
    from sbpsat.diagnostics import audit_energy
    from sbpsat.simulation import build_layout

    config = load_config(args.config)
    layout = build_layout(config)
    cases = audit_energy(layout, args.n_random, np.random.default_rng(args.seed))
    ok = True
    for case in cases:
        if case.conserving:
            verdict = "PASS" if case.passed() else "FAIL"
            ok &= case.passed()
            print(f"{case.name}: max |dE/dt|/max(1,E) = {case.max_rate:.3e} {verdict}")
        else:
            agree = "matches" if case.passed() else "DOES NOT match"
            print(f"{case.name}: max |dE/dt|/max(1,E) = {case.max_rate:.3e}, "
                  f"{agree} edge flux oracle (rel. mismatch {case.max_oracle_mismatch:.3e})")
    return EXIT_OK if ok else EXIT_VERIFY


def cmd_derive_operators(args) -> int:
    from sbpsat.operators1d import derive_bounded_tables, dump_rational_tables

    tables = derive_bounded_tables(args.qb, args.qp)
    text = dump_rational_tables(tables)
    if args.output:
        Path(args.output).write_text(text)
        print(f"wrote {args.output}")
    else:
        sys.stdout.write(text)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sbpsat",
        description="Energy-conserving elastic wave simulation on stacked staggered grids.")
    parser.add_argument("--threads", type=_positive, default=None,
                        help="limit numerical library threads (default: all available)")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run a simulation and write energy and seismogram CSVs")
    run.add_argument("--config", required=True)
    run.add_argument("--output", help="output directory (overrides outputs.dir)")
    run.add_argument("--seed", type=_seed, default=0, help="seed for a random initial state")
    run.set_defaults(func=cmd_run)

    ver = sub.add_parser("verify-operators", help="check operator and transfer identities")
    ver.add_argument("--sizes", type=int, nargs="*", default=[9, 17, 33],
                     help="bounded operator point counts")
    ver.add_argument("--periodic-sizes", type=int, nargs="*", default=[8, 16, 32])
    ver.add_argument("--transfer-sizes", type=int, nargs="*", default=[8, 16])
    ver.add_argument("--qb", type=int, default=2, help="requested boundary accuracy")
    ver.add_argument("--qp", type=int, default=2, help="requested projection accuracy")
    ver.add_argument("--json", help="also write the full report to this file")
    ver.set_defaults(func=cmd_verify_operators)

    audit = sub.add_parser("energy-audit", help="energy rate on random states")
    audit.add_argument("--config", required=True)
    audit.add_argument("--n-random", type=int, default=100)
    audit.add_argument("--seed", type=_seed, default=0)
    audit.set_defaults(func=cmd_energy_audit)

    derive = sub.add_parser("derive-operators", help="print the rational boundary closure")
    derive.add_argument("--qb", type=int, default=2)
    derive.add_argument("--qp", type=int, default=2)
    derive.add_argument("--output", help="write the tables to this file")
    derive.set_defaults(func=cmd_derive_operators)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s: %(message)s")
    limits = (threadpool_limits(limits=args.threads) if args.threads
              else contextlib.nullcontext())
    with limits:
        try:
            return args.func(args)
        except (ConfigurationError, MediaError) as exc:
            print(f"configuration error: {exc}", file=sys.stderr)
            return EXIT_CONFIG
        except NumericalError as exc:
            print(f"numerical failure: {exc}; reduce dt", file=sys.stderr)
            return EXIT_NUMERICAL
        except DerivationError as exc:
            print(f"operator derivation failed: {exc}", file=sys.stderr)
            return EXIT_VERIFY
        except OSError as exc:
            print(f"I/O error: {exc}", file=sys.stderr)
            return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
