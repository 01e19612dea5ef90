"""Command-line entry point: ``fasisac {solve,sweep-power,sweep-ports}``."""

from __future__ import annotations

import argparse
import logging
import sys

from . import kernels
from .ao import InfeasibleError, SolverFailure
from .config import DomainError, SystemConfig, load_config
from .harness import ExperimentSpec, run_port_sweep, run_power_sweep, run_single
from .metrics import check_feasibility

EXIT_OK, EXIT_INFEASIBLE, EXIT_IO, EXIT_NONCONVERGED = 0, 2, 3, 4
_NONCONVERGED = {"MAX_ITERS", "MAX_OUTER"}

log = logging.getLogger("fasisac")


def _values(text):
    return tuple(float(v) for v in text.split(",") if v.strip())


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="key = value config file (default: built-in reference scenario)")
    common.add_argument("--out", help="CSV output path (default: stdout)")
    common.add_argument("--seed", type=int, default=0, help="recorded for reproducibility; runs are deterministic")
    common.add_argument("--workers", type=int, default=1, help="parallel sweep points")
    common.add_argument("--verbose", action="store_true")
    common.add_argument("--max-outer", type=int, default=50, help="AO cycle cap")
    common.add_argument("--sweep-passes", type=int, default=1,
                        help="port-sweep passes per AO cycle (0: until no move)")

    p = argparse.ArgumentParser(prog="fasisac", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)
    s = sub.add_parser("solve", parents=[common], help="single AO run, writes the trace CSV")
    s.add_argument("--timing", action="store_true", help="add a wall-clock millis column (not reproducible)")
    sp = sub.add_parser("sweep-power", parents=[common], help="rate vs P_max, optimised and fixed ports")
    sp.add_argument("--values", type=_values, help="comma-separated P_max values in dBm")
    sm = sub.add_parser("sweep-ports", parents=[common], help="rate vs number of active ports")
    sm.add_argument("--values", type=_values, help="comma-separated m0 values")
    return p


def _emit(text, out):
    if out is None:
        sys.stdout.write(text)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)
    log.debug("kernel backend: %s", kernels.BACKEND)
    try:
        cfg = load_config(args.config) if args.config else SystemConfig()
    except OSError as exc:
        print(f"error: cannot read config: {exc}", file=sys.stderr)
        return EXIT_IO
    except DomainError as exc:
        print(f"error: invalid configuration: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE

    spec = ExperimentSpec(config=cfg, out=args.out, seed=args.seed, workers=max(1, args.workers),
                          max_outer=args.max_outer, sweep_passes=args.sweep_passes or None)
    try:
        if args.command == "solve":
            feas = check_feasibility(cfg)
            if not feas:
                print(f"error: infeasible configuration: {feas.message()}", file=sys.stderr)
                return EXIT_INFEASIBLE
            spec.timing = args.timing
            run = run_single(spec, verbose_stream=sys.stderr if args.verbose else None)
            _emit(run.csv, args.out)
            print(run.summary, file=sys.stderr if args.out is None else sys.stdout)
            return EXIT_NONCONVERGED if run.status in _NONCONVERGED else EXIT_OK

        if args.values:
            spec.values = args.values
        runner = run_power_sweep if args.command == "sweep-power" else run_port_sweep
        text, results = runner(spec)
        _emit(text, args.out)
        bad = [r.status for r in results if r.status in _NONCONVERGED]
        return EXIT_NONCONVERGED if bad else EXIT_OK
    except InfeasibleError as exc:
        print(f"error: infeasible configuration: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except DomainError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except SolverFailure as exc:
        print(f"error: solver failure: {exc}", file=sys.stderr)
        return EXIT_NONCONVERGED
    except OSError as exc:
        print(f"error: I/O: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
