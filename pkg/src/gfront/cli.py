"""Command line: ``gfront run``, ``gfront sweep``, ``gfront check``.

Exit codes: 0 success, 1 configuration error, 2 numerical failure.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from .config import ConfigError, RunSpec, SweepSpec, parse_config
from .diagnostics import DiagnosticsError, speed_record
from .integrator import NumericalError

EXIT_OK, EXIT_CONFIG, EXIT_NUMERICAL = 0, 1, 2


def _load(path: str | None):
    text = Path(path).read_text() if path else ""
    return parse_config(text)


def cmd_run(args) -> int:
    from .harness import measure

    spec = _load(args.config)
    if isinstance(spec, SweepSpec):
        raise ConfigError("config describes a sweep; use `gfront sweep`")
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    result = measure(spec, checkpoint_dir=out if args.snapshots else None, snapshots=args.snapshots)
    result.history.write(out / "history.csv")
    cfg = spec.solver
    omega = cfg.flow.omega if cfg.flow.period is not None else None
    record = speed_record(cfg.flow.A, omega, cfg.d_M, cfg.model, result.report)
    (out / "report.txt").write_text(
        "# A,omega,d_M,model,s_T,stderr,quenched,N,M\n" + record + "\n"
        + f"# regime: {result.regime.value}\n# area_behind_front: {result.area_behind:.17g}\n"
    )
    print(record)
    print(f"regime={result.regime.value} t_final={result.history.samples[-1][0]:g}")
    return EXIT_OK


def cmd_sweep(args) -> int:
    from dataclasses import replace

    from .harness import emit_results, run_sweep

    spec = _load(args.config)
    if isinstance(spec, RunSpec):
        raise ConfigError("config has no sweep=A|omega key")
    if args.workers is not None:
        spec = replace(spec, workers=args.workers)
    result = run_sweep(spec)
    for p in emit_results(result, args.out):
        print(p)
    failed = [r for r in result.rows if r.error]
    for r in failed:
        print(f"row {r.value:g} failed: {r.error}", file=sys.stderr)
    return EXIT_NUMERICAL if failed and len(failed) == len(result.rows) else EXIT_OK


def cmd_check(args) -> int:
    from .checks import run_checks

    results = run_checks(samples=args.samples)
    for r in results:
        print(r.line())
    return EXIT_OK if all(r.passed for r in results) else EXIT_NUMERICAL


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="gfront", description="G-equation front solver for cellular flows.")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="single simulation")
    p.add_argument("--config", help="key=value config file (defaults if omitted)")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--snapshots", type=int, default=0, help="number of field checkpoints to write")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("sweep", help="parameter sweep over A or omega")
    p.add_argument("--config", required=True)
    p.add_argument("--out", required=True, help="result record file")
    p.add_argument("--workers", type=int, default=None)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("check", help="run the invariant/property suites")
    p.add_argument("--samples", type=int, default=100_000)
    p.set_defaults(func=cmd_check)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (ConfigError, OSError) as e:
        print(f"config error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except (NumericalError, DiagnosticsError) as e:
        print(f"numerical failure: {e}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
