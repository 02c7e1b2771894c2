"""Command line entry point ``sim``.

    sim run <config-file> [--out PATH] [--method integrate|spectral]
    sim sweep <config-dir> [--jobs N] [--out-dir DIR]
    sim self-check
    sim --version

Exit codes: 0 success, 1 validation error, 2 numeric error, 3 self-check failure.
"""

from __future__ import annotations

import argparse
import logging
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from . import __version__
from .config import load_config
from .errors import ConfigError, NumericError

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_NUMERIC = 2
EXIT_SELFCHECK = 3

log = logging.getLogger("kerrcoupler")


def _output_path(config, config_path: Path, out, out_dir=None) -> Path:
    if out is not None:
        return Path(out)
    if config.output_path:
        p = Path(config.output_path)
        return p if p.is_absolute() else config_path.parent / p
    base = Path(out_dir) if out_dir is not None else config_path.parent
    return base / f"{config_path.stem}.csv"


def run_one(config_path, out=None, method=None, out_dir=None) -> Path:
    from .scenarios import run_scenario

    config_path = Path(config_path)
    config = load_config(config_path)
    if method is not None:
        config = config.with_overrides(method=method)
    target = _output_path(config, config_path, out, out_dir)
    # Re-running from a CSV must not overwrite the file being read.
    if target.resolve() == config_path.resolve():
        target = target.with_name(f"{target.stem}.rerun.csv")
    series = run_scenario(config)
    series.write_csv(target)
    return target


def _cmd_run(args) -> int:
    path = run_one(args.config, out=args.out, method=args.method)
    print(path)
    return EXIT_OK


def _sweep_worker(item):
    path, out_dir = item
    return str(run_one(path, out_dir=out_dir))


def _cmd_sweep(args) -> int:
    config_dir = Path(args.config_dir)
    if not config_dir.is_dir():
        raise ConfigError(f"{config_dir} is not a directory")
    paths = sorted(p for p in config_dir.iterdir() if p.suffix in (".cfg", ".conf", ".txt"))
    if not paths:
        raise ConfigError(f"no *.cfg files in {config_dir}")
    # Validate everything before computing anything.
    for p in paths:
        load_config(p)
    items = [(p, args.out_dir) for p in paths]
    if args.jobs > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            outputs = list(pool.map(_sweep_worker, items))
    else:
        outputs = [_sweep_worker(item) for item in items]
    for out in outputs:
        print(out)
    return EXIT_OK


def _cmd_self_check(args) -> int:
    from .selfcheck import run_all

    results = run_all(perturb_hamiltonian=args.perturb_hamiltonian)
    return EXIT_OK if all(c.passed for c in results) else EXIT_SELFCHECK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="sim", description="Kerr nonlinear coupler scenarios")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run one scenario config and write its CSV")
    p_run.add_argument("config", help="config file (or a CSV produced by a previous run)")
    p_run.add_argument("--out", help="output CSV path")
    p_run.add_argument("--method", choices=("integrate", "spectral"), help="master-equation method override")
    p_run.set_defaults(func=_cmd_run)

    p_sweep = sub.add_parser("sweep", help="run every *.cfg file in a directory")
    p_sweep.add_argument("config_dir")
    p_sweep.add_argument("--jobs", type=int, default=1, help="parallel worker processes")
    p_sweep.add_argument("--out-dir", help="directory for outputs without an explicit output_path")
    p_sweep.set_defaults(func=_cmd_sweep)

    p_check = sub.add_parser("self-check", help="run the acceptance criteria")
    p_check.add_argument("--perturb-hamiltonian", action="store_true", help=argparse.SUPPRESS)
    p_check.set_defaults(func=_cmd_self_check)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"sim: config error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except NumericError as exc:
        print(f"sim: numeric error ({type(exc).__name__}): {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
