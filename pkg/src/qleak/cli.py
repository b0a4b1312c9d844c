"""Command-line entry point: ``qleak sweep | snr-grid | verify``.

Exit codes: 0 success, 2 configuration error, 3 I/O error, 4 verification failure.
"""
from __future__ import annotations

import argparse
import logging
import os
import sys
from dataclasses import replace

from . import __version__, verify
from .config import ConfigError, GridConfig, SweepConfig, build_reset, grid_base_reset, load_config
from .experiment import ExperimentConfig, resolve_threads, run_snr_grid, run_sweep
from .export import GRID_COLUMNS, SWEEP_COLUMNS, grid_rows, sweep_rows, utc_now, write_csv, write_manifest

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_IO = 3
EXIT_VERIFY = 4

QUICK_SHOTS = 1_000
QUICK_EXPERIMENTS = 3

log = logging.getLogger("qleak")


def _prepare(args, model):
    cfg = load_config(args.config, model)
    updates = {}
    if args.seed is not None:
        updates["master_seed"] = args.seed
    if args.quick:
        updates["n_shots"] = min(cfg.n_shots, QUICK_SHOTS)
        updates["n_experiments"] = min(cfg.n_experiments, QUICK_EXPERIMENTS)
    return cfg.model_copy(update=updates)


def _ensure_out(path: str) -> None:
    os.makedirs(path, exist_ok=True)
    if not os.access(path, os.W_OK):
        raise OSError(f"output directory {path!r} is not writable")


def cmd_sweep(args) -> int:
    cfg = _prepare(args, SweepConfig)
    reset = build_reset(cfg.reset)
    _ensure_out(args.out)
    started = utc_now()
    sweeps = []
    cells = [(otp, axis) for otp in cfg.otp_schemes for axis in cfg.attacker_axis]
    for stream, (otp, axis) in enumerate(cells):
        template = ExperimentConfig(alpha=0.0, reset=reset, otp=otp, victim_axis=cfg.victim_axis,
                                    attacker_axis=axis, n_shots=cfg.n_shots,
                                    n_experiments=cfg.n_experiments, master_seed=cfg.master_seed,
                                    otp_mode=cfg.otp_mode)
        log.info("sweep %s / attacker %s", otp.kind, axis)
        sweeps.append(run_sweep(template, cfg.alphas, threads=args.threads, stream=stream))
    csv_path = os.path.join(args.out, "sweep.csv")
    write_csv(csv_path, SWEEP_COLUMNS, sweep_rows(sweeps))
    write_manifest(os.path.join(args.out, "sweep_manifest.json"), command="sweep",
                   config=cfg.model_dump(), version=__version__, master_seed=cfg.master_seed,
                   started_at=started, finished_at=utc_now(), outputs=[csv_path],
                   threads=resolve_threads(args.threads))
    print(f"wrote {csv_path}")
    return EXIT_OK


def cmd_snr_grid(args) -> int:
    cfg = _prepare(args, GridConfig)
    base = grid_base_reset(cfg)
    _ensure_out(args.out)
    started = utc_now()
    g = cfg.grid
    result = run_snr_grid(
        base,
        (g.param1.name, g.param1.values),
        (g.param2.name, g.param2.values) if g.param2 else None,
        cfg.otp_schemes, cfg.attacker_axis,
        alphas=cfg.alphas, victim_axis=cfg.victim_axis, n_shots=cfg.n_shots,
        n_experiments=cfg.n_experiments, master_seed=cfg.master_seed, threads=args.threads,
    )
    csv_path = os.path.join(args.out, "snr_grid.csv")
    write_csv(csv_path, GRID_COLUMNS, grid_rows(result))
    write_manifest(os.path.join(args.out, "snr_grid_manifest.json"), command="snr-grid",
                   config=cfg.model_dump(), version=__version__, master_seed=cfg.master_seed,
                   started_at=started, finished_at=utc_now(), outputs=[csv_path],
                   threads=resolve_threads(args.threads))
    print(f"wrote {csv_path}")
    return EXIT_OK


def cmd_verify(args) -> int:
    results = verify.run_checks(quick=args.quick, threads=args.threads)
    for r in results:
        print(r.line())
    failed = [r.name for r in results if not r.passed]
    if failed:
        print(f"verification FAILED: {', '.join(failed)}")
        return EXIT_VERIFY
    print("verification passed")
    return EXIT_OK


def _u64(text: str) -> int:
    v = int(text, 0)
    if not 0 <= v < 2**64:
        raise argparse.ArgumentTypeError("seed must be an unsigned 64-bit integer")
    return v


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qleak", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--threads", type=int, default=1, help="worker threads (0 = one per CPU)")
    common.add_argument("--quick", action="store_true", help="reduced shot counts for smoke runs")

    for name, fn, helptext in (("sweep", cmd_sweep, "P(-1) versus victim angle"),
                               ("snr-grid", cmd_snr_grid, "SNR over a grid of error rates")):
        p = sub.add_parser(name, parents=[common], help=helptext)
        p.add_argument("--config", required=True, help="JSON run configuration")
        p.add_argument("--out", required=True, help="output directory")
        p.add_argument("--seed", type=_u64, default=None, help="override master_seed")
        p.set_defaults(func=fn)

    p = sub.add_parser("verify", parents=[common], help="run the built-in consistency checks")
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error in {getattr(args, 'config', '?')}:\n{exc}", file=sys.stderr)
        return EXIT_CONFIG
    except FileNotFoundError as exc:
        if getattr(args, "config", None) and exc.filename == args.config:
            print(f"config error: cannot read {args.config}", file=sys.stderr)
            return EXIT_CONFIG
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
