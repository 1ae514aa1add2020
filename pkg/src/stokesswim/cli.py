"""``stokesswim`` command line.

Exit status: 0 when every check passes, 2 when a check fails, 1 on errors
(bad configuration, unwritable output, solver failure).
"""
from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from .config import ConfigError, default_config, load_config, render_config
from .errors import StokesSwimError
from .io import write_convergence_table, write_csv, write_csv_trajectory, write_resistance_csv, write_rotation_trace

log = logging.getLogger("stokesswim")


def _validate_stokes(cfg, out):
    from .validation import validate_stokes

    s = cfg["stokes"]
    rep = validate_stokes(s["levels"], s["order"], s["pattern"])
    write_convergence_table(rep.data["table"], out / "convergence.csv")
    return rep


def _validate_rigidbody(cfg, out):
    from .validation import validate_rigidbody

    rep = validate_rigidbody(**cfg["rigidbody"])
    write_rotation_trace(rep.data["trace"], out / "languski.csv")
    return rep


def _forces_bench(cfg, out):
    from .validation import bench_forces

    f = cfg["forces"]
    rep = bench_forces(f["levels"], f["disc_h"], f["disc_radius"])
    write_csv(out / "wrench_errors.csv", ["h", "err_surface", "err_volume"], rep.data["bercovier"])
    write_csv(out / "disc_symmetry.csv", ["target_h", "symmetry_defect"], rep.data["disc_symmetry"])
    return rep


def _simulate_scallop(cfg, out):
    from .validation import validate_scallop

    sim = cfg.simulation_config(snapshot_dir=str(out / "vtk"))
    rep = validate_scallop(sim)
    write_csv_trajectory(rep.data["trajectory"], out / "trajectory.csv")
    write_resistance_csv(rep.data["trajectory"], out / "resistance.csv")
    return rep


COMMANDS = {
    "validate-stokes": _validate_stokes,
    "validate-rigidbody": _validate_rigidbody,
    "forces-bench": _forces_bench,
    "simulate-scallop": _simulate_scallop,
}


def build_parser():
    parser = argparse.ArgumentParser(prog="stokesswim", description="Stokes swimmer solver and benchmarks.")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", type=Path, help="configuration file (defaults are used without one)")
        p.add_argument("--out", type=Path, help="output directory (overrides run.out)")
        p.add_argument("--verbose", "-v", action="store_true")
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        cfg = load_config(args.config) if args.config else default_config(args.command)
        if cfg.mode != args.command:
            raise ConfigError(f"config is for mode {cfg.mode!r}, not {args.command!r}")
        out = args.out or Path(cfg.out)
        out.mkdir(parents=True, exist_ok=True)
        (out / "config.ini").write_text(render_config(cfg))
        rep = COMMANDS[args.command](cfg, out)
    except (StokesSwimError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    for line in rep.lines():
        print(line)
    return 0 if rep.passed else 2


if __name__ == "__main__":
    sys.exit(main())
