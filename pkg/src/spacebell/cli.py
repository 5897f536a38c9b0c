"""Command-line entry point: ``spacebell --config sweep.cfg``.

Exit codes: 0 success, 1 configuration error, 2 I/O error.
"""
from __future__ import annotations

import argparse
import sys
from dataclasses import replace
from pathlib import Path

from .config import ConfigError, load_config
from .sweep import crossover_distance, run_sweep, write_outputs

EXIT_OK, EXIT_CONFIG, EXIT_IO = 0, 1, 2


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="spacebell", description="Sweep the Bell value over detector distance.")
    p.add_argument("--config", required=True, type=Path, help="key = value sweep configuration")
    p.add_argument("--out-csv", type=Path, help="CSV output path (overrides out_csv)")
    p.add_argument("--out-svg", type=Path, help="SVG output path (overrides out_svg)")
    p.add_argument("--seed", type=int, help="unsigned 64-bit Monte Carlo seed (overrides seed)")
    p.add_argument("--quiet", action="store_true", help="suppress the summary line")
    return p


def cli_entry(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config)
        if args.seed is not None:
            if not 0 <= args.seed < 2**64:
                raise ConfigError(f"--seed must be an unsigned 64-bit integer, got {args.seed}")
            cfg = replace(cfg, seed=args.seed)
    except ConfigError as exc:
        print(f"spacebell: config error in {args.config}: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"spacebell: cannot read config {args.config}: {exc.strerror or exc}", file=sys.stderr)
        return EXIT_IO

    records = run_sweep(cfg)
    try:
        write_outputs(records, cfg, args.out_csv or cfg.out_csv, args.out_svg or cfg.out_svg)
    except OSError as exc:
        print(f"spacebell: {exc.strerror} ({exc.filename})", file=sys.stderr)
        return EXIT_IO

    if not args.quiet:
        z_star = crossover_distance(records)
        cross = "none" if z_star is None else f"{z_star:.6g}"
        print(
            f"model={cfg.model.value} points={len(records)} final_bell_ratio={records[-1].bell_ratio:.6g} "
            f"crossover_z={cross}"
        )
    return EXIT_OK


def main() -> None:
    sys.exit(cli_entry())
