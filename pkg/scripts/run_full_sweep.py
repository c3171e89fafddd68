#!/usr/bin/env python3
"""Production sweep over ground-station scenarios.

Four panels: ground altitude 0 m or 3000 m crossed with receiver aperture
radius 1 m or 4 m, each at 512x512 transverse resolution with 500 turbulence
draws and all supported dimensions. Expect a few hours total; panels land in
separate subdirectories so partial runs are usable.

Set SATMODES_CACHE_DIR to reuse ensembles between invocations.
"""

import argparse
import dataclasses
import sys
from pathlib import Path

from satmodes.config import RunConfig, save_config
from satmodes.sweep import run_sweep, write_csv, write_json, write_plot_data

PANELS = [
    {"h0": 0.0, "aperture_radius": 1.0},
    {"h0": 0.0, "aperture_radius": 4.0},
    {"h0": 3000.0, "aperture_radius": 1.0},
    {"h0": 3000.0, "aperture_radius": 4.0},
]


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", default="results_full")
    parser.add_argument("--seed", type=int, default=20260814)
    parser.add_argument("--realizations", type=int, default=500)
    args = parser.parse_args()

    for panel in PANELS:
        config = dataclasses.replace(RunConfig(), seed=args.seed,
                                     n_realizations=args.realizations, **panel)
        tag = f"h{int(panel['h0'])}_r{panel['aperture_radius']:g}"
        out = Path(args.out) / tag
        print(f"=== panel {tag} ===", file=sys.stderr)
        rows = run_sweep(config, progress=lambda m: print(m, file=sys.stderr))
        write_csv(rows, out / "rows.csv")
        write_json(rows, out / "rows.json")
        write_plot_data(rows, out)
        save_config(config, out / "run_config.ini")
        print(f"{len(rows)} rows -> {out}/")


if __name__ == "__main__":
    main()
