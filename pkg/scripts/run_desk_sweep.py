#!/usr/bin/env python3
"""Desk-scale sweep: coarse transverse grid, 50 ensemble draws, d in {2,4,8}.

Runs in about a minute on a laptop and produces the same tables as the full
run, just noisier. Good for checking the pipeline end to end.
"""

import argparse
import sys
from pathlib import Path

from satmodes.config import desk_scale_config, save_config
from satmodes.sweep import run_sweep, write_csv, write_json, write_plot_data


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", default="results_desk", help="output directory")
    parser.add_argument("--seed", type=int, default=7)
    args = parser.parse_args()

    config = desk_scale_config(seed=args.seed)
    rows = run_sweep(config, progress=lambda m: print(m, file=sys.stderr))
    out = Path(args.out)
    write_csv(rows, out / "rows.csv")
    write_json(rows, out / "rows.json")
    write_plot_data(rows, out)
    save_config(config, out / "run_config.ini")
    print(f"{len(rows)} rows -> {out}/")


if __name__ == "__main__":
    main()
