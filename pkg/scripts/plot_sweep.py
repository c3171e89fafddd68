#!/usr/bin/env python3
"""Figures from saved sweep rows: error probability and key rate vs sorter crosstalk.

Accepts one or more rows.json files (e.g. the four panel outputs of
run_full_sweep.py) and draws one panel per (h0, aperture) pair.
"""

import argparse
from collections import defaultdict
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

from satmodes.sweep import read_json

_COLORS = {2: "tab:blue", 3: "tab:cyan", 4: "tab:orange", 5: "tab:olive",
           7: "tab:green", 8: "tab:red", 9: "tab:purple"}


def _panels(rows):
    grouped = defaultdict(list)
    for row in rows:
        grouped[(row.h0, row.aperture_radius)].append(row)
    return dict(sorted(grouped.items()))


def _draw(ax, rows, table, metric, compensated):
    series = defaultdict(list)
    for row in rows:
        if row.table != table or row.status == "unsupported-dimension":
            continue
        if row.encoding == "tm" and row.compensated != compensated:
            continue
        if row.encoding == "oam" and row.compensated not in (None, compensated):
            continue
        series[(row.encoding, row.d)].append((row.eta1, getattr(row, metric)))
    for (encoding, d), pts in sorted(series.items()):
        pts.sort()
        xs, ys = zip(*pts)
        style = "-" if encoding == "tm" else "--"
        ax.plot(xs, ys, style, color=_COLORS.get(d, "k"),
                label=f"{encoding} d={d}")
    ax.set_xlabel("sorter crosstalk")
    ax.grid(alpha=0.3)


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("rows", nargs="+", help="rows.json files")
    parser.add_argument("--out", default="figures")
    parser.add_argument("--uncompensated", action="store_true",
                        help="plot the uncompensated pulsed channel instead")
    args = parser.parse_args()

    rows = [r for path in args.rows for r in read_json(path)]
    panels = _panels(rows)
    comp = not args.uncompensated
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)

    for table, metric, fname, ylabel in (
            ("detection", "p_e", "error_probability.png", "detection error probability"),
            ("qkd", "key", "key_rate.png", "secret key rate (bits/photon)")):
        fig, axes = plt.subplots(1, len(panels), squeeze=False,
                                 figsize=(5 * len(panels), 4), sharey=True)
        for ax, ((h0, r_a), panel_rows) in zip(axes[0], panels.items()):
            _draw(ax, panel_rows, table, metric, comp)
            ax.set_title(f"ground {h0:.0f} m, aperture {r_a:g} m")
        axes[0][0].set_ylabel(ylabel)
        axes[0][-1].legend(fontsize=8)
        fig.tight_layout()
        fig.savefig(out / fname, dpi=150)
        print(f"wrote {out / fname}")


if __name__ == "__main__":
    main()
