#!/usr/bin/env python3
"""Plot a result CSV written by `cpstap run`.

One figure per (sweep_var, metric) pair, one line per series.
"""
import argparse
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import pandas as pd


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("csv", type=Path)
    ap.add_argument("--out-dir", type=Path, default=None)
    ap.add_argument("--metric", default=None, help="only plot this metric")
    args = ap.parse_args()

    df = pd.read_csv(args.csv)
    out_dir = args.out_dir or args.csv.parent
    out_dir.mkdir(parents=True, exist_ok=True)
    name = df["experiment"].iloc[0] if len(df) else args.csv.stem

    for (var, metric), grp in df.groupby(["sweep_var", "metric"]):
        if args.metric and metric != args.metric:
            continue
        fig, ax = plt.subplots(figsize=(6, 4))
        for series, s in grp.groupby("series"):
            s = s.sort_values("sweep_value")
            ax.plot(s["sweep_value"], s["value"], marker="o", ms=3, label=series)
        if var == "samples":
            ax.set_xscale("log")
        ax.set_xlabel(var)
        ax.set_ylabel(metric)
        ax.grid(alpha=0.3)
        ax.legend(fontsize=7)
        fig.tight_layout()
        path = out_dir / f"{name}_{var}_{metric}.png"
        fig.savefig(path, dpi=120)
        plt.close(fig)
        print(path)


if __name__ == "__main__":
    main()
