#!/usr/bin/env python3
"""Overlay radial profiles written by `fastpsf psf` (one `<prefix>.radial.csv` each)."""

import argparse

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("prefixes", nargs="+", help="output prefixes passed to `fastpsf psf --out-prefix`")
    ap.add_argument("--out", default="radial.png")
    ap.add_argument("--normalize", action="store_true", help="scale each profile to unit peak")
    ap.add_argument("--log", action="store_true", help="logarithmic intensity axis")
    args = ap.parse_args()

    fig, ax = plt.subplots(figsize=(7, 4))
    for prefix in args.prefixes:
        data = np.loadtxt(f"{prefix}.radial.csv", delimiter=",", skiprows=1)
        k, h = data[:, 0], data[:, 1]
        if args.normalize:
            h = h / h.max()
        ax.plot(k, h, label=prefix.rsplit("/", 1)[-1])
    ax.set_xlabel("k (1/m)")
    ax.set_ylabel("h(k)")
    if args.log:
        ax.set_yscale("log")
    ax.legend()
    fig.tight_layout()
    fig.savefig(args.out, dpi=150)


if __name__ == "__main__":
    main()
