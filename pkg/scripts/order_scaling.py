"""Per-channel size of the first-order coefficients against eps = lambda = beta.

Prints a CSV of max |C| per channel at each eps followed by the fitted
log-log slopes.  Channels c and f should come out at slope 1, the other
five at 2 or more.
"""
import argparse
import csv
import sys

import numpy as np

from manometer import Channel, SystemParams, TruncatedBasis, build_perturbed_state
from manometer.perturbation import loglog_slope, max_coefficient_by_channel


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--eps", type=float, nargs="+", default=list(np.logspace(-2, -4, 9)))
    ap.add_argument("--j-g", type=int, default=1)
    ap.add_argument("--n-gas", type=int, default=40)
    ap.add_argument("--n-wall", type=int, default=8)
    args = ap.parse_args(argv)

    basis = TruncatedBasis(args.n_gas, args.n_wall)
    w = csv.writer(sys.stdout)
    w.writerow(["eps"] + [ch.value for ch in Channel])
    table = {ch: [] for ch in Channel}
    for eps in args.eps:
        s = build_perturbed_state((args.j_g, 0), SystemParams.from_expansion(eps, eps), basis, "all")
        m = max_coefficient_by_channel(s)
        for ch in Channel:
            table[ch].append(m[ch])
        w.writerow([f"{eps:.6g}"] + [f"{m[ch]:.6e}" for ch in Channel])
    w.writerow(["slope"] + [f"{loglog_slope(args.eps, table[ch]):.4f}" for ch in Channel])


if __name__ == "__main__":
    main()
