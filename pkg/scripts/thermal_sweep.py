"""Thermal wall displacement over a temperature grid.

Temperatures are given in units of the gas ground-state energy.  The
displacement is the Boltzmann average of the per-level value, so the
ratio column is <j^2>, which grows linearly with T once many levels are
populated.
"""
import argparse
import sys

import numpy as np

from manometer import SystemParams, thermal_report, x_wall_closed_form
from manometer.basis_ops import gas_energy
from manometer.report import Table, render


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--lam", type=float, default=1e-3)
    ap.add_argument("--beta", type=float, default=1e-3)
    ap.add_argument("--t-max", type=float, default=200.0)
    ap.add_argument("--points", type=int, default=41)
    args = ap.parse_args(argv)

    p = SystemParams.from_expansion(args.lam, args.beta)
    e1 = float(gas_energy(1, p))
    x1 = x_wall_closed_form(1, p)
    t = Table(["T_over_E1", "mean_energy_over_E1", "entropy", "x_wall", "x_over_ground", "n_levels"])
    for tt in np.linspace(0.0, args.t_max, args.points):
        r = thermal_report(p, tt * e1)
        t.add(float(tt), r.mean_energy / e1, r.entropy, r.x_wall, r.x_wall / x1, r.n_levels)
    sys.stdout.write(render(t, "csv"))


if __name__ == "__main__":
    main()
