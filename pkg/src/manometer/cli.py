"""``manometer`` command-line front end.

    manometer spectrum     unperturbed energy table
    manometer coeffs       first-order coefficient table (k_g, k_W, channel, value)
    manometer observables  closed-form and state-based observables, purity, entropy
    manometer verify       identity, quadrature and oracle checks; exit 0 iff all pass
    manometer thermal      temperature sweep of mean energy, entropy, wall displacement
    manometer sweep        oracle vs perturbation-theory convergence rows
"""
from __future__ import annotations

import argparse
import datetime as _dt
import sys
from importlib.metadata import PackageNotFoundError, version

import numpy as np

from .basis_ops import BasisIndex, gas_energy, wall_energy
from .config import ConfigError, RunConfig, load_config
from .entanglement import entanglement_report, purity_closed_form, reduce_to_wall
from .observables import observable_report, pressure_3d
from .oracle import convergence_sweep
from .params import derive_expansion_params, validate_regime
from .perturbation import ResonanceError, build_perturbed_state, first_order_energy
from .report import Table, matrix_csv, render
from .thermal import TruncationError, temperature_sweep
from .verify import run_suite, suite_passed

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


def _version() -> str:
    try:
        return version("artifact")
    except PackageNotFoundError:
        return "unknown"


def _meta(command: str, cfg: RunConfig, with_meta: bool) -> dict:
    if not with_meta:
        return {}
    return {
        "command": command,
        "version": _version(),
        "generated": _dt.datetime.now(_dt.timezone.utc).isoformat(timespec="seconds"),
        "config": cfg.raw,
    }


def cmd_spectrum(cfg: RunConfig, args) -> tuple[Table, int]:
    p = cfg.params
    t = Table(["j_g", "j_W", "E_gas", "E_wall", "E0"])
    for j in range(1, cfg.gas_levels + 1):
        for n in range(cfg.wall_levels):
            eg, ew = float(gas_energy(j, p)), float(wall_energy(n, p))
            t.add(j, n, eg, ew, eg + ew)
    if p.is_3d:
        j1, j2, j3 = cfg.j3d or (cfg.j_g, 1, 1)
        pref = np.pi**2 * p.hbar**2 / (2 * p.gas_mass)
        L1, L2, L3 = p.dims
        t.columns += ["E_axis1", "E_axis2", "E_axis3"]
        terms = [pref * j1**2 / L1**2, pref * j2**2 / L2**2, pref * j3**2 / L3**2]
        for row in t.rows:
            row.extend(terms)
    return t, EXIT_OK


def cmd_coeffs(cfg: RunConfig, args) -> tuple[Table, int]:
    s = build_perturbed_state((cfg.j_g, 0), cfg.params, cfg.basis, cfg.mode)
    t = Table(["k_g", "k_W", "channel", "value"])
    for row in s.table_rows():
        t.add(*row)
    return t, EXIT_OK


def cmd_observables(cfg: RunConfig, args) -> tuple[Table, int]:
    p = cfg.params
    e = derive_expansion_params(p)
    regime = validate_regime(e, cfg.max_eps)
    s = build_perturbed_state((cfg.j_g, 0), p, cfg.basis, cfg.mode)
    obs = observable_report(s)
    ent = entanglement_report(s)
    t = Table(["section", "quantity", "value"])
    t.add("params", "lambda", e.lam)
    t.add("params", "beta", e.beta)
    t.add("params", "regime_ok", regime.ok)
    for w in regime.warnings:
        t.add("params", "warning", w)
    t.add("state", "normalization", s.normalization)
    fo_lead = first_order_energy((cfg.j_g, 0), p, "leading")
    fo_all = first_order_energy((cfg.j_g, 0), p, "all")
    t.add("energy", "first_order_leading", fo_lead.value)
    t.add("energy", "first_order_all", fo_all.value)
    t.add("energy", "first_order_all_relative", fo_all.relative_to_gas)
    for k, v in obs.as_dict().items():
        if k == "j_g" or v is None:
            continue
        t.add("wall", k, v)
    if p.is_3d:
        j = cfg.j3d or (cfg.j_g, 1, 1)
        pc = pressure_3d(j, p.dims, p)
        t.add("pressure", "p_classical", pc.classical)
        t.add("pressure", "p_from_wall", pc.from_wall)
        t.add("pressure", "rel_gap", pc.rel_gap)
    t.add("entanglement", "purity", ent.purity)
    t.add("entanglement", "purity_deficit", ent.deficit)
    t.add("entanglement", "entropy_nats", ent.entropy)
    t.add("entanglement", "purity_closed_form", purity_closed_form(e.lam, e.beta, s.normalization))
    if args.rho_out:
        with open(args.rho_out, "w", newline="") as fh:
            fh.write(matrix_csv(reduce_to_wall(s).matrix))
    return t, EXIT_OK


def cmd_verify(cfg: RunConfig, args) -> tuple[Table, int]:
    checks = run_suite(cfg, quick=args.quick, jobs=args.jobs)
    t = Table(["check", "status", "value", "tolerance", "detail"])
    for c in checks:
        t.add(c.name, c.status, c.value, c.tolerance, c.detail)
    return t, EXIT_OK if suite_passed(checks, args.allow_flagged) else EXIT_FAIL


def cmd_thermal(cfg: RunConfig, args) -> tuple[Table, int]:
    p = cfg.params
    unit = float(gas_energy(1, p))
    rows = temperature_sweep(p, [t * unit for t in cfg.temperatures])
    t = Table(["T", "T_over_E1", "mean_energy", "entropy", "x_wall", "n_levels"])
    for tt, r in zip(cfg.temperatures, rows):
        t.add(r.temperature, float(tt), r.mean_energy, r.entropy, r.x_wall, r.n_levels)
    return t, EXIT_OK


def cmd_sweep(cfg: RunConfig, args) -> tuple[Table, int]:
    res = convergence_sweep(
        BasisIndex(cfg.j_g, 0), cfg.eps_grid, cfg.basis, cfg.beta_over_lambda, args.jobs
    )
    t = Table(["eps", "n_gas", "n_wall", "observable", "pt_value", "oracle_value", "rel_error", "flags"])
    for r in res.rows:
        t.add(r.eps, r.n_gas, r.n_wall, r.observable, r.pt_value, r.oracle_value, r.rel_error, r.flags)
    failed = any(r.failed for r in res.rows) and not args.allow_flagged
    return t, EXIT_FAIL if failed else EXIT_OK


COMMANDS = {
    "spectrum": cmd_spectrum,
    "coeffs": cmd_coeffs,
    "observables": cmd_observables,
    "verify": cmd_verify,
    "thermal": cmd_thermal,
    "sweep": cmd_sweep,
}


def _overrides(args) -> dict:
    o: dict = {}
    system = {}
    for key in ("lam", "beta", "gas_mass", "wall_mass", "box_length", "spring_constant", "hbar"):
        v = getattr(args, key)
        if v is not None:
            system[key] = v
    if args.dims is not None:
        system["dims"] = args.dims
    if system:
        o["system"] = system
    tr = {k: getattr(args, k) for k in ("n_gas", "n_wall") if getattr(args, k) is not None}
    if tr:
        o["truncation"] = tr
    for key in ("mode", "j_g", "format", "output", "units", "max_eps"):
        v = getattr(args, key)
        if v is not None:
            o[key] = v
    if args.j3d is not None:
        o["j3d"] = args.j3d
    if args.eps_grid is not None:
        o["sweep"] = {"eps_grid": args.eps_grid}
    return o


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    g = common.add_argument_group("configuration")
    g.add_argument("-c", "--config", help="JSON config file (see config.schema.json)")
    g.add_argument("--units", choices=["natural", "si"])
    g.add_argument("--lam", type=float, help="expansion parameter lambda")
    g.add_argument("--beta", type=float, help="expansion parameter beta = sqrt(M_g/M_W)")
    g.add_argument("--gas-mass", type=float)
    g.add_argument("--wall-mass", type=float)
    g.add_argument("--box-length", type=float)
    g.add_argument("--spring-constant", type=float)
    g.add_argument("--hbar", type=float)
    g.add_argument("--dims", type=float, nargs=3, metavar=("L1", "L2", "L3"))
    g.add_argument("--j-g", type=int, help="box quantum number of the reference state")
    g.add_argument("--j3d", type=int, nargs=3, metavar=("J1", "J2", "J3"))
    g.add_argument("--n-gas", type=int)
    g.add_argument("--n-wall", type=int)
    g.add_argument("--mode", choices=["leading", "all"])
    g.add_argument("--max-eps", type=float)
    g.add_argument("--eps-grid", type=float, nargs="+")
    o = common.add_argument_group("output")
    o.add_argument("-f", "--format", choices=["json", "csv", "text"])
    o.add_argument("-o", "--output", help="output path (default stdout, or $MANOMETER_OUTPUT)")
    o.add_argument("--no-meta", action="store_true", help="omit run metadata (timestamps, config echo)")
    o.add_argument("--jobs", type=int, default=1, help="worker threads for sweeps")
    o.add_argument("--quick", action="store_true", help="verify: skip the oracle sweep")
    o.add_argument("--allow-flagged", action="store_true", help="flagged rows do not fail the run")
    o.add_argument("--rho-out", help="observables: write the wall reduced density matrix as CSV")

    parser = argparse.ArgumentParser(prog="manometer", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name, fn in COMMANDS.items():
        sub.add_parser(name, parents=[common], help=fn.__name__.replace("cmd_", ""))
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = load_config(args.config, _overrides(args))
    except (ConfigError, OSError) as exc:
        print(f"manometer: {exc}", file=sys.stderr)
        return EXIT_USAGE
    try:
        table, status = COMMANDS[args.command](cfg, args)
    except ResonanceError as exc:
        print(f"manometer: {exc}", file=sys.stderr)
        return EXIT_FAIL
    except TruncationError as exc:
        print(f"manometer: {exc}", file=sys.stderr)
        return EXIT_FAIL
    table.meta = _meta(args.command, cfg, not args.no_meta)
    text = render(table, cfg.format)
    if cfg.output:
        with open(cfg.output, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return status


if __name__ == "__main__":
    sys.exit(main())
