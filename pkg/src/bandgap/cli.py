"""Command-line front end: figure data, verification, optimization runs.

Every command writes CSV (comma separated, '#' metadata lines, 15
significant digits) with values in the scaled units eps L^2/4, v0 L^2/4
and sigma L^2.  Identical flags and seed give byte-identical output.

An optional config file (one `key = value` per line, '#' comments) can
preload any flag of the chosen command; explicit flags win.
"""

from __future__ import annotations

import argparse
import sys

import numpy as np

from . import acceptance, moment_optimum, optimizer, squarewell
from .potential import moments, write_profile_csv


def _load_config(path: str) -> dict[str, str]:
    out = {}
    with open(path) as fh:
        for raw in fh:
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"bad config line: {raw.rstrip()}")
            key, value = line.split("=", 1)
            out[key.strip().replace("-", "_")] = value.strip()
    return out


def _apply_config(args: argparse.Namespace, parser: argparse.ArgumentParser) -> None:
    if not getattr(args, "config", None):
        return
    overrides = _load_config(args.config)
    # the chosen subcommand parsed bare gives that command's defaults
    defaults = parser.parse_args([args.command])
    for key, value in overrides.items():
        if key in ("config", "command", "func") or not hasattr(defaults, key):
            raise SystemExit(f"config key {key!r} is not a flag of this command")
        if getattr(args, key) != getattr(defaults, key):
            continue  # explicit flags win over the config file
        current = getattr(defaults, key)
        if isinstance(current, bool):
            parsed = value.lower() in ("1", "true", "yes", "on")
        elif isinstance(current, int):
            parsed = int(value)
        elif isinstance(current, float):
            parsed = float(value)
        elif current is None:
            for cast in (int, float):
                try:
                    parsed = cast(value)
                    break
                except ValueError:
                    continue
            else:
                parsed = value
        else:
            parsed = value
        setattr(args, key, parsed)


def _cmd_fig1(args) -> int:
    squarewell.write_interface_density_scan_csv(
        args.out, eta=args.eta, alpha_min=args.alpha_min,
        alpha_max=args.alpha_max, rows=args.rows, period=args.L)
    return 0


def _cmd_fig2(args) -> int:
    squarewell.write_optimal_well_csv(args.out, eta=args.eta, n=args.n,
                                      period=args.L, alpha=args.alpha)
    return 0


def _cmd_fig3(args) -> int:
    squarewell.write_geometry_sweep_csv(args.out, v0_scaled_max=args.v0max, rows=args.rows)
    return 0


def _cmd_fig4(args) -> int:
    squarewell.write_edge_energies_csv(args.out, v0_scaled_max=args.v0max, rows=args.rows)
    return 0


def _cmd_fig5(args) -> int:
    squarewell.write_gap_comparison_csv(args.out, v0_scaled_max=args.v0max,
                                        rows=args.rows, period=args.L)
    return 0


def _cmd_fig6(args) -> int:
    moment_optimum.write_gap_vs_sigma_csv(args.out, k_max=args.kmax,
                                          rows=args.rows, period=args.L)
    return 0


def _cmd_verify(args) -> int:
    results = acceptance.run_all(quick=args.quick)
    width = max(len(r.name) for r in results)
    for r in results:
        mark = "PASS" if r.passed else "FAIL"
        print(f"[{mark}] {r.number:2d} {r.name:<{width}}  {r.detail}")
    failed = [r for r in results if not r.passed]
    print(f"{len(results) - len(failed)}/{len(results)} checks passed"
          + (" (quick mode: optimizer runs skipped)" if args.quick else ""))
    return 1 if failed else 0


def _cmd_optimize(args) -> int:
    period = args.L
    if args.constraint == "box":
        spec = optimizer.BoxConstraint(0.0, args.v0)
        start = optimizer.random_box_profile(spec, args.n, period, args.seed)
    else:
        if args.k is not None:
            opt = moment_optimum.optimum_from_modulus(args.k, period)
            m = moments(moment_optimum.profile(opt, args.n))
            spec = optimizer.MomentConstraint(m.mean, m.variance + m.mean ** 2)
        else:
            spec = optimizer.MomentConstraint(args.v1, args.v2)
        start = optimizer.random_moment_profile(spec, args.n, period, args.seed)

    try:
        state, trace = optimizer.maximize_gap(start, spec, seed=args.seed,
                                              max_iter=args.iters,
                                              n_basis=args.nbasis)
    except optimizer.StallError as exc:
        state, trace = exc.state, [(exc.state.iterations, exc.state.gap,
                                    exc.state.extremality, np.nan)]
        print(f"stalled: {exc}", file=sys.stderr)

    with open(f"{args.out_prefix}_trace.csv", "w") as fh:
        fh.write(f"# constraint = {args.constraint}, n = {args.n}, seed = {args.seed}\n")
        fh.write("iter,gap,residual,t\n")
        for it, gap, resid, t in trace:
            fh.write(f"{it},{gap:.15g},{resid:.15g},{t:.15g}\n")
    write_profile_csv(state.profile, f"{args.out_prefix}_profile.csv")
    print(f"gap = {state.gap:.12g} (x L^2/4 = {state.gap * period ** 2 / 4:.12g}), "
          f"residual = {state.extremality:.3g}, iterations = {state.iterations}")
    return 0


def _add_common(sp: argparse.ArgumentParser) -> None:
    sp.add_argument("--L", type=float, default=2.0, help="potential period (default 2)")
    sp.add_argument("--config", type=str, default=None,
                    help="key=value file preloading this command's flags")


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="bandgap",
                                description="Bandgap extremization toolkit for 1D periodic potentials")
    sub = p.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("fig1", help="interface densities and gap vs alpha at fixed eta")
    sp.add_argument("--eta", type=float, default=5.0)
    sp.add_argument("--alpha-min", dest="alpha_min", type=float, default=2.2)
    sp.add_argument("--alpha-max", dest="alpha_max", type=float, default=4.2)
    sp.add_argument("--rows", type=int, default=401)
    sp.add_argument("--out", type=str, default="fig1.csv")
    _add_common(sp)
    sp.set_defaults(func=_cmd_fig1)

    sp = sub.add_parser("fig2", help="optimal-well wavefunctions and potential")
    sp.add_argument("--eta", type=float, default=5.0)
    sp.add_argument("--alpha", type=float, default=None,
                    help="emit this geometry instead of the optimum")
    sp.add_argument("--n", type=int, default=1024)
    sp.add_argument("--out", type=str, default="fig2.csv")
    _add_common(sp)
    sp.set_defaults(func=_cmd_fig2)

    sp = sub.add_parser("fig3", help="optimal geometry (v0 L^2/4 vs 2A/L)")
    sp.add_argument("--v0max", type=float, default=60.0)
    sp.add_argument("--rows", type=int, default=30)
    sp.add_argument("--out", type=str, default="fig3.csv")
    _add_common(sp)
    sp.set_defaults(func=_cmd_fig3)

    sp = sub.add_parser("fig4", help="edge energies along the optimal curve")
    sp.add_argument("--v0max", type=float, default=60.0)
    sp.add_argument("--rows", type=int, default=30)
    sp.add_argument("--out", type=str, default="fig4.csv")
    _add_common(sp)
    sp.set_defaults(func=_cmd_fig4)

    sp = sub.add_parser("fig5", help="optimized vs sinusoidal gap at equal contrast")
    sp.add_argument("--v0max", type=float, default=60.0)
    sp.add_argument("--rows", type=int, default=15)
    sp.add_argument("--out", type=str, default="fig5.csv")
    _add_common(sp)
    sp.set_defaults(func=_cmd_fig5)

    sp = sub.add_parser("fig6", help="gap vs sigma for the three families")
    sp.add_argument("--kmax", type=float, default=0.95)
    sp.add_argument("--rows", type=int, default=24)
    sp.add_argument("--out", type=str, default="fig6.csv")
    _add_common(sp)
    sp.set_defaults(func=_cmd_fig6)

    sp = sub.add_parser("verify", help="run the acceptance checks")
    sp.add_argument("--quick", action="store_true",
                    help="skip the random-start optimizer runs")
    _add_common(sp)
    sp.set_defaults(func=_cmd_verify)

    sp = sub.add_parser("optimize", help="variational maximization from a random start")
    sp.add_argument("--constraint", choices=("box", "moments"), default="box")
    sp.add_argument("--v0", type=float, default=25.0, help="box upper bound (lower is 0)")
    sp.add_argument("--k", type=float, default=None,
                    help="take moment targets from the elliptic optimum at this modulus")
    sp.add_argument("--v1", type=float, default=0.0, help="target mean")
    sp.add_argument("--v2", type=float, default=1.0, help="target second moment")
    sp.add_argument("--n", type=int, default=512)
    sp.add_argument("--nbasis", type=int, default=None)
    sp.add_argument("--iters", type=int, default=200)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--out-prefix", dest="out_prefix", type=str, default="optimize")
    _add_common(sp)
    sp.set_defaults(func=_cmd_optimize)

    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    _apply_config(args, parser)
    try:
        return args.func(args)
    except (ValueError, RuntimeError, ArithmeticError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
