"""Command line: icl {critical, stability, perturb, steiner}.

Exit codes: 0 ok, 2 threshold violation, 3 numerical failure, 4 stability
check failed, 5 a perturbation did not increase the functional, 6 Steiner
symmetrization increased F.
"""
from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from . import reporting
from .config import RunConfig
from .critical import (area_closed_form, build_critical_curve, critical_report,
                       invariant_report, make_params, solve_length)
from .curvegeom import check_admissible, enclosed_area, total_inverse_curvature
from .errors import InvCurvError, MinimalityFailure, PreconditionError, StabilityFailure, SteinerFailure
from .experiments import perturbation_study, steiner_study
from .stability import (coercivity_constant, find_mu_w1, mu0_threshold, params_from_ratio,
                        stability_report)
from .variations import VariationField, check_second_variation_G, random_w1_profile


def _tag(x):
    return format(float(x), ".10g")


def _config(args) -> RunConfig:
    return RunConfig(grid_n=args.grid_n, fd_step=args.fd_step, root_tol=args.root_tol,
                     mu_scan_step=args.mu_scan_step, output_dir=Path(args.output_dir),
                     format=args.format, svg=args.svg).with_env()


def _say(path):
    print(f"wrote {path}")


# ---------------------------------------------------------------- commands

def cmd_critical(args, cfg: RunConfig) -> int:
    x0 = args.x0
    report = {}
    if args.A0 is not None:
        L = solve_length(x0, args.A0)
        report["A0"] = args.A0
    else:
        L = args.L
    params = make_params(x0, L)
    cc = build_critical_curve(params, cfg.grid_n)
    curve = cc.curve
    report.update(critical_report(params, cfg.grid_n))
    report["x0"], report["L"] = x0, L
    report["invariants"] = invariant_report(cc)
    report["quadrature"] = {"area": enclosed_area(curve), "F": total_inverse_curvature(curve)}
    adm = check_admissible(curve)
    report["admissible"] = adm.is_admissible
    report["min_H"] = adm.min_H
    if args.A0 is not None:
        report["area_round_trip_error"] = abs(report["quadrature"]["area"] - args.A0)
        report["closed_form_round_trip_error"] = abs(area_closed_form(params) - args.A0)

    stem = f"critical_x0_{_tag(x0)}_L_{_tag(L)}"
    out = cfg.output_dir
    _say(reporting.write_json(out / f"{stem}_report.json", report))
    if cfg.format == "csv":
        header, rows = reporting.curve_records(curve)
        _say(reporting.write_csv(out / f"{stem}_curve.csv", header, rows))
    else:
        _say(reporting.write_json(out / f"{stem}_curve.json", reporting.curve_json(curve, L)))
    if cfg.svg or args.svg:
        _say(reporting.write_svg(out / f"{stem}.svg", [curve],
                                 f"x0 = {_tag(x0)}, L = {_tag(L)}, area = {report['area']:.6g}"))
    return 0


def _parse_sweep(text):
    try:
        a, b, c = (float(v) for v in text.split(":"))
    except ValueError as exc:
        raise PreconditionError(f"sweep must be start:stop:step, got {text!r}") from exc
    if not c > 0 or b < a:
        raise PreconditionError(f"bad sweep {text!r}")
    k = int(np.floor((b - a) / c + 1e-9))
    return [round(a + i * c, 12) for i in range(k + 1)]


def cmd_stability(args, cfg: RunConfig) -> int:
    out = cfg.output_dir
    if args.ratio_sweep:
        rows = []
        ok = True
        for r in _parse_sweep(args.ratio_sweep):
            p = params_from_ratio(r)
            mu = find_mu_w1(p, cfg.mu_scan_step, cfg.root_tol)
            C = coercivity_constant(p)
            ok &= mu > 1 and C > 0
            rows.append((r, mu0_threshold(p), mu, C))
        header = ("ratio", "mu0", "mu_w1", "coercivity")
        if cfg.format == "json":
            _say(reporting.write_json(out / "stability_sweep.json",
                                      [dict(zip(header, row)) for row in rows]))
        else:
            _say(reporting.write_csv(out / "stability_sweep.csv", header, rows))
        if not ok:
            raise StabilityFailure("a ratio in the sweep failed mu_W1 > 1")
        return 0
    if args.L is None:
        raise PreconditionError("stability needs --L or --ratio-sweep")
    p = make_params(args.x0, args.L)
    rep = stability_report(p, step=cfg.mu_scan_step, tol=cfg.root_tol)
    stem = f"stability_x0_{_tag(args.x0)}_L_{_tag(args.L)}"
    if cfg.format == "json":
        _say(reporting.write_json(out / f"{stem}.json", rep.to_dict()))
    else:
        header = ("ratio", "mu0", "mu_w1", "coercivity")
        _say(reporting.write_csv(out / f"{stem}.csv", header,
                                 [(rep.ratio, rep.mu0, rep.mu_w1_det, rep.coercivity)]))
    if not rep.passed:
        raise StabilityFailure("stability checks failed")
    return 0


def cmd_perturb(args, cfg: RunConfig) -> int:
    p = make_params(args.x0, args.L)
    n = cfg.grid_n + 1 if cfg.grid_n % 2 == 0 else cfg.grid_n
    study = perturbation_study(p, args.count, args.eps, args.seed, n=n,
                               area_preserving=args.area_preserving)
    mode = "area_preserving" if args.area_preserving else "plain"
    stem = f"perturb_{mode}_x0_{_tag(args.x0)}_L_{_tag(args.L)}_seed_{args.seed}"
    out = cfg.output_dir
    rows = [r.to_dict() for r in study.rows]
    if cfg.format == "json":
        # finite-difference cross-check of the second variation along the first direction
        rng = np.random.default_rng(args.seed)
        fd = check_second_variation_G(p, VariationField(random_w1_profile(p.L, rng)),
                                      h=cfg.fd_step, n=n)
        _say(reporting.write_json(out / f"{stem}.json", {
            "x0": args.x0, "L": args.L, "lambda": p.lam, "mode": mode, "eps": args.eps,
            "seed": args.seed, "coercivity": study.coercivity,
            "second_variation_fd_rel_err": fd.rel_err,
            "all_positive": study.all_positive, "all_bounded": study.all_bounded,
            "rows": rows}))
    else:
        header = ("index", "c2", "w22_sq", "delta", "bound", "ok")
        _say(reporting.write_csv(out / f"{stem}.csv", header,
                                 [tuple(r[k] for k in header) for r in rows]))
    if not study.all_positive:
        raise MinimalityFailure("a perturbation did not increase the functional")
    return 0


def cmd_steiner(args, cfg: RunConfig) -> int:
    pairs, comps = steiner_study(args.corpus, args.count, args.seed)
    rows = []
    failures = 0
    for i, (pair, c) in enumerate(zip(pairs, comps)):
        symmetric = pair.is_symmetric()
        rows.append((i, symmetric, c.A_before, c.A_after, c.F_before, c.F_after, c.area_drift))
        # symmetric pairs are fixed points; every other pair must strictly decrease F
        failures += (c.F_after != c.F_before) if symmetric else not c.F_after < c.F_before
    stem = f"steiner_{args.corpus}_{args.count}_seed_{args.seed}"
    out = cfg.output_dir
    header = ("index", "symmetric", "A_before", "A_after", "F_before", "F_after", "area_drift")
    _say(reporting.write_csv(out / f"{stem}.csv", header, rows))
    _say(reporting.write_json(out / f"{stem}_summary.json", {
        "corpus": args.corpus, "count": args.count, "seed": args.seed,
        "max_area_drift": max(r[-1] for r in rows),
        "min_F_decrease_asymmetric": min((r[4] - r[5] for r in rows if not r[1]), default=None),
        "failures": failures}))
    if failures:
        raise SteinerFailure("symmetrization failed to decrease F on some pair")
    return 0


# ---------------------------------------------------------------- parser

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    d = RunConfig()
    common.add_argument("--grid-n", type=int, default=d.grid_n, help="curve samples")
    common.add_argument("--fd-step", type=float, default=d.fd_step)
    common.add_argument("--root-tol", type=float, default=d.root_tol)
    common.add_argument("--mu-scan-step", type=float, default=d.mu_scan_step)
    common.add_argument("--output-dir", default=str(d.output_dir))
    common.add_argument("--format", choices=("json", "csv"), default=d.format)
    common.add_argument("--svg", action="store_true", help="also write an SVG figure")

    ap = argparse.ArgumentParser(prog="icl", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    c = sub.add_parser("critical", parents=[common], help="equilibrium curve and invariants")
    c.add_argument("--x0", type=float, default=1.0)
    g = c.add_mutually_exclusive_group(required=True)
    g.add_argument("--L", type=float, help="half length")
    g.add_argument("--A0", type=float, help="enclosed area")
    c.set_defaults(func=cmd_critical)

    s = sub.add_parser("stability", parents=[common], help="mu_W1 and coercivity")
    s.add_argument("--x0", type=float, default=1.0)
    s.add_argument("--L", type=float)
    s.add_argument("--ratio-sweep", help="start:stop:step over x0/(L+x0)")
    s.set_defaults(func=cmd_stability)

    p = sub.add_parser("perturb", parents=[common], help="random local-minimality trials")
    p.add_argument("--x0", type=float, default=1.0)
    p.add_argument("--L", type=float, default=4.0)
    p.add_argument("--seed", type=int, default=7)
    p.add_argument("--count", type=int, default=200)
    p.add_argument("--eps", type=float, default=1e-2, help="C^2 norm of each perturbation")
    p.add_argument("--area-preserving", action="store_true")
    p.set_defaults(func=cmd_perturb)

    t = sub.add_parser("steiner", parents=[common], help="symmetrization corpus")
    t.add_argument("--corpus", choices=("sheared", "symmetric", "random", "mixed"), default="mixed")
    t.add_argument("--count", type=int, default=100)
    t.add_argument("--seed", type=int, default=0)
    t.set_defaults(func=cmd_steiner)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = _config(args)
        return args.func(args, cfg)
    except InvCurvError as exc:
        print(f"icl {args.command}: {type(exc).__name__}: {exc}", file=sys.stderr)
        return exc.exit_code


if __name__ == "__main__":
    raise SystemExit(main())
