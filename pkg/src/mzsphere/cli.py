"""Command-line front end: ``mzsphere <command> [options]``.

Every command writes ``<out>/<command>.json`` (sorted keys, shortest
round-trip floats), a CSV twin of its per-L table, and prints a short
summary. The output directory defaults to ``$MZSPHERE_OUT`` or
``./mzsphere_out``. Exit codes: 0 success, 1 numerical failure or failed
acceptance, 2 usage or input error.
"""
from __future__ import annotations

import argparse
import csv
import json
import math
import os
import sys
from dataclasses import asdict, dataclass, field
from importlib import resources
from pathlib import Path

import numpy as np

from . import acceptance
from ._errors import DomainError, NumericalError, PrecisionError, UnsupportedDimensionError
from .concentration import export_spectrum, spectrum, trace_closed_form, trace_deficit_slope
from .families import TriangularFamily, carleson_max_count, density_scan, family_from
from .harmonic import dim_pi, eval_kernel, kernel_constant, write_coefficients
from .mz import (
    complete_interp_diagnostic,
    cp_monte_carlo,
    delayed_means_check,
    interpolate_min_norm,
    jacobi_lp_scaling,
    mollifier_symbol,
    mz_sweep,
    projection_l1_norm,
)
from .sphere import as_points, surface_area

SCHEMA_VERSION = "1.0"
OUT_ENV = "MZSPHERE_OUT"


@dataclass
class RunConfig:
    command: str
    d: int | None = None
    Ls: list = field(default_factory=list)
    alphas: list = field(default_factory=list)
    p: float | None = None
    seed: int | None = None
    family: str | None = None
    out: str = "."
    thresholds: dict = field(default_factory=dict)
    extra: dict = field(default_factory=dict)


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, np.ndarray):
        return [_jsonable(v) for v in x.tolist()]
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    if isinstance(x, (int, np.integer)):
        return int(x)
    if isinstance(x, (float, np.floating)):
        x = float(x)
        if math.isfinite(x):
            return x
        return "nan" if math.isnan(x) else ("inf" if x > 0 else "-inf")
    return x


def dumps_report(report: dict) -> str:
    return json.dumps(_jsonable(report), sort_keys=True, indent=2, allow_nan=False) + "\n"


def load_schema() -> dict:
    return json.loads(resources.files("mzsphere").joinpath("schemas/report.schema.json").read_text())


def _write_csv(path: Path, rows: list) -> None:
    flat = [{k: v for k, v in r.items() if not isinstance(v, (list, dict, np.ndarray))} for r in rows]
    if not flat:
        return
    cols = list(dict.fromkeys(k for r in flat for k in r))
    with open(path, "w", newline="") as fh:
        wr = csv.DictWriter(fh, fieldnames=cols)
        wr.writeheader()
        for r in flat:
            wr.writerow({k: (repr(v) if isinstance(v, float) else v) for k, v in _jsonable(r).items()})


def emit(cfg: RunConfig, per_L: list, verdict: str | None, summary: list, **extra) -> dict:
    report = {"schema_version": SCHEMA_VERSION, "command": cfg.command, "params": asdict(cfg), "per_L": per_L}
    if verdict is not None:
        report["verdict"] = verdict
    report.update(extra)
    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    stem = cfg.command.replace("-", "_")
    (out / f"{stem}.json").write_text(dumps_report(report))
    _write_csv(out / f"{stem}.csv", per_L)
    for line in summary:
        print(line)
    if verdict is not None:
        print(f"verdict: {verdict}")
    return report


def _int_list(s: str) -> list:
    try:
        return [int(v) for v in s.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {s!r}")


def _float_list(s: str) -> list:
    try:
        return [float(v) for v in s.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {s!r}")


def _p_value(s: str) -> float:
    return math.inf if s.lower() in ("inf", "infinity") else float(s)


def _family(args) -> TriangularFamily:
    if not args.family:
        raise DomainError("--family <dir> is required")
    return TriangularFamily.load(args.family)


def _Ls_for(args, fam) -> list:
    return args.Ls if args.Ls else fam.degrees


def cmd_gen(args, cfg):
    fam = family_from(args.kind, args.Ls, args.c, seed=args.seed, d=args.d)
    fam.save(cfg.out)
    rows = [{"L": L, "m_L": len(fam[L]), "pi_L": dim_pi(args.d, L), "role": fam.role_check(L)} for L in fam.degrees]
    return emit(cfg, rows, None, [f"wrote {len(rows)} generations to {cfg.out}"])


def cmd_kernel_check(args, cfg):
    rng = np.random.default_rng(args.seed)
    rows = []
    for L in args.Ls:
        u = as_points(rng.standard_normal((args.n_points, args.d + 1)), args.d)
        got = surface_area(args.d) * eval_kernel(args.d, L, u, u)
        rows.append({"L": L, "pi_L": dim_pi(args.d, L), "max_rel_err": float(np.max(np.abs(got / dim_pi(args.d, L) - 1)))})
    ok = all(r["max_rel_err"] <= 1e-9 for r in rows)
    return emit(cfg, rows, "pass" if ok else "fail", [f"L={r['L']}: rel err {r['max_rel_err']:.2e}" for r in rows])


def cmd_spectrum(args, cfg):
    if args.d != 2:
        raise UnsupportedDimensionError("spectrum is available for d = 2")
    if (args.alpha is None) == (args.theta is None):
        raise DomainError("give exactly one of --alpha, --theta")
    rep = spectrum(args.L, args.alpha if args.alpha is not None else args.theta,
                   mode="alpha" if args.alpha is not None else "theta")
    exact = trace_closed_form(2, args.L, rep.alpha)
    row = {"L": args.L, "alpha": rep.alpha, "theta": rep.theta, "trace": rep.trace, "trace_sq": rep.trace_sq,
           "trace_closed_form": exact, "clamped": rep.clamped, "n_eigenvalues": len(rep.eigenvalues),
           "eigenvalues": rep.eigenvalues}
    Path(cfg.out).mkdir(parents=True, exist_ok=True)
    export_spectrum(rep, Path(cfg.out) / "spectrum_eigenvalues.csv")
    return emit(cfg, [row], None, [f"L={args.L} alpha={rep.alpha:g}: {len(rep.eigenvalues)} eigenvalues, "
                                   f"trace {rep.trace:.12g} (closed form {exact:.12g}), trace_sq {rep.trace_sq:.12g}"])


def cmd_trace_deficit(args, cfg):
    tab = trace_deficit_slope(args.d, args.L, args.alphas)
    rows = [{"L": args.L, "alpha": a, "deficit": x, "excluded": a in tab.excluded}
            for a, x in zip(tab.alphas, tab.deficits)]
    return emit(cfg, rows, None, [f"slope of log(tr - tr^2) vs log alpha: {tab.slope:.4f} (target d-1 = {args.d - 1})"],
                slope=tab.slope)


def cmd_density(args, cfg):
    fam = _family(args)
    Ls = _Ls_for(args, fam)
    rep = density_scan(fam, args.alphas, Ls, probe_factor=args.probe_factor)
    return emit(cfg, rep.rows, None, [f"D- est {rep.D_minus_est:.4f}, D+ est {rep.D_plus_est:.4f} "
                                      f"at alpha={max(args.alphas):g}, L={max(Ls)}"],
                D_minus_est=rep.D_minus_est, D_plus_est=rep.D_plus_est)


def cmd_mz_bounds(args, cfg):
    fam = _family(args)
    Ls = _Ls_for(args, fam)
    sweep = mz_sweep(fam, Ls, max_condition=args.max_condition, min_lower=args.min_lower, jobs=args.jobs)
    rows = [r.as_dict() for r in sweep.rows]
    if args.p is not None:
        for r in rows:
            lo, hi = cp_monte_carlo(fam[r["L"]], r["L"], args.p, args.trials, args.seed)
            r.update(p=args.p, lower_A_est=lo, upper_B_est=hi)
    summary = [f"L={r['L']}: m_L={r['m_L']} A={r['A']:.6g} B={r['B']:.6g} cond={r['condition']:.4g}"
               + (f" | p={args.p:g} ratios in [{r['lower_A_est']:.4g}, {r['upper_B_est']:.4g}]" if args.p else "")
               for r in rows]
    return emit(cfg, rows, sweep.verdict, summary + sweep.notices, notices=sweep.notices)


def cmd_interpolate(args, cfg):
    fam = _family(args)
    pts = fam[args.L]
    if args.values:
        values = np.loadtxt(args.values, ndmin=1)
    else:
        values = np.full(len(pts), args.constant)
    res = interpolate_min_norm(pts, args.L, values)
    Path(cfg.out).mkdir(parents=True, exist_ok=True)
    write_coefficients(Path(cfg.out) / f"interpolant_L{args.L}.coef", res.coefficients)
    row = {"L": args.L, "m_L": len(pts), "pi_L": dim_pi(2, args.L), "residual": res.residual,
           "interpolant_norm_sq": res.interpolant_norm_sq, "data_norm_sq": res.data_norm_sq,
           "stability_quotient": res.stability_quotient, "condition": res.condition, "rank": res.rank}
    verdict = "interpolating" if res.interpolating else "not interpolating"
    return emit(cfg, [row], verdict, [f"residual {res.residual:.3e}, stability quotient {res.stability_quotient:.4g}"])


def cmd_carleson(args, cfg):
    fam = _family(args)
    rows = [{"L": L, "m_L": len(fam[L]), "max_count": carleson_max_count(fam[L], L, args.radius_scale)}
            for L in _Ls_for(args, fam)]
    return emit(cfg, rows, None, [f"L={r['L']}: max cap count {r['max_count']}" for r in rows])


def cmd_asymptotics(args, cfg):
    if args.which == "jacobi-lp":
        if args.p is None:
            raise DomainError("jacobi-lp needs --p")
        tab = jacobi_lp_scaling(args.d, args.p, args.Ls)
        key = "integral"
    elif args.which == "projection-norm":
        tab = projection_l1_norm(args.d, args.Ls)
        key = "l1_norm"
    else:
        vals = [kernel_constant(args.d, L) for L in args.Ls]
        slope = float(np.polyfit(np.log(args.Ls), np.log(vals), 1)[0])
        rows = [{"L": L, "kernel_constant": v} for L, v in zip(args.Ls, vals)]
        return emit(cfg, rows, None, [f"slope {slope:.4f} (expected d/2 = {args.d / 2:g})"],
                    slope=slope, expected_slope=args.d / 2)
    rows = [{"L": L, key: v} for L, v in zip(tab.Ls, tab.values)]
    return emit(cfg, rows, None, [f"slope {tab.slope:.4f} (expected {tab.expected_slope:g})"],
                slope=tab.slope, expected_slope=tab.expected_slope)


def cmd_multiplier_check(args, cfg):
    rows = []
    for L in args.Ls:
        dm = delayed_means_check(args.d, L)
        rows.append({"L": L, "max_dev_identity": float(np.max(np.abs(dm.symbols[: L + 1] - 1))),
                     "max_beyond_3L": float(np.max(np.abs(dm.symbols[3 * L + 1:]))), "l1_norm": dm.l1_norm,
                     "unnormalized_product_symbol": dm.unnormalized_symbol, "symbols": dm.symbols})
    norms = [r["l1_norm"] for r in rows]
    spread = (max(norms) - min(norms)) / min(norms)
    ok = all(r["max_dev_identity"] <= 1e-8 and r["max_beyond_3L"] <= 1e-8 for r in rows) and spread < 0.25
    return emit(cfg, rows, "pass" if ok else "fail",
                [f"L={r['L']}: |m-1|={r['max_dev_identity']:.1e} |m|>3L={r['max_beyond_3L']:.1e} "
                 f"||g||_1={r['l1_norm']:.5f}" for r in rows], l1_spread=spread)


def cmd_mollifier(args, cfg):
    rows = []
    for L in args.Ls:
        st = mollifier_symbol(args.d, L, args.delta)
        rows.append({"L": L, "delta": args.delta, "min_symbol": st.minimum, "symbols": st.symbols})
    ok = all(r["min_symbol"] > 0 for r in rows)
    return emit(cfg, rows, "positive" if ok else "not positive",
                [f"L={r['L']}: min symbol {r['min_symbol']:.6g}" for r in rows])


def cmd_cis_diagnostic(args, cfg):
    fam = _family(args)
    rep = complete_interp_diagnostic(fam, _Ls_for(args, fam))
    return emit(cfg, rep["per_L"], rep["verdict"],
                [f"L={r['L']}: m_L={r['m_L']} pi_L={r['pi_L']} cond(E)={r['interpolation_condition']:.4g}"
                 for r in rep["per_L"]], critical_density=rep["critical_density"])


def cmd_accept(args, cfg):
    results = acceptance.run_all(quick=args.quick)
    rows = [{"L": None, "criterion": r.number, "name": r.name, "passed": r.passed, "detail": r.detail}
            for r in results]
    ok = all(r.passed for r in results)
    emit(cfg, rows, "pass" if ok else "fail", [r.line() for r in results])
    return ok


COMMANDS = {
    "gen": cmd_gen, "kernel-check": cmd_kernel_check, "spectrum": cmd_spectrum,
    "trace-deficit": cmd_trace_deficit, "density": cmd_density, "mz-bounds": cmd_mz_bounds,
    "interpolate": cmd_interpolate, "carleson": cmd_carleson, "asymptotics": cmd_asymptotics,
    "multiplier-check": cmd_multiplier_check, "mollifier": cmd_mollifier,
    "cis-diagnostic": cmd_cis_diagnostic, "accept": cmd_accept,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", default=os.environ.get(OUT_ENV, "mzsphere_out"),
                        help=f"output directory (default ${OUT_ENV} or ./mzsphere_out)")
    common.add_argument("--jobs", type=int, default=os.cpu_count() or 1)
    common.add_argument("--seed", type=int, default=0)

    parser = argparse.ArgumentParser(prog="mzsphere", description="Sampling and interpolation analysis on spheres.")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, help_):
        return sub.add_parser(name, parents=[common], help=help_)

    p = add("gen", "generate a triangular family into --out")
    p.add_argument("--kind", choices=["fibonacci", "random"], required=True)
    p.add_argument("--c", type=float, default=1.0, help="points per dimension of Pi_L")
    p.add_argument("--Ls", type=_int_list, required=True)
    p.add_argument("--d", type=int, default=2)

    p = add("kernel-check", "sigma(S^d) K_L(u, u) = pi_L at random points")
    p.add_argument("--d", type=int, default=2)
    p.add_argument("--Ls", type=_int_list, default=[0, 8, 16, 32, 50])
    p.add_argument("--n-points", type=int, default=20)

    p = add("spectrum", "eigenvalues of the polar-cap concentration operator")
    p.add_argument("--d", type=int, default=2)
    p.add_argument("--L", type=int, required=True)
    p.add_argument("--alpha", type=float)
    p.add_argument("--theta", type=float)

    p = add("trace-deficit", "slope of log(tr - tr^2) against log alpha")
    p.add_argument("--d", type=int, default=2)
    p.add_argument("--L", type=int, required=True)
    p.add_argument("--alphas", type=_float_list, default=[4, 6, 8, 12, 16])

    for name, help_ in (("density", "finite-scale cap-count densities"),
                        ("mz-bounds", "p = 2 frame bounds per generation"),
                        ("carleson", "maximal counts in caps of radius s/L"),
                        ("cis-diagnostic", "complete-interpolation evidence")):
        p = add(name, help_)
        p.add_argument("--family", required=True)
        p.add_argument("--Ls", type=_int_list)
        if name == "density":
            p.add_argument("--alphas", type=_float_list, default=[4, 8, 16])
            p.add_argument("--probe-factor", type=int, default=4)
        if name == "mz-bounds":
            p.add_argument("--max-condition", type=float, default=100.0)
            p.add_argument("--min-lower", type=float, default=1e-4 / (4 * math.pi))
            p.add_argument("--p", type=_p_value, help="also estimate C_p by Monte Carlo")
            p.add_argument("--trials", type=int, default=20)
        if name == "carleson":
            p.add_argument("--radius-scale", type=float, default=1.0)

    p = add("interpolate", "minimum-norm interpolant on one generation")
    p.add_argument("--family", required=True)
    p.add_argument("--L", type=int, required=True)
    g = p.add_mutually_exclusive_group()
    g.add_argument("--values", help="text file with one value per point")
    g.add_argument("--constant", type=float, default=1.0)

    p = add("asymptotics", "L-scaling studies of zonal quantities")
    p.add_argument("which", choices=["jacobi-lp", "projection-norm", "kernel-constant"])
    p.add_argument("--d", type=int, default=2)
    p.add_argument("--p", type=float)
    p.add_argument("--Ls", type=_int_list, default=[16, 32, 64, 128])

    p = add("multiplier-check", "delayed-means multiplier symbols and L^1 norms")
    p.add_argument("--d", type=int, default=2)
    p.add_argument("--Ls", type=_int_list, default=[8, 16, 32])

    p = add("mollifier", "Funk-Hecke symbols of the cap mollifier")
    p.add_argument("--d", type=int, default=2)
    p.add_argument("--Ls", type=_int_list, default=[10, 20, 40])
    p.add_argument("--delta", type=float, default=0.5)

    p = add("accept", "run the acceptance suite")
    p.add_argument("--quick", action="store_true")
    return parser


def _config(args) -> RunConfig:
    known = {"command", "d", "Ls", "alphas", "p", "seed", "family", "out", "jobs"}
    thresholds = {k: getattr(args, k) for k in ("max_condition", "min_lower", "probe_factor", "radius_scale", "delta")
                  if getattr(args, k, None) is not None}
    extra = {k: v for k, v in vars(args).items() if k not in known and k not in thresholds}
    Ls = getattr(args, "Ls", None) or ([args.L] if getattr(args, "L", None) is not None else [])
    return RunConfig(command=args.command, d=getattr(args, "d", None), Ls=list(Ls),
                     alphas=list(getattr(args, "alphas", None) or []), p=getattr(args, "p", None),
                     seed=args.seed, family=getattr(args, "family", None), out=str(args.out),
                     thresholds=thresholds, extra=extra)


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    cfg = _config(args)
    try:
        result = COMMANDS[args.command](args, cfg)
    except (NumericalError, PrecisionError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (DomainError, UnsupportedDimensionError, ValueError, KeyError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    if args.command == "accept":
        return 0 if result else 1
    return 0


def main() -> None:
    sys.exit(run())
