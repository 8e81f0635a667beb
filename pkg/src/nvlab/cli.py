"""Command-line entry point: ``nvlab <command> [options]``.

Exit codes: 0 success, 1 a check or inequality failed, 2 invalid configuration.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from ._kernels import BACKEND
from .cache import LValueCache
from .config import ConfigError, RunConfig, parse_config_file
from .expsums import DICoefficients, DIParams, bump_weight, di_bound, di_quintuple_sum
from .lvalue import ZKernel
from .moments import analyze_window, build_modulus_set, census, evaluate
from .optimizer import c_eta, optimize, theta_max
from .selftest import SUITES, run_suites
from .weights import validate_config

__all__ = ["main", "build_parser"]

EXIT_OK, EXIT_FAIL, EXIT_CONFIG = 0, 1, 2


def _fmt(v):
    if isinstance(v, float):
        return format(v, ".17g")
    return v


def write_csv(path: Path, header: list[str], rows: list[dict]) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)  # minimal quoting, CRLF rows
        w.writerow(header)
        for r in rows:
            w.writerow([_fmt(r[h]) for h in header])


def _jsonable(v):
    if isinstance(v, float) and not math.isfinite(v):
        return None
    if isinstance(v, complex):
        return {"re": _jsonable(v.real), "im": _jsonable(v.imag)}
    if isinstance(v, dict):
        return {k: _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    if isinstance(v, np.generic):
        return _jsonable(v.item())
    return v


def write_json(path: Path, obj) -> None:
    path.write_text(json.dumps(_jsonable(obj), indent=2, allow_nan=False) + "\n", encoding="utf-8")


def _common(p: argparse.ArgumentParser) -> None:
    S = argparse.SUPPRESS
    p.add_argument("--config", default=S, help="key = value file; flags override it")
    p.add_argument("--Q", type=float, default=S)
    p.add_argument("--eta1", type=float, default=S)
    p.add_argument("--eta2", type=float, default=S)
    p.add_argument("--a", type=int, default=S)
    p.add_argument("--D", type=int, default=S)
    p.add_argument("--eps-split", type=float, default=S, help="K = ceil(Q^(eta1 + eps_split))")
    p.add_argument("--epsilon", type=float, default=S, help="epsilon in the reference value (1/2 - c - epsilon) * mass")
    p.add_argument("--theta1", type=float, default=S)
    p.add_argument("--theta2", type=float, default=S)
    p.add_argument("--poly1", default=S, help="coefficients of P1 from x^0, e.g. '0,1'")
    p.add_argument("--poly2", default=S)
    p.add_argument("--tau-nv", type=float, default=S)
    p.add_argument("--threads", type=int, default=S, help="0 = one per CPU")
    p.add_argument("--cache", default=S, help="L-value cache file (JSON lines)")
    p.add_argument("--out", default=S, help="output directory")
    p.add_argument("--format", choices=("csv", "json"), default=S)
    p.add_argument("--seed", type=int, default=S)
    p.add_argument("--degree", type=int, default=S)
    p.add_argument("--c0", type=float, default=S)
    p.add_argument("--fast-kernel", action="store_true", default=S)
    p.add_argument("--force", action="store_true", default=S, help="run despite constraint violations")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="nvlab", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"nvlab {__version__} ({BACKEND})")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, helptext in (
        ("census", "weighted non-vanishing census and Cauchy-Schwarz bound"),
        ("moments", "mollified first and second moments against their main terms"),
        ("optimize", "best mollifier polynomials and the resulting ratio"),
        ("kernel-table", "dump Z(x) on a grid"),
        ("expsum-bench", "quintuple-sum ratio sweep"),
        ("selftest", "run the invariant battery"),
    ):
        sp = sub.add_parser(name, help=helptext)
        _common(sp)
        if name == "selftest":
            sp.add_argument("--suite", action="append", default=None, help=f"one of {', '.join(SUITES)}")
        if name == "kernel-table":
            sp.add_argument("--points", type=int, default=400)
        if name == "expsum-bench":
            sp.add_argument("--max-size", type=int, default=16)
    return parser


def load_config(args: argparse.Namespace) -> RunConfig:
    values = {}
    ns = vars(args).copy()
    path = ns.pop("config", None)
    if path is not None:
        values.update(parse_config_file(path))
    for k in ("command", "suite", "points", "max_size"):
        ns.pop(k, None)
    values.update(ns)
    return RunConfig.from_mapping(values)


class ConfigRefused(Exception):
    pass


def _check(cfg: RunConfig, with_spec: bool = True):
    try:
        wcfg = cfg.weight_config()
        spec = cfg.mollifier_spec() if with_spec else None
    except ValueError as exc:
        raise ConfigRefused(str(exc)) from exc
    problems = validate_config(wcfg, spec)
    if 41 * cfg.eta1 + 5 * cfg.eta2 >= 0.5:
        problems.append("41*eta1+5*eta2<1/2 fails")
    if problems and not cfg.force:
        raise ConfigRefused("; ".join(problems))
    return wcfg, spec, problems


def _cache_for(cfg: RunConfig) -> LValueCache | None:
    return LValueCache(cfg.cache, version=__version__) if cfg.cache else None


def _out_dir(cfg: RunConfig) -> Path:
    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _sweep(cfg: RunConfig, echo):
    wcfg, spec, problems = _check(cfg)
    ms = build_modulus_set(wcfg)
    cache = _cache_for(cfg)
    t0 = time.perf_counter()
    data = analyze_window(ms, spec, cfg.threads, cache)
    rep = evaluate(ms, spec, cache=cache, tau_nv=cfg.tau_nv, data=data)
    cen = census(ms, tau_nv=cfg.tau_nv, data=data)
    if cache is not None:
        cache.checkpoint()
    echo(f"{len(ms)} moduli in {time.perf_counter() - t0:.2f}s ({BACKEND} kernels)")
    if problems:
        rep.flags.append("forced past: " + "; ".join(problems))
    return ms, spec, rep, cen


def _ref_value(cfg: RunConfig, mass: float) -> float | None:
    try:
        return (0.5 - c_eta(cfg.eta1, cfg.eta2) - cfg.epsilon) * mass
    except ValueError:
        return None


def cmd_census(cfg: RunConfig, echo=print) -> int:
    ms, spec, rep, cen = _sweep(cfg, echo)
    out = _out_dir(cfg)
    header = ["q", "parity", "primitive_count", "nonvanishing_count", "weight"]
    if cfg.format == "csv":
        write_csv(out / "census.csv", header, cen.rows)
    else:
        write_json(out / "census.json", cen.rows)
    ok = rep.cs_bound <= cen.weighted_nonvanishing_even + 1e-9
    summary = {
        "version": __version__,
        "config": cfg.as_dict(),
        "moduli": len(ms),
        "empty": len(ms) == 0,
        "tau_nv": cfg.tau_nv,
        "weighted_nonvanishing_even": cen.weighted_nonvanishing_even,
        "weighted_total_even": cen.weighted_total_even,
        "weighted_nonvanishing_odd": cen.weighted_nonvanishing_odd,
        "weighted_total_odd": cen.weighted_total_odd,
        "weighted_nonvanishing": cen.weighted_nonvanishing,
        "proportion_even": cen.proportion_even,
        "proportion_odd": cen.proportion_odd,
        "proportion": cen.proportion,
        "S1": rep.s1,
        "S2": rep.s2,
        "mass": rep.mass,
        "cs_bound": rep.cs_bound,
        "cs_bound_le_census": ok,
        "reference_value": _ref_value(cfg, rep.mass),
        "flags": rep.flags,
    }
    write_json(out / "summary.json", summary)
    echo(f"census: even {cen.weighted_nonvanishing_even:.6g} / {cen.weighted_total_even:.6g}, CS bound {rep.cs_bound:.6g}")
    if not ok:
        echo("FAIL: Cauchy-Schwarz bound exceeds the census", file=sys.stderr)
        return EXIT_FAIL
    return EXIT_OK


def cmd_moments(cfg: RunConfig, echo=print) -> int:
    ms, spec, rep, cen = _sweep(cfg, echo)
    out = _out_dir(cfg)
    header = ["q", "weight", "even_primitive", "s1_re", "s1_im", "s2"]
    if cfg.format == "csv":
        write_csv(out / "moments.csv", header, rep.rows)
    else:
        write_json(out / "moments_rows.json", rep.rows)
    ok = rep.s2 >= 0 and rep.cs_bound <= cen.weighted_nonvanishing_even + 1e-9
    write_json(
        out / "moments.json",
        {
            "version": __version__,
            "config": cfg.as_dict(),
            "moduli": len(ms),
            "empty": len(ms) == 0,
            "S1": rep.s1,
            "S2": rep.s2,
            "mass": rep.mass,
            "predict_s1": rep.pred_s1,
            "predict_s2": rep.pred_s2,
            "ratio_s1": rep.ratio_s1,
            "ratio_s2": rep.ratio_s2,
            "cs_bound": rep.cs_bound,
            "census_even": cen.weighted_nonvanishing_even,
            "flags": rep.flags,
        },
    )
    echo(f"moments: |S1|/pred {rep.ratio_s1:.4g}, S2/pred {rep.ratio_s2:.4g}")
    return EXIT_OK if ok else EXIT_FAIL


def cmd_optimize(cfg: RunConfig, echo=print) -> int:
    for name, th in (("theta1", cfg.theta1), ("theta2", cfg.theta2)):
        if not 0 < th < 0.5:
            raise ConfigRefused(f"{name} must lie in (0, 1/2)")
    if not 1 <= cfg.degree:
        raise ConfigRefused("degree must be >= 1")
    try:
        ce, tm = c_eta(cfg.eta1, cfg.eta2), theta_max(cfg.eta1, cfg.eta2)
    except ValueError as exc:
        raise ConfigRefused(f"41*eta1+5*eta2<1/2 fails: {exc}") from exc
    warnings = []
    for name, th in (("theta1", cfg.theta1), ("theta2", cfg.theta2)):
        if th >= tm:
            warnings.append(f"{name}={th} >= theta_max={tm:.6g}")
            echo(f"warning: {warnings[-1]}", file=sys.stderr)
    try:
        r = optimize(cfg.degree, cfg.theta1, cfg.theta2, cfg.eta1, cfg.eta2)
    except ValueError as exc:
        raise ConfigRefused(str(exc)) from exc
    write_json(
        _out_dir(cfg) / "optimize.json",
        {
            "version": __version__,
            "degree": cfg.degree,
            "theta1": cfg.theta1,
            "theta2": cfg.theta2,
            "p1": [str(c) for c in r.p1],
            "p2": [str(c) for c in r.p2],
            "p1_float": [float(c) for c in r.p1],
            "p2_float": [float(c) for c in r.p2],
            "ratio": r.ratio,
            "sandwich_value": r.sandwich,
            "below_sandwich": r.discrepancy,
            "descent_max_dev": r.descent_max_dev,
            "c_eta": ce,
            "theta_max": tm,
            "slack": r.slack,
            "warnings": warnings,
        },
    )
    echo(f"optimize: ratio {r.ratio:.12g}, sandwich {r.sandwich:.12g}, c_eta {ce:.6g}, theta_max {tm:.6g}")
    return EXIT_OK


def cmd_kernel_table(cfg: RunConfig, points: int = 400, echo=print) -> int:
    kcfg = cfg.kernel_config()
    kern = ZKernel(kcfg)
    xs = np.geomspace(1e-3, kern.x_star, points)
    zs = kern(xs)
    out = _out_dir(cfg)
    rows = [{"x": float(x), "Z": float(z)} for x, z in zip(xs, zs)]
    if cfg.format == "csv":
        write_csv(out / "kernel_table.csv", ["x", "Z"], rows)
    else:
        write_json(out / "kernel_table.json", rows)
    write_json(
        out / "kernel.json",
        {
            "config_hash": kcfg.config_hash(),
            "g_coeffs": list(kcfg.g_coeffs),
            "c0": kcfg.c0,
            "height": kern.H,
            "step": kern.h,
            "x_star": kern.x_star,
            "interp_error": getattr(kern, "interp_error", None),
        },
    )
    echo(f"kernel: H={kern.H:g} h={kern.h:g} x*={kern.x_star:g}, {points} points")
    return EXIT_OK


def cmd_expsum_bench(cfg: RunConfig, max_size: int = 16, echo=print) -> int:
    rng = np.random.default_rng(cfg.seed)
    rows = []
    size = 2
    while size <= max_size:
        p = DIParams(C=size, D=size, N=size, R=size, S=size)
        b = DICoefficients(
            {
                (n, r, s): float(rng.normal())
                for n in range(1, size + 1)
                for r in range(size + 1, 2 * size + 1)
                for s in range(size + 1, 2 * size + 1)
            }
        )
        t0 = time.perf_counter()
        val, ratio = di_quintuple_sum(b, bump_weight(p), p)
        rows.append(
            {
                "size": size,
                "terms": len(b.b),
                "abs_sum": abs(val),
                "bound": di_bound(p),
                "norm": b.norm2(),
                "ratio": ratio,
                "seconds": time.perf_counter() - t0,
            }
        )
        echo(f"size {size}: ratio {ratio:.4g}")
        size *= 2
    header = ["size", "terms", "abs_sum", "bound", "norm", "ratio", "seconds"]
    out = _out_dir(cfg)
    if cfg.format == "csv":
        write_csv(out / "expsum_bench.csv", header, rows)
    else:
        write_json(out / "expsum_bench.json", rows)
    return EXIT_OK


def cmd_selftest(cfg: RunConfig, suites=None, echo=print) -> int:
    names = []
    for s in suites or []:
        names.extend(x for x in s.split(",") if x)
    try:
        ok = run_suites(names or None, seed=cfg.seed, cache_path=cfg.cache, echo=echo)
    except KeyError as exc:
        raise ConfigRefused(str(exc.args[0])) from exc
    return EXIT_OK if ok else EXIT_FAIL


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)

    def echo(msg, file=None):
        print(msg, file=file or sys.stdout, flush=True)

    try:
        cfg = load_config(args)
        if args.command == "census":
            return cmd_census(cfg, echo)
        if args.command == "moments":
            return cmd_moments(cfg, echo)
        if args.command == "optimize":
            return cmd_optimize(cfg, echo)
        if args.command == "kernel-table":
            return cmd_kernel_table(cfg, args.points, echo)
        if args.command == "expsum-bench":
            return cmd_expsum_bench(cfg, args.max_size, echo)
        return cmd_selftest(cfg, args.suite, echo)
    except (ConfigError, ConfigRefused, FileNotFoundError) as exc:
        echo(f"invalid configuration: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
