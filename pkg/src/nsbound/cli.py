"""Command-line front end.

Subcommands:
  run     compute the certified bound report for (p, d)
  verify  run the identity and bound verification suites

Exit codes: 0 ok, 2 bad configuration, 3 precision exhausted,
4 internal inconsistency, 5 verification failure.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

from . import baker, numerics as nm, qseries, siegel
from .cache import CACHE_ENV, cached_unit_system
from .cartan import build_context, cusp_classes, group_order, orbit_decomposition
from .cyclotomic import height
from .errors import (BadIndex, BadLevel, BadSubgroup, BoundViolation,
                     InternalInconsistency, NsBoundError, PrecisionExhausted)
from .numerics import ComplexInterval, RealInterval, certified_lower, certified_upper
from .pipeline import ANCHORS, PipelineResult, assumptions, default_d, run_pipeline
from .units import build_unit_system, upsilon_heights

VERIFY_SUITES = ("product-identity", "lambda-bounds", "heights", "orbits")

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_PRECISION = 3
EXIT_INTERNAL = 4
EXIT_VERIFY = 5


@dataclass
class RunConfig:
    p: int
    d: Optional[int] = None
    precision_bits: int = nm.DEFAULT_PREC
    precision_cap: int = nm.PREC_CAP
    mode: str = "rigorous"
    hplus_override: Optional[int] = None
    verify: tuple = ()
    tau_im: Optional[Fraction] = None
    output: Optional[str] = None
    fmt: str = "json"
    cache_dir: Optional[str] = None
    timings: bool = False


def _interval_json(x: RealInterval) -> dict:
    return {"lo": certified_lower(x, 30), "hi": certified_upper(x, 30),
            "decimal_hi": certified_upper(x, 12)}


def _report_payload(res: PipelineResult, cfg: RunConfig) -> dict:
    ctx = res.ctx
    n_g, n_gh = group_order(ctx)
    orbits = orbit_decomposition(ctx)
    pipeline = {
        "hplus_bound": _interval_json(res.index.hplus_bound),
        "m_bound": _interval_json(res.index.m_bound),
        "m_formula_bound": _interval_json(res.index.m_formula_bound),
        "det_A": _interval_json(res.unit_system.det_A),
        "delta": _interval_json(res.dbk.delta),
        "beta": _interval_json(res.dbk.beta),
        "kappa": _interval_json(res.dbk.kappa),
        "m_kappa": _interval_json(res.dbk.m_kappa),
        "C1": _interval_json(res.baker_inputs.C1),
        "omega": _interval_json(res.baker_inputs.omega),
        "lambda": _interval_json(res.baker_inputs.lam),
        "K1": _interval_json(res.report.K1),
        "K2": _interval_json(res.report.K2),
        "B0": _interval_json(res.report.B0),
    }
    bounds = {
        "bound_log_j": _interval_json(res.report.bound_log_j),
        "theorem1": _interval_json(res.theorem1),
        "theorem2": _interval_json(res.theorem2),
        "lambda_zero": _interval_json(res.lambda_zero.value),
        "easy_fallback": _interval_json(res.easy_fallback),
        "overall_bound": _interval_json(res.overall_bound),
    }
    combined = None
    if res.combined_unit is not None:
        cu = res.combined_unit
        combined = {"cusp": cu.cusp_label, "orbit": cu.orbit_label,
                    "sigma": cu.sigma, "n1": cu.n1, "n2": cu.n2}
    return {
        "context": {
            "p": ctx.p, "d": ctx.d, "xi": ctx.xi, "H": list(ctx.H),
            "galois_reps": list(ctx.coset_reps),
            "group_order": n_g, "subgroup_order": n_gh,
            "cusps": len(cusp_classes(ctx)),
            "orbit_sizes": [len(o.points) for o in orbits],
            "mode": res.mode, "precision_bits": res.precision_used,
        },
        "assumptions": list(assumptions(cfg.hplus_override)),
        "pipeline": pipeline,
        "bounds": bounds,
        "combined_unit": combined,
        "anchors": ANCHORS,
        "timings": {k: round(v, 3) for k, v in res.timings.items()} if cfg.timings else {},
    }


def _render_text(payload: dict) -> str:
    ctx = payload["context"]
    lines = [
        f"level p = {ctx['p']}, index d = {ctx['d']}, non-residue = {ctx['xi']}, "
        f"mode = {ctx['mode']}, precision = {ctx['precision_bits']} bits",
        f"|G| = {ctx['group_order']}, |G_H| = {ctx['subgroup_order']}, "
        f"cusps = {ctx['cusps']}, orbit sizes = {ctx['orbit_sizes']}",
        "",
        f"{'quantity':<16} {'certified upper':<22} {'anchor'}",
        "-" * 100,
    ]
    anchors = payload["anchors"]
    for section in ("pipeline", "bounds"):
        for key, val in payload[section].items():
            lines.append(f"{key:<16} {val['decimal_hi']:<22} {anchors.get(key, '')}")
    if payload["combined_unit"]:
        cu = payload["combined_unit"]
        lines.append("")
        lines.append(f"combined unit at cusp {cu['cusp']}: orbit {cu['orbit']}, "
                     f"sigma {cu['sigma']}, exponents 2*{cu['n2']}, 2*{cu['n1']}")
    lines.append("")
    for a in payload["assumptions"]:
        lines.append(f"assumption: {a}")
    if payload["timings"]:
        lines.append("")
        for k, v in payload["timings"].items():
            lines.append(f"timing {k}: {v} s")
    return "\n".join(lines) + "\n"


def _emit(cfg: RunConfig, text: str) -> None:
    if cfg.output in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(cfg.output, "w") as fh:
            fh.write(text)


def cmd_run(cfg: RunConfig) -> int:
    res = run_pipeline(cfg.p, cfg.d, cfg.mode, cfg.precision_bits, cfg.precision_cap,
                       cfg.hplus_override, cached_unit_system(cfg.cache_dir))
    payload = _report_payload(res, cfg)
    if cfg.fmt == "json":
        _emit(cfg, json.dumps(payload, indent=2, sort_keys=True) + "\n")
    else:
        _emit(cfg, _render_text(payload))
    return EXIT_OK


# -- verification suites ---------------------------------------------------


def _default_tau_im(p: int, tau_im: Optional[Fraction], deep: bool) -> Fraction:
    if tau_im is not None:
        return tau_im
    if not deep:
        return Fraction(2)
    import math
    return Fraction(max(8, math.ceil(p * math.log(10) / (2 * math.pi)) + 1))

def _suite_product_identity(cfg: RunConfig, lines: list) -> bool:
    prec = max(cfg.precision_bits, 512)
    ctx = build_context(cfg.p, cfg.d or default_d(cfg.p))
    ok = True
    for im in {_default_tau_im(cfg.p, cfg.tau_im, False), Fraction(8)}:
        tau = ComplexInterval.exact(0, im, prec)
        r = siegel.verify_product_identity(ctx, tau, prec)
        good = r.contains(1) and r.width() < Fraction(1, 10 ** 20)
        ok &= good
        lines.append(f"{'PASS' if good else 'FAIL'} product-identity tau={im}i: "
                     f"|prod u_a| / p^(12p) in [{certified_lower(r, 25)}, {certified_upper(r, 25)}]")
    return ok


def _suite_orbits(cfg: RunConfig, lines: list) -> bool:
    ctx = build_context(cfg.p, cfg.d or default_d(cfg.p))
    n_g, n_gh = group_order(ctx)
    orbits = orbit_decomposition(ctx)
    cusps = cusp_classes(ctx)
    ok = (n_g == 2 * (ctx.p ** 2 - 1) and len(cusps) == (ctx.p - 1) // 2
          and len(orbits) == ctx.d
          and all(len(o.points) * ctx.d == ctx.p ** 2 - 1 for o in orbits))
    lines.append(f"{'PASS' if ok else 'FAIL'} orbits: |G|={n_g}, |G_H|={n_gh}, "
                 f"{len(orbits)} orbits x {len(orbits[0].points)}, {len(cusps)} cusps")
    return ok


def _suite_heights(cfg: RunConfig, lines: list) -> bool:
    prec = cfg.precision_bits
    ctx = build_context(cfg.p, cfg.d or default_d(cfg.p))
    p, d = ctx.p, ctx.d
    us = build_unit_system(ctx, prec)
    log2 = nm.log(RealInterval.exact(2, prec))
    logp2 = nm.log(RealInterval.exact(Fraction(p, 2), prec))
    ok = True
    worst = RealInterval.exact(0, prec)
    for x in us.xi:
        h = height(x, prec)
        worst = nm.max_iv(worst, h)
        ok &= bool(h.certainly_le(log2 * 2))
    lines.append(f"{'PASS' if ok else 'FAIL'} heights: max h(xi) = "
                 f"{certified_upper(worst, 10)} <= 2 log 2")
    eta_cap = log2 * Fraction(p - 1, d)
    eta_ok = all(height(e, prec).certainly_le(eta_cap) for e in us.eta)
    lines.append(f"{'PASS' if eta_ok else 'FAIL'} heights: h(eta) <= (p-1) log2 / d")
    ok &= eta_ok
    eta0_ok = us.eta0_height().certainly_le(log2 * Fraction(12 * p * (p - 1), d))
    lines.append(f"{'PASS' if eta0_ok else 'FAIL'} heights: h(eta0) <= 12 p (p-1) log2 / d")
    ok &= bool(eta0_ok)
    orders = siegel.all_order_data(ctx, prec)
    try:
        upsilon_heights(us, orders, prec)  # asserts the Upsilon ceilings
        lines.append("PASS heights: h(Upsilon) <= 36 p (p-1) log2 / d and log ceiling")
    except (BoundViolation, PrecisionExhausted) as err:
        lines.append(f"FAIL heights: {err}")
        ok = False
    log_eta_cap = logp2 * Fraction(p - 1, 2 * d)
    log_ok = True
    for i in range(len(us.eta)):
        for rep in ctx.coset_reps:
            log_ok &= bool(abs(us.log_abs_eta(i, rep)).certainly_lt(log_eta_cap))
    lines.append(f"{'PASS' if log_ok else 'FAIL'} heights: |log eta^sigma| < (p-1) log(p/2) / (2d)")
    return ok and log_ok


def _suite_lambda_bounds(cfg: RunConfig, lines: list) -> bool:
    prec = cfg.precision_bits
    ctx = build_context(cfg.p, cfg.d or default_d(cfg.p))
    K = 4 * ctx.p ** 2
    orb = orbit_decomposition(ctx)[0]
    cusp = cusp_classes(ctx)[0]
    fs = qseries.log_unit_series(ctx, orb, cusp, 1, K, 24 * ctx.p)
    try:
        qseries.verify_lambda_bounds(fs, K, prec)
    except (BoundViolation, PrecisionExhausted) as err:
        lines.append(f"FAIL lambda-bounds: {err}")
        return False
    first = qseries.first_nonzero(fs)
    lines.append(f"PASS lambda-bounds: all k <= {K} within 48 p^2 (k+p), integral "
                 f"k*lambda_k, height ceiling; first nonzero k = {first} "
                 f"(theoretical ceiling p^5 = {ctx.p ** 5})")
    return True


def cmd_verify(cfg: RunConfig) -> int:
    suites = cfg.verify or VERIFY_SUITES
    lines = []
    ok = True
    for suite in suites:
        if suite == "product-identity":
            ok &= _suite_product_identity(cfg, lines)
        elif suite == "orbits":
            ok &= _suite_orbits(cfg, lines)
        elif suite == "heights":
            ok &= _suite_heights(cfg, lines)
        elif suite == "lambda-bounds":
            ok &= _suite_lambda_bounds(cfg, lines)
        else:
            raise BadIndex(f"unknown verification suite {suite!r}")
    _emit(cfg, "\n".join(lines) + "\n")
    return EXIT_OK if ok else EXIT_VERIFY


# -- argument parsing -------------------------------------------------------


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="nsbound",
        description="Certified bounds for the j-invariant of integral points on "
                    "the modular curves attached to non-split Cartan normalizers.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--p", type=int, required=True, help="prime level, >= 7")
        sp.add_argument("--d", type=int, default=None,
                        help="subgroup index, a divisor >= 3 of (p-1)/2 "
                             "(default: the smallest one)")
        sp.add_argument("--precision-bits", type=int, default=nm.DEFAULT_PREC)
        sp.add_argument("--precision-cap", type=int, default=nm.PREC_CAP)
        sp.add_argument("--tau-im", type=Fraction, default=None,
                        help="imaginary part of the verification point tau")
        sp.add_argument("--output", default=None, help="path or '-' for stdout")
        sp.add_argument("--format", dest="fmt", choices=("json", "text"), default="json")
        sp.add_argument("--cache-dir", default=os.environ.get(CACHE_ENV),
                        help=f"unit-system cache directory (default: ${CACHE_ENV})")

    run_p = sub.add_parser("run", help="compute the bound report")
    common(run_p)
    run_p.add_argument("--mode", choices=("rigorous", "paper-worst-case"),
                       default="rigorous")
    run_p.add_argument("--hplus-override", type=int, default=None,
                       help="known class number of the real cyclotomic field, "
                            "sharpens the index ceiling")
    run_p.add_argument("--timings", action="store_true",
                       help="include wall-clock timings in the report")

    ver_p = sub.add_parser("verify", help="run verification suites")
    common(ver_p)
    ver_p.add_argument("--verify", action="append", choices=VERIFY_SUITES,
                       default=None, help="suite to run (repeatable; default: all)")
    return parser


def _config_from_args(args) -> RunConfig:
    return RunConfig(
        p=args.p, d=args.d,
        precision_bits=args.precision_bits, precision_cap=args.precision_cap,
        mode=getattr(args, "mode", "rigorous"),
        hplus_override=getattr(args, "hplus_override", None),
        verify=tuple(args.verify) if getattr(args, "verify", None) else (),
        tau_im=args.tau_im, output=args.output, fmt=args.fmt,
        cache_dir=args.cache_dir, timings=getattr(args, "timings", False))


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        cfg = _config_from_args(args)
        if args.command == "run":
            return cmd_run(cfg)
        return cmd_verify(cfg)
    except (BadLevel, BadIndex, BadSubgroup, ValueError) as err:
        print(f"configuration error: {err}", file=sys.stderr)
        return EXIT_CONFIG
    except PrecisionExhausted as err:
        print(f"precision exhausted: {err}", file=sys.stderr)
        return EXIT_PRECISION
    except (InternalInconsistency, BoundViolation, NsBoundError) as err:
        print(f"internal inconsistency: {err}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
