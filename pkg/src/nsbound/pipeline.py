"""End-to-end pipeline: from (p, d) to a fully certified bound report.

Runs the whole chain at a working precision and doubles it whenever a
certified comparison stays undecided, up to the configured cap.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from typing import Dict, Optional

from . import baker, numerics as nm, qseries, siegel, units
from .baker import (BakerInputs, BoundReport, CombinedUnitDescriptor, LambdaZeroBound,
                    assemble_bound, build_baker_inputs, combined_unit_descriptor,
                    easy_case_fallback, lambda_zero_bound, theorem_bounds,
                    worst_case_ceilings, worst_case_dbk)
from .cartan import CartanContext, build_context, cusp_classes, group_order, orbit_decomposition
from .errors import AllOrdersZero, BadIndex
from .numerics import RealInterval
from .units import (ASSUMPTIONS, DeltaBetaKappa, IndexBounds, UnitSystem,
                    delta_beta_kappa, index_bounds, upsilon_heights)

MODES = ("rigorous", "paper-worst-case")

ANCHORS = {
    "group_order": "|G| = 2(p^2-1) by enumeration of both matrix shapes",
    "orbits": "d orbits of size (p^2-1)/d, level sets of x^2 - X^(-1) y^2 mod H",
    "cusps": "(p-1)/2 classes x^2 - X y^2 = +-a; a = 1 is the cusp at infinity",
    "hplus_bound": "class number ceiling p^((p-3)/4) (log p)^((p-3)/2)",
    "m_bound": "unit-index ceiling h+ (p-1)/(2d)",
    "m_formula_bound": "coarse index ceiling p^((p+1)/4) (log p)^((p-3)/2)",
    "m_kappa": "certified ceiling for the product m * kappa",
    "det_A": "determinant of (log |eta_l^(sigma_k)|); |det A| >= m R with R > 0.32",
    "delta": "max_k (1/p) sum_l m|alpha_kl| |ord_c| over all cusps",
    "beta": "max_k sum_l m|alpha_kl| |log Upsilon| over all cusps",
    "kappa": "max(max_k sum_l |alpha_kl|, 1)",
    "C1": "Matveev constant min((e/2) d^4.5 30^(d+3), 2^(6d+20))",
    "omega": "product of per-logarithm heights A_1..A_d, larger of the two order cases",
    "lambda": "12 p^7 m, with m replaced by its certified ceiling",
    "K1": "delta p C1 Omega ((p-1)/2)^2 (1 + log((p-1)/2))",
    "K2": "K1 + beta + 2 p^3 m kappa + delta p log lambda",
    "B0": "2 (K1 log K1 + K2), ceiling for the exponent max-norm",
    "bound_log_j": "p C1 Omega ((p-1)/2)^2 (1+log((p-1)/2)) (1+log B0) + p log lambda + log 2",
    "theorem1": "closed form C(d) p^(6d+5) (log p)^2, C(d) = 30^(d+5) d^(-2d+4.5)",
    "theorem2": "closed form 41993 * 13^p * p^(2p+7.5) (log p)^2",
    "lambda_zero": "degenerate linear form: p^2 log(48p^12+48p^8) + p log(96p^2(p^5+p+1)) + log 2",
    "easy_fallback": "p log 10 + log 2 when |q| > 10^-p already",
    "overall_bound": "max of bound_log_j, lambda_zero and the easy fallback",
}


@dataclass(frozen=True)
class PipelineResult:
    ctx: CartanContext
    precision_used: int
    mode: str
    unit_system: UnitSystem
    index: IndexBounds
    dbk: DeltaBetaKappa
    baker_inputs: BakerInputs
    report: BoundReport
    theorem1: RealInterval
    theorem2: RealInterval
    lambda_zero: LambdaZeroBound
    easy_fallback: RealInterval
    overall_bound: RealInterval
    combined_unit: Optional[CombinedUnitDescriptor]
    timings: Dict[str, float]


def default_d(p: int) -> int:
    half = (p - 1) // 2
    for d in range(3, half + 1):
        if half % d == 0:
            return d
    raise BadIndex(f"(p-1)/2 = {half} has no divisor >= 3")


def _build(p: int, d: int, mode: str, prec: int,
           hplus_override: Optional[int],
           unit_system_loader=None) -> PipelineResult:
    timings = {}
    t0 = time.monotonic()
    ctx = build_context(p, d)
    group_order(ctx)
    orbit_decomposition(ctx)
    cusp_classes(ctx)
    timings["context"] = time.monotonic() - t0

    t0 = time.monotonic()
    if unit_system_loader is not None:
        us = unit_system_loader(ctx, prec)
    else:
        us = units.build_unit_system(ctx, prec)
    timings["unit_system"] = time.monotonic() - t0

    t0 = time.monotonic()
    ib = index_bounds(ctx, prec, hplus_override)
    orders = siegel.all_order_data(ctx, prec)
    ups = upsilon_heights(us, orders, prec)
    m_ub = ib.m_bound if mode == "rigorous" else ib.m_formula_bound
    if mode == "rigorous":
        dbk = delta_beta_kappa(us, orders, ups, m_ub, prec)
    else:
        dbk = worst_case_dbk(ctx, m_ub, prec)
    timings["coefficients"] = time.monotonic() - t0

    t0 = time.monotonic()
    bi = build_baker_inputs(us, orders, ups, dbk, mode, prec)
    report = assemble_bound(bi, prec)
    t1, t2 = theorem_bounds(p, d, prec)
    lz = lambda_zero_bound(p, prec)
    fallback = easy_case_fallback(p, prec)
    overall = nm.max_iv(report.bound_log_j, lz.value, fallback)

    if mode == "paper-worst-case":
        k1_cap, b0_cap, logb0_cap = worst_case_ceilings(p, prec)
        nm.require(nm.check_lt(report.K1, k1_cap), "K1 ceiling p^(5p+9)(log p)^(p-1) failed")
        nm.require(nm.check_lt(report.B0, b0_cap), "B0 ceiling 16 p^(5p+10)(log p)^p failed")
        nm.require(nm.check_lt(1 + nm.log(report.B0), logb0_cap), "1+log B0 < 8p log p failed")
        nm.require(nm.check_le(report.bound_log_j, t1), "bound does not dominate into theorem 1")
    nm.require(nm.check_le(lz.value, report.bound_log_j),
               "degenerate-case bound unexpectedly above the main bound")

    combined = None
    for cusp in cusp_classes(ctx):
        try:
            combined = combined_unit_descriptor(
                ctx, [orders[(cusp.label, rep)] for rep in ctx.coset_reps])
            break
        except AllOrdersZero:
            continue
    timings["bound"] = time.monotonic() - t0

    return PipelineResult(ctx, prec, mode, us, ib, dbk, bi, report, t1, t2, lz,
                          fallback, overall, combined, timings)


def run_pipeline(p: int, d: Optional[int] = None, mode: str = "rigorous",
                 precision_bits: int = nm.DEFAULT_PREC,
                 precision_cap: int = nm.PREC_CAP,
                 hplus_override: Optional[int] = None,
                 unit_system_loader=None) -> PipelineResult:
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}")
    if d is None:
        d = default_d(p)
    return nm.with_refinement(
        lambda prec: _build(p, d, mode, prec, hplus_override, unit_system_loader),
        start_bits=precision_bits, cap_bits=precision_cap)


def assumptions(hplus_override: Optional[int]) -> tuple:
    base = list(ASSUMPTIONS)
    if hplus_override is not None:
        base[1] = f"class number of the real cyclotomic field supplied by the user: {hplus_override}"
    return tuple(base)
