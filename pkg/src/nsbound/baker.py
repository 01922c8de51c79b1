"""Assembly of the final certified bound on log |j(P)|.

Combines the linear-forms-in-logarithms constant, the height data of
the unit system, and the delta/beta/kappa coefficients into the
quantities K1, K2, B0 and the bound itself, evaluates the two
closed-form theorem bounds and the degenerate-case bound, and picks the
combined unit used by the q-series route.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Optional, Sequence, Tuple

from . import numerics as nm
from .cartan import CartanContext
from .cyclotomic import height
from .errors import AllOrdersZero, BadIndex, DomainError, InternalInconsistency
from .numerics import RealInterval
from .siegel import UnitOrderData
from .units import DeltaBetaKappa, UnitSystem, UpsilonData

A_FLOOR = Fraction(16, 100)


def matveev_C1(d: int, prec: int = nm.DEFAULT_PREC) -> RealInterval:
    """min((e/2) d^4.5 30^(d+3), 2^(6d+20)), checked below 2 d^4.5 30^(d+3)."""
    if d < 3:
        raise BadIndex("the Matveev constant is used with d >= 3 only")
    d_iv = RealInterval.exact(d, prec)
    d45 = nm.rpow(d_iv, Fraction(9, 2))
    branch1 = nm.e_const(prec) / 2 * d45 * (30 ** (d + 3))
    branch2 = RealInterval.exact(2 ** (6 * d + 20), prec)
    c1 = nm.min_iv(branch1, branch2)
    nm.require(nm.check_lt(c1, d45 * (2 * 30 ** (d + 3))),
               "Matveev constant not below 2 d^4.5 30^(d+3)")
    return c1


# -- the two cases of the logarithm heights -------------------------------


@dataclass(frozen=True)
class BakerInputs:
    p: int
    d: int
    mode: str
    A_zero: tuple              # d intervals for the zero-order case
    A_nonzero: Optional[tuple]  # d intervals for the nonzero-order case
    omega_zero: RealInterval
    omega_nonzero: Optional[RealInterval]
    omega: RealInterval        # the larger of the two cases
    C1: RealInterval
    lam: RealInterval          # 12 p^7 m_ub
    delta: RealInterval
    beta: RealInterval
    m_kappa: RealInterval
    m_ub: RealInterval


def _a_entry(prec, *candidates) -> RealInterval:
    return nm.max_iv(RealInterval.exact(A_FLOOR, prec), *candidates)


def choose_Ak(us: UnitSystem, orders: Dict[tuple, UnitOrderData],
              upsilons: Dict[tuple, UpsilonData], case: str, mode: str,
              prec: int = nm.DEFAULT_PREC):
    """Per-logarithm height parameters A_1..A_d and their product.

    case 'ord_zero' uses alpha_k = |eta_k| and alpha_d = |Upsilon_{c,1}|^-1;
    case 'ord_nonzero' uses the order-twisted quotients.  In rigorous
    mode the certified values are checked against the closed choices
    p^2/d, 36 p^3/d (zero case) and p^6/d^2, 36 p^7/d^2 (nonzero case);
    paper-worst-case mode returns the closed choices themselves.
    Cusp-dependent quantities are maximized over every cusp, and the
    nonzero case over every non-identity Galois element as well.
    """
    ctx = us.ctx
    p, d = ctx.p, ctx.d
    half = Fraction(p - 1, 2)
    if case not in ("ord_zero", "ord_nonzero"):
        raise ValueError(case)

    if mode == "paper-worst-case":
        if case == "ord_zero":
            unit_q, last_q = Fraction(p * p, d), Fraction(36 * p ** 3, d)
        else:
            unit_q, last_q = Fraction(p ** 6, d * d), Fraction(36 * p ** 7, d * d)
        a_vec = (RealInterval.exact(unit_q, prec),) * (d - 1) \
            + (RealInterval.exact(last_q, prec),)
        omega = RealInterval.exact(unit_q ** (d - 1) * last_q, prec)
        return a_vec, omega
    if mode != "rigorous":
        raise ValueError(f"unknown mode {mode!r}")

    cusp_labels = sorted({c for (c, _) in orders})
    eta_h = [height(us.eta[i], prec) for i in us.independent]
    eta_log_id = [abs(us.log_abs_eta(i, 1)) for i in us.independent]

    a_vec = []
    if case == "ord_zero":
        for h, la in zip(eta_h, eta_log_id):
            a_vec.append(_a_entry(prec, h * half, la))
        ups_id = [upsilons[(c, 1)] for c in cusp_labels]
        a_vec.append(_a_entry(prec,
                              nm.max_iv(*(u.height_ub for u in ups_id)) * half,
                              nm.max_iv(*(abs(u.log_abs) for u in ups_id))))
        unit_cap = Fraction(p * p, d)
        last_cap = Fraction(36 * p ** 3, d)
    else:
        pairs = [(c, s) for c in cusp_labels for s in ctx.coset_reps[1:]]
        ord_id = {c: abs(orders[(c, 1)].ord) for c in cusp_labels}
        for idx, (h, la) in enumerate(zip(eta_h, eta_log_id)):
            cands_h = []
            cands_l = []
            for c, s in pairs:
                n_sig = abs(orders[(c, s)].ord)
                n_id = ord_id[c]
                cands_h.append(h * (n_sig + n_id) * half)
                cands_l.append(la * n_sig +
                               abs(us.log_abs_eta(us.independent[idx], s)) * n_id)
            a_vec.append(_a_entry(prec, nm.max_iv(*cands_h), nm.max_iv(*cands_l)))
        cands_h = []
        cands_l = []
        for c, s in pairs:
            n_sig = abs(orders[(c, s)].ord)
            n_id = ord_id[c]
            u1, us_ = upsilons[(c, 1)], upsilons[(c, s)]
            cands_h.append((u1.height_ub * n_sig + us_.height_ub * n_id) * half)
            cands_l.append(abs(u1.log_abs) * n_sig + abs(us_.log_abs) * n_id)
        a_vec.append(_a_entry(prec, nm.max_iv(*cands_h), nm.max_iv(*cands_l)))
        unit_cap = Fraction(p ** 6, d * d)
        last_cap = Fraction(36 * p ** 7, d * d)

    for a in a_vec[:-1]:
        nm.require(nm.check_le(a, RealInterval.exact(unit_cap, prec)),
                   f"A_k exceeds the closed choice {unit_cap} in case {case}")
    nm.require(nm.check_le(a_vec[-1], RealInterval.exact(last_cap, prec)),
               f"A_d exceeds the closed choice {last_cap} in case {case}")

    omega = RealInterval.exact(1, prec)
    for a in a_vec:
        omega = omega * a
    return tuple(a_vec), omega


def build_baker_inputs(us: UnitSystem, orders, upsilons, dbk: DeltaBetaKappa,
                       mode: str, prec: int = nm.DEFAULT_PREC) -> BakerInputs:
    """Both height cases, resolved conservatively by the larger product."""
    ctx = us.ctx
    p, d = ctx.p, ctx.d
    a_zero, omega_zero = choose_Ak(us, orders, upsilons, "ord_zero", mode, prec)
    a_nonzero, omega_nonzero = choose_Ak(us, orders, upsilons, "ord_nonzero", mode, prec)
    omega = nm.max_iv(omega_zero, omega_nonzero)
    if mode == "rigorous":
        omega_cap = RealInterval.exact(Fraction(36 * p ** (6 * d + 1), d ** (2 * d)), prec)
        nm.require(nm.check_le(omega, omega_cap),
                   "height product exceeds 36 p^(6d+1) / d^(2d)")
    lam = dbk.m_ub * (12 * p ** 7)
    return BakerInputs(p, d, mode, a_zero, a_nonzero, omega_zero, omega_nonzero,
                       omega, matveev_C1(d, prec), lam,
                       dbk.delta, dbk.beta, dbk.m_kappa, dbk.m_ub)


def worst_case_dbk(ctx: CartanContext, m_ub: RealInterval, prec: int) -> DeltaBetaKappa:
    """The blanket closed forms for delta, beta and m*kappa."""
    p = ctx.p
    p_iv = RealInterval.exact(p, prec)
    logp = nm.log(p_iv)
    log_low = nm.pow_int(logp, (p - 5) // 2)
    delta = nm.rpow(p_iv, Fraction(3 * p - 3, 4)) * log_low
    beta = nm.rpow(p_iv, Fraction(3 * p - 7, 4)) * nm.pow_int(logp, (p - 3) // 2) * 36
    m_kappa = nm.rpow(p_iv, Fraction(3 * p - 11, 4)) * log_low
    kappa = m_kappa / m_ub
    return DeltaBetaKappa({}, {}, delta, beta, kappa, m_kappa, m_ub)


# -- the bound -------------------------------------------------------------


@dataclass(frozen=True)
class BoundReport:
    p: int
    d: int
    mode: str
    K1: RealInterval
    K2: RealInterval
    B0: RealInterval
    bound_log_j: RealInterval


def assemble_bound(bi: BakerInputs, prec: int = nm.DEFAULT_PREC) -> BoundReport:
    """K1, K2, B0 and the bound
    p C1 Omega ((p-1)/2)^2 (1 + log((p-1)/2)) (1 + log B0) + p log lam + log 2."""
    p = bi.p
    half = Fraction(p - 1, 2)
    shared = bi.C1 * bi.omega * (p * half * half) \
        * (1 + nm.log(RealInterval.exact(half, prec)))
    k1 = bi.delta * shared
    if not k1.lo > 1:
        raise DomainError("K1 <= 1 would make log K1 nonpositive; cannot happen for p >= 7")
    log_lam = nm.log(bi.lam)
    k2 = k1 + bi.beta + bi.m_kappa * (2 * p ** 3) + bi.delta * p * log_lam
    b0 = (k1 * nm.log(k1) + k2) * 2
    bound = shared * (1 + nm.log(b0)) + log_lam * p + nm.log(RealInterval.exact(2, prec))
    return BoundReport(p, bi.d, bi.mode, k1, k2, b0, bound)


def worst_case_ceilings(p: int, prec: int):
    """K1 < p^(5p+9)(log p)^(p-1), B0 < 16 p^(5p+10)(log p)^p, 1+log B0 < 8p log p."""
    p_iv = RealInterval.exact(p, prec)
    logp = nm.log(p_iv)
    k1_cap = RealInterval.exact(p ** (5 * p + 9), prec) * nm.pow_int(logp, p - 1)
    b0_cap = RealInterval.exact(16 * p ** (5 * p + 10), prec) * nm.pow_int(logp, p)
    logb0_cap = logp * (8 * p)
    return k1_cap, b0_cap, logb0_cap


def theorem_bounds(p: int, d: int, prec: int = nm.DEFAULT_PREC):
    """The two closed-form bounds: C(d) p^(6d+5) (log p)^2 with
    C(d) = 30^(d+5) d^(-2d+4.5), and 41993 * 13^p * p^(2p+7.5) (log p)^2."""
    if d < 3 or (p - 1) % (2 * d) != 0:
        raise BadIndex(f"d = {d} invalid for p = {p}")
    logp2 = nm.pow_int(nm.log(RealInterval.exact(p, prec)), 2)
    c_d = nm.rpow(RealInterval.exact(d, prec), Fraction(9 - 4 * d, 2)) * (30 ** (d + 5))
    t1 = c_d * (p ** (6 * d + 5)) * logp2
    t2 = RealInterval.exact(41993 * 13 ** p * p ** (2 * p + 7), prec) \
        * nm.sqrt(RealInterval.exact(p, prec)) * logp2
    return t1, t2


@dataclass(frozen=True)
class LambdaZeroBound:
    branch_stable: RealInterval   # the branch with vanishing winding integer
    branch_winding: RealInterval  # the branch with nonzero winding integer
    value: RealInterval           # max of the two


def lambda_zero_bound(p: int, prec: int = nm.DEFAULT_PREC) -> LambdaZeroBound:
    """Bound for the degenerate case of the linear form:
    p^2 log(48 p^12 + 48 p^8) + p log(96 p^2 (p^5 + p + 1)) + log 2,
    and the alternative branch p log(96 p^2 (p^5 + p)) + log 2."""
    if p < 7:
        raise BadIndex("p >= 7 required")
    log2 = nm.log(RealInterval.exact(2, prec))
    b1 = nm.log(RealInterval.exact(48 * p ** 12 + 48 * p ** 8, prec)) * p ** 2 \
        + nm.log(RealInterval.exact(96 * p ** 2 * (p ** 5 + p + 1), prec)) * p + log2
    b2 = nm.log(RealInterval.exact(96 * p ** 2 * (p ** 5 + p), prec)) * p + log2
    return LambdaZeroBound(b1, b2, nm.max_iv(b1, b2))


def easy_case_fallback(p: int, prec: int = nm.DEFAULT_PREC) -> RealInterval:
    """Bound when |q| > 10^-p already: log |j| <= p log 10 + log 2."""
    return nm.log(RealInterval.exact(10, prec)) * p + nm.log(RealInterval.exact(2, prec))


# -- combined unit for the degenerate nonzero-order case -------------------


@dataclass(frozen=True)
class CombinedUnitDescriptor:
    cusp_label: int
    orbit_label: int  # translate with negative order, playing the role of U
    sigma: int        # Galois element with positive order for U
    n1: int           # -ord_c U
    n2: int           # ord_c U^sigma


def combined_unit_descriptor(ctx: CartanContext,
                             orders_at_cusp: Sequence[UnitOrderData]) -> CombinedUnitDescriptor:
    """Deterministic choice of U with ord < 0 and sigma with ord > 0.

    Smallest |ord| wins on each side, ties broken by the Galois label.
    The per-cusp order sum is zero, so both signs exist as soon as any
    order is nonzero.
    """
    cusps = {od.cusp_label for od in orders_at_cusp}
    if len(cusps) != 1:
        raise ValueError("order data must all belong to one cusp")
    cusp_label = cusps.pop()
    neg = sorted((od for od in orders_at_cusp if od.ord < 0),
                 key=lambda od: (-od.ord, od.sigma))
    pos = sorted((od for od in orders_at_cusp if od.ord > 0),
                 key=lambda od: (od.ord, od.sigma))
    if not neg and not pos:
        raise AllOrdersZero(f"every order vanishes at cusp {cusp_label}")
    if not neg or not pos:
        raise InternalInconsistency("orders of one sign only; the cusp sum cannot be 0")
    u = neg[0]
    w = pos[0]
    sigma_rel = ctx.coset_mul(ctx.coset_inv(u.sigma), w.sigma)
    bound = ctx.p ** 2 * (ctx.p ** 2 - 1) // ctx.d
    if -u.ord > bound or w.ord > bound:
        raise InternalInconsistency("combined-unit exponent exceeds the order bound")
    return CombinedUnitDescriptor(cusp_label, ctx.coset_mul(1, u.sigma),
                                  sigma_rel, -u.ord, w.ord)
