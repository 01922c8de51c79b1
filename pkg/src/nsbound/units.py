"""Cyclotomic unit system and the quantities feeding the final bound.

Builds the totally real units xi_1 .. xi_{(p-3)/2}, their subfield
norms eta_k, the element mu = N(1 - zeta) whose 12p-th power eta0 is
kept factored, the Galois log-matrix A with a certified inverse, and
the delta / beta / kappa data.  The group index m of the eta-lattice is
never computed; every use is through a certified upper bound, and each
m * alpha product is additionally capped by |cofactor| / 0.32 via the
regulator lower bound R > 0.32, which keeps all downstream quantities
below their closed-form ceilings.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Optional, Tuple

from . import numerics as nm
from .cartan import CartanContext
from .cyclotomic import CycloNumber, embedding_table, height, norm_to_K
from .errors import IndependenceFailure, PrecisionExhausted
from .numerics import RealInterval
from .siegel import UnitOrderData, gamma_height

REGULATOR_FLOOR = Fraction(32, 100)

ASSUMPTIONS = (
    "regulator lower bound R > 0.32 for totally real fields, taken from the literature",
    "class number of the real cyclotomic field bounded by p^((p-3)/4) (log p)^((p-3)/2)",
)


def build_xi(p: int) -> Tuple[CycloNumber, ...]:
    """The units xi_{k-1} = zeta^{(1-k)/2} (1-zeta^k)/(1-zeta), k = 2..(p-1)/2.

    (1-zeta^k)/(1-zeta) is expanded exactly as 1 + zeta + ... + zeta^{k-1}.
    For even k the half-integer power is resolved mod p, which flips the
    sign of the analytic value e^{pi i (1-k)/p}; the sign is restored so
    that each xi embeds to sin(pi a k / p) / sin(pi a / p).
    """
    inv2 = pow(2, -1, p)
    out = []
    for k in range(2, (p - 1) // 2 + 1):
        geo = CycloNumber(p, tuple(Fraction(1) if i < k - 1 else Fraction(0)
                                   for i in range(p - 1))) + 1
        xi = CycloNumber.zeta_pow(p, ((1 - k) * inv2) % p) * geo
        if k % 2 == 0:
            xi = -xi
        out.append(xi)
    return tuple(out)


def build_mu(ctx: CartanContext) -> CycloNumber:
    """mu = norm of 1 - zeta down to the subfield fixed by H."""
    return norm_to_K(CycloNumber.one_minus_zeta_pow(ctx.p, 1), ctx)


@dataclass(frozen=True)
class UnitSystem:
    ctx: CartanContext
    xi: Tuple[CycloNumber, ...]
    eta: Tuple[CycloNumber, ...]
    independent: Tuple[int, ...]  # indices into eta of the chosen d-1 units
    mu: CycloNumber
    eta0_exponent: int            # eta0 = mu ** eta0_exponent, never expanded
    A: tuple                      # (d-1) x (d-1) log |eta_l^{sigma_k}|
    A_inv: tuple
    det_A: RealInterval
    prec: int

    def log_abs_eta(self, eta_index: int, rep: int) -> RealInterval:
        """log |eta_index-th unit under the coset embedding rep|."""
        table = embedding_table(self.eta[eta_index], self.prec)
        return nm.log(table.at(rep).abs())

    def log_abs_mu(self, rep: int) -> RealInterval:
        table = embedding_table(self.mu, self.prec)
        return nm.log(table.at(rep).abs())

    def log_abs_eta0(self, rep: int) -> RealInterval:
        return self.log_abs_mu(rep) * self.eta0_exponent

    def eta0_height(self) -> RealInterval:
        return height(self.mu, self.prec) * self.eta0_exponent


def invert_interval_matrix(rows, prec: int):
    """Certified inverse and determinant of an interval matrix.

    Gauss-Jordan elimination with midpoint-magnitude pivoting; a pivot
    interval containing 0 aborts with PrecisionExhausted so the caller
    can refine.
    """
    n = len(rows)
    a = [list(r) for r in rows]
    inv = [[RealInterval.exact(1 if i == j else 0, prec) for j in range(n)] for i in range(n)]
    det = RealInterval.exact(1, prec)
    for col in range(n):
        pivot_row = max(range(col, n), key=lambda r: abs(a[r][col].mid_fraction()))
        if a[pivot_row][col].straddles_zero():
            raise PrecisionExhausted(f"pivot interval straddles 0 in column {col}")
        if pivot_row != col:
            a[col], a[pivot_row] = a[pivot_row], a[col]
            inv[col], inv[pivot_row] = inv[pivot_row], inv[col]
            det = -det
        piv = a[col][col]
        det = det * piv
        a[col] = [x / piv for x in a[col]]
        inv[col] = [x / piv for x in inv[col]]
        for r in range(n):
            if r == col:
                continue
            f = a[r][col]
            if f.straddles_zero() and f.lo == 0 and f.hi == 0:
                continue
            a[r] = [x - f * y for x, y in zip(a[r], a[col])]
            inv[r] = [x - f * y for x, y in zip(inv[r], inv[col])]
    return tuple(tuple(r) for r in inv), det


def build_unit_system(ctx: CartanContext, prec: int = nm.DEFAULT_PREC,
                      exhaust_subsets: bool = False) -> UnitSystem:
    """Construct the unit system with a certified nonsingular log matrix.

    Tries eta_1 .. eta_{d-1} first, then later subsets in lexicographic
    order whenever the determinant interval straddles 0 at this
    precision.  With exhaust_subsets set, running out of subsets raises
    IndependenceFailure instead of PrecisionExhausted.
    """
    p, d = ctx.p, ctx.d
    xi = build_xi(p)
    eta = tuple(norm_to_K(x, ctx, from_real_subfield=True) for x in xi)
    mu = build_mu(ctx)
    reps = ctx.coset_reps[1:]  # sigma_1 .. sigma_{d-1}

    def log_matrix(subset):
        rows = []
        for rep in reps:
            row = []
            for idx in subset:
                row.append(nm.log(embedding_table(eta[idx], prec).at(rep).abs()))
            rows.append(tuple(row))
        return tuple(rows)

    last_error = None
    for subset in itertools.combinations(range(len(eta)), d - 1):
        a = log_matrix(subset)
        try:
            a_inv, det = invert_interval_matrix(a, prec)
        except PrecisionExhausted as err:
            last_error = err
            continue
        return UnitSystem(ctx, xi, eta, subset, mu, 12 * p, a, a_inv, det, prec)
    if exhaust_subsets:
        raise IndependenceFailure(
            f"no {d - 1}-subset of the {len(eta)} units certified a nonzero determinant")
    raise last_error or PrecisionExhausted("unit log matrix not invertible at this precision")


# -- index bounds --------------------------------------------------------


@dataclass(frozen=True)
class IndexBounds:
    hplus_bound: RealInterval
    m_bound: RealInterval
    m_formula_bound: RealInterval


def index_bounds(ctx: CartanContext, prec: int = nm.DEFAULT_PREC,
                 hplus_override: Optional[int] = None) -> IndexBounds:
    """Certified ceilings for the class number h+ and the unit index m.

    m divides h+ (p-1)/(2d), and h+ < p^((p-3)/4) (log p)^((p-3)/2); the
    coarser closed form p^((p+1)/4) (log p)^((p-3)/2) is evaluated too
    and must dominate.
    """
    p, d = ctx.p, ctx.d
    logp = nm.log(RealInterval.exact(p, prec))
    log_pow = nm.pow_int(logp, (p - 3) // 2)
    if hplus_override is not None:
        if hplus_override < 1:
            raise ValueError("class number override must be a positive integer")
        hplus = RealInterval.exact(hplus_override, prec)
    else:
        hplus = nm.rpow(RealInterval.exact(p, prec), Fraction(p - 3, 4)) * log_pow
    m_bound = hplus * Fraction(p - 1, 2 * d)
    m_formula = nm.rpow(RealInterval.exact(p, prec), Fraction(p + 1, 4)) * log_pow
    nm.require(nm.check_le(m_bound, m_formula),
               "index bound exceeds its closed form p^((p+1)/4) (log p)^((p-3)/2)")
    return IndexBounds(hplus, m_bound, m_formula)


# -- leading-constant heights -------------------------------------------


@dataclass(frozen=True)
class UpsilonData:
    """Per (cusp, sigma): bounds for Upsilon = gamma / eta0^sigma."""
    log_abs: RealInterval       # log |Upsilon|
    height_ub: RealInterval     # certified upper bound for h(Upsilon)


def upsilon_data(us: UnitSystem, od: UnitOrderData, prec: int) -> UpsilonData:
    log_abs = od.gamma_abs_log - us.log_abs_eta0(od.sigma)
    h_ub = gamma_height(od.gamma_ys, us.ctx.p, prec) + us.eta0_height()
    return UpsilonData(log_abs, h_ub)


def upsilon_heights(us: UnitSystem, orders: Dict[tuple, UnitOrderData],
                    prec: int) -> Dict[tuple, UpsilonData]:
    """Upsilon bounds for every (cusp, sigma), checked against the
    closed forms 36 p (p-1) log2 / d and 36 p (p-1) log(p/2) / d."""
    p, d = us.ctx.p, us.ctx.d
    h_ceiling = nm.log(RealInterval.exact(2, prec)) * Fraction(36 * p * (p - 1), d)
    log_ceiling = nm.log(RealInterval.exact(Fraction(p, 2), prec)) * Fraction(36 * p * (p - 1), d)
    out = {}
    for key, od in orders.items():
        ud = upsilon_data(us, od, prec)
        nm.require(nm.check_le(ud.height_ub, h_ceiling),
                   f"h(Upsilon) ceiling violated at {key}")
        nm.require(nm.check_le(abs(ud.log_abs), log_ceiling),
                   f"|log Upsilon| ceiling violated at {key}")
        out[key] = ud
    return out


# -- delta, beta, kappa ---------------------------------------------------


@dataclass(frozen=True)
class DeltaBetaKappa:
    delta_ck: dict   # cusp label -> tuple of upper bounds for |delta_{c,k}|
    beta_ck: dict    # cusp label -> tuple of upper bounds for |beta_{c,k}|
    delta: RealInterval
    beta: RealInterval
    kappa: RealInterval    # max_k sum_l |alpha_{kl}|, floored at 1
    m_kappa: RealInterval  # certified upper bound for m * kappa
    m_ub: RealInterval


def delta_beta_kappa(us: UnitSystem, orders: Dict[tuple, UnitOrderData],
                     upsilons: Dict[tuple, UpsilonData],
                     m_ub: RealInterval, prec: int) -> DeltaBetaKappa:
    """Upper bounds for the linear-form coefficients, maximized over cusps.

    Each product m * |alpha_{kl}| is bounded by
    min(m_ub * |alpha_{kl}|, |cofactor_{lk}| / 0.32): the first factor
    uses the index ceiling, the second the determinant bound
    |det A| >= m R with R > 0.32.  Both are certified upper bounds, so
    their minimum is one as well.
    """
    ctx = us.ctx
    p, d = ctx.p, ctx.d
    reps = ctx.coset_reps[1:]
    n = d - 1

    malpha = [[None] * n for _ in range(n)]
    abs_alpha = [[abs(us.A_inv[k][l]) for l in range(n)] for k in range(n)]
    inv_floor = 1 / RealInterval.exact(REGULATOR_FLOOR, prec)
    for k in range(n):
        for l in range(n):
            cof = abs(us.A_inv[k][l] * us.det_A)
            malpha[k][l] = nm.min_iv(m_ub * abs_alpha[k][l], cof * inv_floor)

    cusp_labels = sorted({c for (c, _) in orders})
    delta_ck = {}
    beta_ck = {}
    for c in cusp_labels:
        ords = [abs(orders[(c, rep)].ord) for rep in reps]
        ulogs = [abs(upsilons[(c, rep)].log_abs) for rep in reps]
        drow = []
        brow = []
        for k in range(n):
            dsum = RealInterval.exact(0, prec)
            bsum = RealInterval.exact(0, prec)
            for l in range(n):
                dsum = dsum + malpha[k][l] * ords[l]
                bsum = bsum + malpha[k][l] * ulogs[l]
            drow.append(dsum * Fraction(1, p))
            brow.append(bsum)
        delta_ck[c] = tuple(drow)
        beta_ck[c] = tuple(brow)

    delta = nm.max_iv(*(x for row in delta_ck.values() for x in row))
    beta = nm.max_iv(*(x for row in beta_ck.values() for x in row))
    one = RealInterval.exact(1, prec)
    row_sums = []
    mrow_sums = []
    for k in range(n):
        s = RealInterval.exact(0, prec)
        ms = RealInterval.exact(0, prec)
        for l in range(n):
            s = s + abs_alpha[k][l]
            ms = ms + malpha[k][l]
        row_sums.append(s)
        mrow_sums.append(ms)
    kappa = nm.max_iv(one, *row_sums)
    m_kappa = nm.max_iv(m_ub, *mrow_sums)
    return DeltaBetaKappa(delta_ck, beta_ck, delta, beta, kappa, m_kappa, m_ub)
