"""Siegel functions, orbit modular units, and cusp vanishing orders.

The unit attached to an orbit O is u_O = prod_{a in O} g_a^{12p}.  Its
order at a cusp c is 12 p^2 * sum of half second Bernoulli values over
the translated index set O*sigma*sigma_c, and the leading constant
gamma_{c,sigma} is the exact cyclotomic product of (1 - zeta^y)^{12p}
over the translated points with first coordinate 0.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Optional

from . import numerics as nm
from .cartan import APoint, CartanContext, Cusp, Orbit, cusp_classes, galois_orbit_action, orbit_decomposition
from .cyclotomic import CycloNumber
from .errors import BoundViolation, DomainError, InternalInconsistency
from .numerics import ComplexInterval, RealInterval


def bernoulli2(t: Fraction) -> Fraction:
    """Second Bernoulli polynomial t^2 - t + 1/6."""
    return t * t - t + Fraction(1, 6)


def bernoulli_ell(a: APoint) -> Fraction:
    """Half Bernoulli value governing the q-exponent of g_a."""
    return bernoulli2(a.a1) / 2


def translated_points(ctx: CartanContext, orb: Orbit, sigma: int, cusp: Cusp):
    """The index set O*sigma*sigma_c as a sorted list of points."""
    translated = galois_orbit_action(ctx, sigma, orb)
    pts = [pt.times_matrix(cusp.sigma) for pt in translated.points]
    return sorted(pts, key=lambda q: (q.x, q.y))


@dataclass(frozen=True)
class UnitOrderData:
    """Vanishing order and leading constant of u_{O sigma} at one cusp."""
    orbit_label: int
    sigma: int
    cusp_label: int
    ord: int
    gamma: CycloNumber          # exact, equal to prod (1 - zeta^y)^{12p}
    gamma_ys: tuple             # the y-indices of the factors
    gamma_abs_log: RealInterval  # log |gamma| at the defining embedding
    prec: int


def _two_sin_pi_frac(num: int, p: int, prec: int) -> RealInterval:
    """|1 - e^(2 pi i num/p)| = 2 sin(pi num / p) for 1 <= num < p."""
    theta = nm.pi(prec) * Fraction(num % p, p)
    return nm.sin(theta) * 2


def gamma_log_abs_at(gamma_ys: tuple, p: int, a: int, prec: int) -> RealInterval:
    """log of the embedding  |gamma^(sigma_a)| = prod |1 - zeta^(a y)|^{12p}."""
    acc = RealInterval.exact(0, prec)
    for y in gamma_ys:
        acc = acc + nm.log(_two_sin_pi_frac((a * y) % p, p, prec))
    return acc * (12 * p)


def gamma_height(gamma_ys: tuple, p: int, prec: int) -> RealInterval:
    """Height of gamma via its factored archimedean embeddings."""
    if not gamma_ys:
        return RealInterval.exact(0, prec)
    acc = RealInterval.exact(0, prec)
    for a in range(1, p):
        la = gamma_log_abs_at(gamma_ys, p, a, prec)
        acc = acc + nm.max_iv(la, RealInterval.exact(0, prec))
    return acc * Fraction(1, p - 1)


def order_at_cusp(ctx: CartanContext, orb: Orbit, cusp: Cusp, sigma: int,
                  prec: int = nm.DEFAULT_PREC) -> UnitOrderData:
    """Order and leading constant of u_{O sigma} at the cusp.

    Checks integrality of the order, the bound |ord| <= p^2(p^2-1)/d,
    the factor-count ceiling 2(p-1)/d, and that gamma is exactly real.
    """
    p = ctx.p
    pts = translated_points(ctx, orb, sigma, cusp)
    total = sum((bernoulli_ell(a) for a in pts), Fraction(0))
    ord_frac = 12 * p * p * total
    if ord_frac.denominator != 1:
        raise InternalInconsistency(f"non-integral cusp order {ord_frac}")
    ordv = int(ord_frac)
    if abs(ordv) * ctx.d > p * p * (p * p - 1):
        raise InternalInconsistency(f"|ord| = {abs(ordv)} exceeds p^2(p^2-1)/d")

    ys = tuple(sorted(a.y for a in pts if a.x == 0))
    if len(ys) * ctx.d > 2 * (p - 1):
        raise InternalInconsistency(f"{len(ys)} leading factors exceed 2(p-1)/d")
    base = CycloNumber.one(p)
    for y in ys:
        base = base * CycloNumber.one_minus_zeta_pow(p, y)
    gamma = base ** (12 * p)
    if not gamma.is_real():
        raise InternalInconsistency("gamma is not real")
    if gamma.is_zero():
        raise InternalInconsistency("gamma vanished")
    return UnitOrderData(orb.label, sigma, cusp.label, ordv, gamma, ys,
                         gamma_log_abs_at(ys, p, 1, prec), prec)


@lru_cache(maxsize=None)
def all_order_data(ctx: CartanContext, prec: int = nm.DEFAULT_PREC):
    """Order data of every Galois translate of the base orbit at every cusp,
    keyed by (cusp label, coset representative)."""
    base = orbit_decomposition(ctx)[0]
    out = {}
    for cusp in cusp_classes(ctx):
        for rep in ctx.coset_reps:
            out[(cusp.label, rep)] = order_at_cusp(ctx, base, cusp, rep, prec)
        if sum(out[(cusp.label, rep)].ord for rep in ctx.coset_reps) != 0:
            raise InternalInconsistency(f"orders at cusp {cusp.label} do not sum to 0")
    return out


# -- analytic evaluation -------------------------------------------------

# |log(1+z)| <= C * |z| for |z| <= 0.1, with C = 10 log(10/9)
_TAIL_SLOPE = Fraction(1054, 1000)


def default_terms(prec: int, tau_im_lo) -> int:
    """Truncation length making the product tail smaller than 2^-prec."""
    import math
    return max(int(math.ceil(prec * math.log(2) / (2 * math.pi * float(tau_im_lo)))), 8)


def _check_fundamental_domain(tau: ComplexInterval) -> None:
    prec = tau.prec
    floor = nm.sqrt(RealInterval.exact(3, prec)) / 2
    if not tau.im.certainly_ge(floor):
        raise DomainError("evaluation point below the fundamental domain height sqrt(3)/2")


def eval_siegel(a1: Fraction, a2: Fraction, tau: ComplexInterval,
                terms: Optional[int] = None, prec: int = nm.DEFAULT_PREC) -> ComplexInterval:
    """Certified value of the Siegel function g_a at tau.

    Evaluates the truncated product
      -q^(B2(a1)/2) e^(pi i a2 (a1-1)) prod_n (1-q^(n+a1) e^(2 pi i a2))
                                             (1-q^(n+1-a1) e^(-2 pi i a2))
    and multiplies in a rectangle absorbing the geometric tail.
    """
    _check_fundamental_domain(tau)
    if terms is None:
        terms = default_terms(prec, tau.im.lo)
    if terms < 1:
        raise DomainError("need at least one product term")
    pi_iv = nm.pi(prec)
    two_pi_i_tau = ComplexInterval(-(tau.im * pi_iv * 2), tau.re * pi_iv * 2)

    def q_pow(s: Fraction) -> ComplexInterval:
        return nm.exp_c(two_pi_i_tau * s)

    def unit_phase(s: Fraction) -> ComplexInterval:
        theta = pi_iv * s
        return ComplexInterval(nm.cos(theta), nm.sin(theta))

    zeta_a2 = unit_phase(2 * a2)
    zeta_a2_inv = zeta_a2.conjugate()

    q = q_pow(Fraction(1))
    f1 = q_pow(a1)            # q^(n+a1), advanced by q each step
    f2 = q_pow(1 - a1)        # q^(n+1-a1)
    prod = ComplexInterval.exact(1, 0, prec)
    for _ in range(terms):
        prod = prod * (1 - f1 * zeta_a2) * (1 - f2 * zeta_a2_inv)
        f1 = f1 * q
        f2 = f2 * q

    absq = q.abs()
    tail_r = nm.rpow(absq, terms)
    if not tail_r.certainly_le(Fraction(1, 10)):
        raise DomainError("tail terms not certified below 0.1; increase terms")
    tail_sum = (nm.rpow(absq, terms + a1) + nm.rpow(absq, terms + 1 - a1)) / (1 - absq)
    err = nm.exp(tail_sum * _TAIL_SLOPE) - 1
    e_hi = err.hi_fraction()
    tail_box = ComplexInterval(RealInterval.hull_of(1 - e_hi, 1 + e_hi, prec),
                               RealInterval.hull_of(-e_hi, e_hi, prec))

    head = q_pow(bernoulli2(a1) / 2) * unit_phase(a2 * (a1 - 1))
    return -(head * prod * tail_box)


def expansion_residual(a1: Fraction, a2: Fraction, tau: ComplexInterval,
                       prec: int = nm.DEFAULT_PREC):
    """Residual of the three-term expansion of log |g_a| and its allowance.

    Returns (residual, allowance) with allowance = 2.03 |q_tau|; the
    true residual always lies within the allowance on the fundamental
    domain.
    """
    _check_fundamental_domain(tau)
    pi_iv = nm.pi(prec)
    log_abs_q = -(tau.im * pi_iv * 2)
    absq = nm.exp(log_abs_q)

    def q_pow(s: Fraction) -> ComplexInterval:
        return nm.exp_c(ComplexInterval(-(tau.im * pi_iv * 2), tau.re * pi_iv * 2) * s)

    def unit_phase(s: Fraction) -> ComplexInterval:
        theta = pi_iv * s
        return ComplexInterval(nm.cos(theta), nm.sin(theta))

    main = log_abs_q * bernoulli_ell_value(a1) \
        + nm.log((1 - q_pow(a1) * unit_phase(2 * a2)).abs()) \
        + nm.log((1 - q_pow(1 - a1) * unit_phase(-2 * a2)).abs())
    value = nm.log(eval_siegel(a1, a2, tau, None, prec).abs())
    residual = value - main
    allowance = absq * Fraction(203, 100)
    return residual, allowance


def bernoulli_ell_value(a1: Fraction) -> Fraction:
    """Half Bernoulli value for a bare first coordinate in [0, 1)."""
    return bernoulli2(a1 - (a1 // 1)) / 2


def verify_product_identity(ctx: CartanContext, tau: ComplexInterval,
                            prec: int = nm.DEFAULT_PREC,
                            terms: Optional[int] = None) -> RealInterval:
    """| prod over the torsion set of g_a^{12p} | / p^{12p}, as an interval.

    Contains 1 whenever the implementation is sound: the full product of
    the modular units is the constant p^{12p}.
    """
    p = ctx.p
    prod = ComplexInterval.exact(1, 0, prec)
    for x in range(p):
        for y in range(p):
            if (x, y) == (0, 0):
                continue
            prod = prod * eval_siegel(Fraction(x, p), Fraction(y, p), tau, terms, prec)
    ratio = prod.abs() / p
    return nm.pow_int(ratio, 12 * p)


@dataclass(frozen=True)
class OrbitLogData:
    """One certified evaluation of log |u_{O sigma}| near a cusp."""
    value: RealInterval
    main_term: RealInterval
    residual: RealInterval
    allowance: RealInterval  # 17 p^3 |q|^(1/p)


def log_u_orbit(ctx: CartanContext, orb: Orbit, sigma: int, cusp: Cusp,
                tau: ComplexInterval, prec: int = nm.DEFAULT_PREC,
                terms: Optional[int] = None) -> OrbitLogData:
    """log |u_{O sigma}(tau)| expanded at the cusp, with the two-term
    main expression and the certified residual.

    Requires |q_tau| <= 10^-p.  The residual is asserted to lie within
    the allowance 17 p^3 |q_tau|^{1/p}.
    """
    p = ctx.p
    _check_fundamental_domain(tau)
    pi_iv = nm.pi(tau.prec)
    log_abs_q = -(tau.im * pi_iv * 2)
    absq = nm.exp(log_abs_q)
    if not absq.certainly_le(Fraction(1, 10 ** p)):
        raise DomainError(f"|q| not certified below 10^-{p}")

    data = order_at_cusp(ctx, orb, cusp, sigma, prec)
    value = RealInterval.exact(0, prec)
    for a in translated_points(ctx, orb, sigma, cusp):
        value = value + nm.log(eval_siegel(a.a1, a.a2, tau, terms, prec).abs())
    value = value * (12 * p)

    main = log_abs_q * Fraction(data.ord, p) + data.gamma_abs_log
    residual = value - main
    allowance = nm.rpow(absq, Fraction(1, p)) * (17 * p ** 3)
    nm.require(nm.check_le(residual, allowance),
               "cusp expansion residual exceeds 17 p^3 |q|^(1/p)")
    nm.require(nm.check_le(-residual, allowance),
               "cusp expansion residual exceeds 17 p^3 |q|^(1/p)")
    return OrbitLogData(value, main, residual, allowance)
