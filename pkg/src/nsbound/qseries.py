"""Formal expansions of log of unit quotients in powers of q^(1/p).

The quotient of a squared orbit unit by its leading constant and
q-power expands as 2 pi i f + sum_k lambda_k q^(k/p) with exact
cyclotomic coefficients.  This module computes the lambda_k by the
Taylor series of log(1-z), verifies their archimedean, finite-place and
height bounds, and finds the first nonvanishing index.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd
from typing import Dict, Optional

from . import numerics as nm
from .cartan import CartanContext, Cusp, Orbit
from .cyclotomic import CycloNumber, embedding_table, height_with_denominator
from .errors import TruncationTooSmall
from .numerics import RealInterval
from .siegel import translated_points


@dataclass(frozen=True)
class FormalSeries:
    """Truncated series sum coeffs[k] * q^(k/p), k = 1..truncation.

    branch_note counts the suppressed integer multiple of 2 pi i; the
    expansions built here never evaluate it and keep it at 0.
    """
    p: int
    truncation: int
    coeffs: Dict[int, CycloNumber] = field(compare=False)
    branch_note: int = 0

    def coeff(self, k: int) -> CycloNumber:
        return self.coeffs.get(k, CycloNumber.zero(self.p))

    def __add__(self, other: "FormalSeries") -> "FormalSeries":
        if self.p != other.p:
            raise ValueError("mixed levels")
        K = min(self.truncation, other.truncation)
        out = {}
        for k in range(1, K + 1):
            c = self.coeff(k) + other.coeff(k)
            if not c.is_zero():
                out[k] = c
        return FormalSeries(self.p, K, out, self.branch_note + other.branch_note)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return FormalSeries(self.p, self.truncation,
                                {k: c * other for k, c in self.coeffs.items()},
                                self.branch_note)
        if self.p != other.p:
            raise ValueError("mixed levels")
        K = min(self.truncation, other.truncation)
        out = {}
        for k1, c1 in self.coeffs.items():
            for k2, c2 in other.coeffs.items():
                k = k1 + k2
                if k > K:
                    continue
                term = c1 * c2
                if k in out:
                    out[k] = out[k] + term
                else:
                    out[k] = term
        return FormalSeries(self.p, K,
                            {k: c for k, c in out.items() if not c.is_zero()}, 0)

    __rmul__ = __mul__

    def support(self):
        return sorted(k for k, c in self.coeffs.items() if not c.is_zero())


def formal_log1p(s: FormalSeries) -> FormalSeries:
    """log(1 + s) for a series with no constant term, exact to truncation."""
    if 0 in s.coeffs:
        raise ValueError("series must have vanishing constant term")
    acc = FormalSeries(s.p, s.truncation, {})
    power = s
    j = 1
    min_deg = min(s.support(), default=s.truncation + 1)
    while j * min_deg <= s.truncation:
        sign = Fraction((-1) ** (j + 1), j)
        acc = acc + power * sign
        power = power * s
        j += 1
    return acc


def log_unit_series(ctx: CartanContext, orb: Orbit, cusp: Cusp, sigma: int,
                    K: int, exponent: int) -> FormalSeries:
    """Expansion of exponent * sum log(1 - q^(n+a1) zeta^y)(1 - q^(n+1-a1) zeta^-y)
    over the translated index set, through q^(K/p).

    exponent 24p gives the squared orbit unit; the constant factors with
    n + a1 = 0 are excluded (they sit in the leading constant).  The
    coefficient of q^(k/p) collects -exponent * zeta^(y j) / j over all
    factorizations k = j * w with w = n p + x or w = n p + (p - x).
    """
    if exponent % 2 != 0:
        raise ValueError("exponent must be even")
    if K < ctx.p:
        raise TruncationTooSmall(f"truncation {K} is below one full power of q (p = {ctx.p})")
    p = ctx.p
    contrib: Dict[int, Dict[int, Fraction]] = {}

    def add(k: int, zeta_exp: int, j: int):
        slot = contrib.setdefault(k, {})
        key = zeta_exp % p
        slot[key] = slot.get(key, Fraction(0)) - Fraction(exponent, j)

    for a in translated_points(ctx, orb, sigma, cusp):
        for w, zpow in ((a.x, a.y), (p - a.x, -a.y)):
            while w <= K:
                if w > 0:
                    for j in range(1, K // w + 1):
                        add(j * w, zpow * j, j)
                w += p

    coeffs = {}
    for k, slot in contrib.items():
        acc = CycloNumber.zero(p)
        for zexp, scale in slot.items():
            if scale:
                acc = acc + CycloNumber.zeta_pow(p, zexp) * scale
        if not acc.is_zero():
            coeffs[k] = acc
    return FormalSeries(p, K, coeffs)


# -- bound verification ----------------------------------------------------


@dataclass(frozen=True)
class LambdaCheck:
    k: int
    max_abs: Optional[RealInterval]  # largest embedding absolute value
    abs_bound: Fraction              # 48 p^2 (k+p), scaled
    denominator: int
    height_ub: Optional[RealInterval]
    height_bound: Optional[RealInterval]


@dataclass(frozen=True)
class LambdaReport:
    p: int
    truncation: int
    weight_scale: int
    checks: tuple


def verify_lambda_bounds(fs: FormalSeries, K: Optional[int] = None,
                         prec: int = nm.DEFAULT_PREC,
                         weight_scale: int = 1) -> LambdaReport:
    """Certify, for every k <= K:
      every archimedean |lambda_k| <= scale * 48 p^2 (k + p),
      k * lambda_k is an algebraic integer,
      h(lambda_k) <= log(scale * (48 p^3 + 48 k p^2)) + log k.

    weight_scale 1 matches the squared single unit; a combined unit with
    exponents 24 p n2 and 24 p n1 scales the archimedean and height
    constants by n1 + n2.
    """
    p = fs.p
    if K is None:
        K = fs.truncation
    K = min(K, fs.truncation)
    checks = []
    for k in range(1, K + 1):
        lam = fs.coeff(k)
        bound = Fraction(weight_scale * 48 * p * p * (k + p))
        den = lam.denominator_lcm()
        if k % den != 0:
            nm.require(False, f"denominator of coefficient {k} does not divide k")
        if lam.is_zero():
            checks.append(LambdaCheck(k, None, bound, den, None, None))
            continue
        table = embedding_table(lam, prec)
        max_abs = nm.max_iv(*(table.at(a).abs() for a in range(1, p)))
        nm.require(nm.check_le(max_abs, RealInterval.exact(bound, prec)),
                   f"archimedean bound violated at k = {k}")
        h_ub = height_with_denominator(lam, prec)
        h_bound = nm.log(RealInterval.exact(bound, prec)) + nm.log(RealInterval.exact(k, prec))
        nm.require(nm.check_le(h_ub, h_bound), f"height bound violated at k = {k}")
        checks.append(LambdaCheck(k, max_abs, bound, den, h_ub, h_bound))
    return LambdaReport(p, K, weight_scale, tuple(checks))


def first_nonzero(fs: FormalSeries, K: Optional[int] = None) -> Optional[int]:
    """Smallest k <= K with lambda_k != 0 (exact test), or None.

    For a nonconstant unit of vanishing order the index is at most p^5;
    a None return only means the truncation was too short to see it.
    """
    if K is None:
        K = fs.truncation
    K = min(K, fs.truncation)
    support = fs.support()
    return support[0] if support and support[0] <= K else None


def degree_ceiling(ctx: CartanContext, orders) -> bool:
    """sum over cusps of |ord| stays below p^5 (coarse divisor degree bound)."""
    p, d = ctx.p, ctx.d
    for rep in ctx.coset_reps:
        total = sum(abs(orders[(c, rep)].ord) for c in sorted({c for c, _ in orders}))
        if total > (p - 1) // 2 * p * p * (p * p - 1) // d or total > p ** 5:
            return False
    return True
