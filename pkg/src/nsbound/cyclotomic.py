"""Exact arithmetic in the p-th cyclotomic field.

Elements are stored by their unique coordinates in the basis
zeta, zeta^2, ..., zeta^(p-1) (the relation 1 + zeta + ... + zeta^(p-1)
= 0 eliminates the constant).  In this basis every Galois automorphism
zeta -> zeta^a is a coordinate permutation.  Complex embeddings, heights
and log-embeddings are returned as certified intervals.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import gcd, lcm

from . import numerics as nm
from .cartan import CartanContext
from .errors import InternalInconsistency, ZeroElement
from .numerics import ComplexInterval, RealInterval

_ZERO = Fraction(0)


@dataclass(frozen=True)
class CycloNumber:
    """Element of Q(zeta_p); coeffs[i] is the coordinate of zeta^(i+1)."""
    p: int
    coeffs: tuple

    @staticmethod
    def zero(p: int) -> "CycloNumber":
        return CycloNumber(p, (_ZERO,) * (p - 1))

    @staticmethod
    def from_rational(p: int, r) -> "CycloNumber":
        r = Fraction(r)
        return CycloNumber(p, (-r,) * (p - 1))

    @staticmethod
    def one(p: int) -> "CycloNumber":
        return CycloNumber.from_rational(p, 1)

    @staticmethod
    def zeta_pow(p: int, k: int) -> "CycloNumber":
        k %= p
        if k == 0:
            return CycloNumber.one(p)
        coeffs = [_ZERO] * (p - 1)
        coeffs[k - 1] = Fraction(1)
        return CycloNumber(p, tuple(coeffs))

    @staticmethod
    def one_minus_zeta_pow(p: int, k: int) -> "CycloNumber":
        return CycloNumber.one(p) - CycloNumber.zeta_pow(p, k)

    # -- ring operations ---------------------------------------------

    def _check(self, other: "CycloNumber"):
        if self.p != other.p:
            raise ValueError("mixed cyclotomic levels")

    def __add__(self, other):
        if isinstance(other, (int, Fraction)):
            other = CycloNumber.from_rational(self.p, other)
        self._check(other)
        return CycloNumber(self.p, tuple(a + b for a, b in zip(self.coeffs, other.coeffs)))

    __radd__ = __add__

    def __neg__(self):
        return CycloNumber(self.p, tuple(-a for a in self.coeffs))

    def __sub__(self, other):
        if isinstance(other, (int, Fraction)):
            other = CycloNumber.from_rational(self.p, other)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            r = Fraction(other)
            return CycloNumber(self.p, tuple(a * r for a in self.coeffs))
        self._check(other)
        p = self.p
        acc = [_ZERO] * (p - 1)
        const = _ZERO
        for i, a in enumerate(self.coeffs):
            if a == 0:
                continue
            for j, b in enumerate(other.coeffs):
                if b == 0:
                    continue
                e = (i + j + 2) % p
                if e == 0:
                    const += a * b
                else:
                    acc[e - 1] += a * b
        if const:
            acc = [c - const for c in acc]  # 1 = -(zeta + ... + zeta^(p-1))
        return CycloNumber(p, tuple(acc))

    __rmul__ = __mul__

    def __pow__(self, n: int) -> "CycloNumber":
        if n < 0:
            raise ValueError("negative powers are not defined here")
        result = CycloNumber.one(self.p)
        base = self
        while n:
            if n & 1:
                result = result * base
            if n > 1:
                base = base * base
            n >>= 1
        return result

    # -- structure ----------------------------------------------------

    def is_zero(self) -> bool:
        return all(c == 0 for c in self.coeffs)

    def as_rational(self):
        """The value as a Fraction if rational, else None."""
        first = self.coeffs[0]
        if all(c == first for c in self.coeffs):
            return -first
        return None

    def galois(self, a: int) -> "CycloNumber":
        """Image under zeta -> zeta^a, a nonzero mod p."""
        p = self.p
        a %= p
        if a == 0:
            raise ValueError("a must be nonzero mod p")
        coeffs = [_ZERO] * (p - 1)
        for i, c in enumerate(self.coeffs):
            coeffs[(a * (i + 1)) % p - 1] = c
        return CycloNumber(p, tuple(coeffs))

    def conjugate(self) -> "CycloNumber":
        return self.galois(self.p - 1)

    def is_real(self) -> bool:
        return self == self.conjugate()

    def denominator_lcm(self) -> int:
        return lcm(*(c.denominator for c in self.coeffs)) if self.coeffs else 1


def galois_apply(x: CycloNumber, a: int) -> CycloNumber:
    return x.galois(a)


def norm_over(x: CycloNumber, residues) -> CycloNumber:
    """Product of the conjugates of x over the given Galois residues."""
    result = CycloNumber.one(x.p)
    for a in residues:
        result = result * x.galois(a)
    return result


def norm_to_K(x: CycloNumber, ctx: CartanContext, from_real_subfield: bool = False) -> CycloNumber:
    """Norm down to the degree-d subfield fixed by H.

    From the full cyclotomic field the norm multiplies over all of H;
    from its real subfield over H modulo +-1.  The result is checked to
    be H-fixed.
    """
    residues = ctx.half_H if from_real_subfield else ctx.H
    result = norm_over(x, residues)
    for h in ctx.H:
        if result.galois(h) != result:
            raise InternalInconsistency("subfield norm is not fixed by H")
    return result


def field_norm_to_Q(x: CycloNumber) -> Fraction:
    """Norm down to the rationals, returned exactly."""
    full = norm_over(x, range(1, x.p))
    r = full.as_rational()
    if r is None:
        raise InternalInconsistency("full norm is not rational")
    return r


# -- certified embeddings ----------------------------------------------


@lru_cache(maxsize=None)
def roots_of_unity(p: int, prec: int):
    """e^(2 pi i k / p) for k = 0..p-1 as complex rectangles."""
    two_pi = nm.pi(prec) * 2
    roots = [ComplexInterval.exact(1, 0, prec)]
    for k in range(1, p):
        theta = two_pi * Fraction(k, p)
        roots.append(ComplexInterval(nm.cos(theta), nm.sin(theta)))
    return tuple(roots)


@dataclass(frozen=True)
class EmbeddingTable:
    """Certified values of one element under zeta -> e^(2 pi i a / p)."""
    p: int
    prec: int
    values: tuple  # index a-1 holds the embedding at a, a = 1..p-1

    def at(self, a: int) -> ComplexInterval:
        return self.values[a % self.p - 1]


@lru_cache(maxsize=65536)
def embedding_table(x: CycloNumber, prec: int) -> EmbeddingTable:
    p = x.p
    roots = roots_of_unity(p, prec)
    scalars = [None if c == 0 else RealInterval.exact(c, prec) for c in x.coeffs]
    values = []
    for a in range(1, p):
        acc = ComplexInterval.exact(0, 0, prec)
        for i, s in enumerate(scalars):
            if s is not None:
                acc = acc + roots[(a * (i + 1)) % p] * s
        values.append(acc)
    table = EmbeddingTable(p, prec, tuple(values))
    # conjugate symmetry: the embeddings at a and p-a enclose conjugates
    for a in range(1, p):
        za, zb = table.at(a), table.at(p - a)
        if za.re.hi < zb.re.lo or zb.re.hi < za.re.lo:
            raise InternalInconsistency("conjugate embeddings have disjoint real parts")
    return table


def embed(x: CycloNumber, a: int, prec: int) -> ComplexInterval:
    return embedding_table(x, prec).at(a)


def log_abs_embeddings(x: CycloNumber, ctx: CartanContext, prec: int):
    """log |x^sigma| for each Galois coset of the subfield, in coset order.

    Well defined on the H-fixed elements this pipeline feeds in; for a
    general element the value at the coset representative is used.
    """
    if x.is_zero():
        raise ZeroElement("log of the zero element")
    table = embedding_table(x, prec)
    return tuple(nm.log(table.at(rep).abs()) for rep in ctx.coset_reps)


def height(x: CycloNumber, prec: int) -> RealInterval:
    """Absolute logarithmic height of an algebraic integer.

    Only the archimedean places contribute, so h is the mean of
    log^+ |x| over all p-1 complex embeddings.  The caller asserts
    integrality; use height_with_denominator otherwise.
    """
    if x.is_zero():
        raise ZeroElement("height of 0 is undefined")
    table = embedding_table(x, prec)
    acc = RealInterval.exact(0, prec)
    for a in range(1, x.p):
        acc = acc + nm.log_plus(table.at(a).abs())
    return acc * Fraction(1, x.p - 1)


def height_with_denominator(x: CycloNumber, prec: int) -> RealInterval:
    """Certified upper bound for h(x) when x need not be integral.

    den*x is an algebraic integer for den = lcm of the coordinate
    denominators, and the finite places then contribute at most log den.
    """
    den = x.denominator_lcm()
    arch = height(x, prec)
    if den == 1:
        return arch
    return arch + nm.log(RealInterval.exact(den, prec))
