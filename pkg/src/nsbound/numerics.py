"""Certified real and complex interval arithmetic on top of MPFR.

Endpoints are gmpy2 mpfr values rounded outward (lo toward -inf, hi
toward +inf), so the exact value of any composed expression lies inside
the returned interval.  Complex intervals are axis-aligned rectangles.
All values are immutable; operations are pure functions.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Optional, Union

import gmpy2

from .errors import BoundViolation, DomainError, PrecisionExhausted

DEFAULT_PREC = 128
PREC_CAP = 4096

ExactLike = Union[int, Fraction]


@lru_cache(maxsize=None)
def _ctx(prec: int):
    down = gmpy2.context(precision=prec, round=gmpy2.RoundDown)
    up = gmpy2.context(precision=prec, round=gmpy2.RoundUp)
    return down, up


def _exact_pair(value: ExactLike, prec: int):
    """Directed-rounded mpfr enclosure of an exact int or Fraction."""
    down, up = _ctx(prec)
    if isinstance(value, int):
        return down.div(value, 1), up.div(value, 1)
    num, den = int(value.numerator), int(value.denominator)
    return down.div(num, den), up.div(num, den)


@dataclass(frozen=True)
class RealInterval:
    lo: object  # gmpy2.mpfr
    hi: object  # gmpy2.mpfr
    prec: int

    def __post_init__(self):
        if not self.lo <= self.hi:  # also rejects NaN endpoints
            raise DomainError(f"inverted interval [{self.lo}, {self.hi}]")

    # -- constructors ------------------------------------------------

    @staticmethod
    def exact(value: ExactLike, prec: int = DEFAULT_PREC) -> "RealInterval":
        lo, hi = _exact_pair(value, prec)
        return RealInterval(lo, hi, prec)

    @staticmethod
    def hull_of(lo: ExactLike, hi: ExactLike, prec: int = DEFAULT_PREC) -> "RealInterval":
        a, _ = _exact_pair(lo, prec)
        _, b = _exact_pair(hi, prec)
        return RealInterval(a, b, prec)

    # -- queries -----------------------------------------------------

    def width(self):
        _, up = _ctx(self.prec)
        return up.sub(self.hi, self.lo)

    def mid_fraction(self) -> Fraction:
        return (self.lo_fraction() + self.hi_fraction()) / 2

    def lo_fraction(self) -> Fraction:
        q = gmpy2.mpq(self.lo)
        return Fraction(int(q.numerator), int(q.denominator))

    def hi_fraction(self) -> Fraction:
        q = gmpy2.mpq(self.hi)
        return Fraction(int(q.numerator), int(q.denominator))

    def contains(self, value) -> bool:
        if isinstance(value, RealInterval):
            return self.lo <= value.lo and value.hi <= self.hi
        q = gmpy2.mpq(value)  # mpfr/mpq comparison is exact
        return self.lo <= q <= self.hi

    def is_positive(self) -> bool:
        return self.lo > 0

    def is_negative(self) -> bool:
        return self.hi < 0

    def straddles_zero(self) -> bool:
        return self.lo <= 0 <= self.hi

    def rel_width(self):
        """Width divided by the smallest absolute value; inf if 0 inside."""
        if self.straddles_zero():
            return gmpy2.mpfr("inf")
        _, up = _ctx(self.prec)
        m = min(abs(self.lo), abs(self.hi))
        return up.div(self.width(), m)

    def __repr__(self):
        return f"[{self.lo:.8g}, {self.hi:.8g}]~{self.prec}b"

    # -- arithmetic --------------------------------------------------

    def _coerce(self, other) -> "RealInterval":
        if isinstance(other, RealInterval):
            return other
        return RealInterval.exact(other, self.prec)

    def __add__(self, other):
        o = self._coerce(other)
        prec = max(self.prec, o.prec)
        down, up = _ctx(prec)
        return RealInterval(down.add(self.lo, o.lo), up.add(self.hi, o.hi), prec)

    __radd__ = __add__

    def __neg__(self):
        # bare mpfr operators round through gmpy2's global context, so
        # endpoint negation must go through the directed contexts too
        down, up = _ctx(self.prec)
        return RealInterval(down.sub(0, self.hi), up.sub(0, self.lo), self.prec)

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        o = self._coerce(other)
        prec = max(self.prec, o.prec)
        down, up = _ctx(prec)
        cands_lo = (down.mul(self.lo, o.lo), down.mul(self.lo, o.hi),
                    down.mul(self.hi, o.lo), down.mul(self.hi, o.hi))
        cands_hi = (up.mul(self.lo, o.lo), up.mul(self.lo, o.hi),
                    up.mul(self.hi, o.lo), up.mul(self.hi, o.hi))
        return RealInterval(min(cands_lo), max(cands_hi), prec)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._coerce(other)
        if o.straddles_zero():
            raise DomainError("division by an interval containing 0")
        prec = max(self.prec, o.prec)
        down, up = _ctx(prec)
        cands_lo = (down.div(self.lo, o.lo), down.div(self.lo, o.hi),
                    down.div(self.hi, o.lo), down.div(self.hi, o.hi))
        cands_hi = (up.div(self.lo, o.lo), up.div(self.lo, o.hi),
                    up.div(self.hi, o.lo), up.div(self.hi, o.hi))
        return RealInterval(min(cands_lo), max(cands_hi), prec)

    def __rtruediv__(self, other):
        return self._coerce(other) / self

    def __abs__(self):
        if self.lo >= 0:
            return self
        if self.hi <= 0:
            return -self
        _, up = _ctx(self.prec)
        return RealInterval(gmpy2.mpfr(0, self.prec), max(up.sub(0, self.lo), self.hi), self.prec)

    def __pow__(self, n: int):
        return pow_int(self, n)

    # -- certified comparisons ----------------------------------------

    def certainly_lt(self, other) -> bool:
        o = self._coerce(other)
        return self.hi < o.lo

    def certainly_le(self, other) -> bool:
        o = self._coerce(other)
        return self.hi <= o.lo

    def certainly_gt(self, other) -> bool:
        o = self._coerce(other)
        return self.lo > o.hi

    def certainly_ge(self, other) -> bool:
        o = self._coerce(other)
        return self.lo >= o.hi


# -- elementary functions ---------------------------------------------


def exp(x: RealInterval) -> RealInterval:
    down, up = _ctx(x.prec)
    return RealInterval(down.exp(x.lo), up.exp(x.hi), x.prec)


def log(x: RealInterval) -> RealInterval:
    if not x.lo > 0:
        raise DomainError(f"log of interval touching (-inf, 0]: {x}")
    down, up = _ctx(x.prec)
    return RealInterval(down.log(x.lo), up.log(x.hi), x.prec)


def sqrt(x: RealInterval) -> RealInterval:
    if x.lo < 0:
        raise DomainError(f"sqrt of interval below 0: {x}")
    down, up = _ctx(x.prec)
    return RealInterval(down.sqrt(x.lo), up.sqrt(x.hi), x.prec)


def atan(x: RealInterval) -> RealInterval:
    down, up = _ctx(x.prec)
    return RealInterval(down.atan(x.lo), up.atan(x.hi), x.prec)


def _midpoint_radius(x: RealInterval):
    """A representable point m inside x and r with |t - m| <= r on x."""
    down, up = _ctx(x.prec)
    m = down.div(down.add(x.lo, x.hi), 2)  # stays within [lo, hi]
    r = max(up.sub(x.hi, m), up.sub(m, x.lo))
    return m, r


def _clamp_unit(lo, hi, prec):
    return RealInterval(max(lo, gmpy2.mpfr(-1, prec)), min(hi, gmpy2.mpfr(1, prec)), prec)


def sin(x: RealInterval) -> RealInterval:
    # |sin t - sin m| <= |t - m|, so midpoint +- radius is a sound
    # enclosure; nearly tight for the narrow arguments used here.
    down, up = _ctx(x.prec)
    m, r = _midpoint_radius(x)
    return _clamp_unit(down.sub(down.sin(m), r), up.add(up.sin(m), r), x.prec)


def cos(x: RealInterval) -> RealInterval:
    down, up = _ctx(x.prec)
    m, r = _midpoint_radius(x)
    return _clamp_unit(down.sub(down.cos(m), r), up.add(up.cos(m), r), x.prec)


def pi(prec: int = DEFAULT_PREC) -> RealInterval:
    down, up = _ctx(prec)
    return RealInterval(down.const_pi(), up.const_pi(), prec)


def e_const(prec: int = DEFAULT_PREC) -> RealInterval:
    return exp(RealInterval.exact(1, prec))


def pow_int(x: RealInterval, n: int) -> RealInterval:
    if n == 0:
        return RealInterval.exact(1, x.prec)
    if n < 0:
        return 1 / pow_int(x, -n)
    down, up = _ctx(x.prec)
    if n % 2 == 1 or x.lo >= 0:
        return RealInterval(down.pow(x.lo, n), up.pow(x.hi, n), x.prec)
    if x.hi <= 0:
        return RealInterval(down.pow(x.hi, n), up.pow(x.lo, n), x.prec)
    m = max(up.sub(0, x.lo), x.hi)
    return RealInterval(gmpy2.mpfr(0, x.prec), up.pow(m, n), x.prec)


def rpow(x: RealInterval, expo) -> RealInterval:
    """x**expo for positive x and a real (interval or exact) exponent."""
    if isinstance(expo, int):
        return pow_int(x, expo)
    if not x.lo > 0:
        raise DomainError("rpow needs a strictly positive base")
    e = expo if isinstance(expo, RealInterval) else RealInterval.exact(expo, x.prec)
    return exp(e * log(x))


def max_iv(*xs: RealInterval) -> RealInterval:
    """Enclosure of max(x1, ..., xn); exact scalars allowed."""
    ivs = [x if isinstance(x, RealInterval) else RealInterval.exact(x) for x in xs]
    prec = max(iv.prec for iv in ivs)
    return RealInterval(max(iv.lo for iv in ivs), max(iv.hi for iv in ivs), prec)


def min_iv(*xs: RealInterval) -> RealInterval:
    ivs = [x if isinstance(x, RealInterval) else RealInterval.exact(x) for x in xs]
    prec = max(iv.prec for iv in ivs)
    return RealInterval(min(iv.lo for iv in ivs), min(iv.hi for iv in ivs), prec)


def log_plus(x: RealInterval) -> RealInterval:
    """max(0, log x) for x >= 0; tolerates a lower endpoint at 0."""
    down, up = _ctx(x.prec)
    if x.hi <= 0:
        raise DomainError("log_plus of a nonpositive interval")
    hi = max(gmpy2.mpfr(0, x.prec), up.log(x.hi))
    lo = gmpy2.mpfr(0, x.prec)
    if x.lo > 0:
        lo = max(lo, down.log(x.lo))
    return RealInterval(lo, hi, x.prec)


# -- complex rectangles -----------------------------------------------


@dataclass(frozen=True)
class ComplexInterval:
    re: RealInterval
    im: RealInterval

    @staticmethod
    def exact(re: ExactLike, im: ExactLike = 0, prec: int = DEFAULT_PREC) -> "ComplexInterval":
        return ComplexInterval(RealInterval.exact(re, prec), RealInterval.exact(im, prec))

    @staticmethod
    def from_real(x: RealInterval) -> "ComplexInterval":
        return ComplexInterval(x, RealInterval.exact(0, x.prec))

    @property
    def prec(self) -> int:
        return max(self.re.prec, self.im.prec)

    def _coerce(self, other) -> "ComplexInterval":
        if isinstance(other, ComplexInterval):
            return other
        if isinstance(other, RealInterval):
            return ComplexInterval.from_real(other)
        return ComplexInterval.exact(other, 0, self.prec)

    def __add__(self, other):
        o = self._coerce(other)
        return ComplexInterval(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __neg__(self):
        return ComplexInterval(-self.re, -self.im)

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (RealInterval, int, Fraction)):
            s = other if isinstance(other, RealInterval) else RealInterval.exact(other, self.prec)
            return ComplexInterval(self.re * s, self.im * s)
        o = self._coerce(other)
        return ComplexInterval(self.re * o.re - self.im * o.im,
                               self.re * o.im + self.im * o.re)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, (RealInterval, int, Fraction)):
            s = other if isinstance(other, RealInterval) else RealInterval.exact(other, self.prec)
            return ComplexInterval(self.re / s, self.im / s)
        o = self._coerce(other)
        den = pow_int(o.re, 2) + pow_int(o.im, 2)
        return (self * o.conjugate()) / den

    def __rtruediv__(self, other):
        return self._coerce(other) / self

    def conjugate(self):
        return ComplexInterval(self.re, -self.im)

    def abs(self) -> RealInterval:
        return sqrt(pow_int(self.re, 2) + pow_int(self.im, 2))

    def __pow__(self, n: int):
        if n < 0:
            return 1 / self ** (-n)
        result = ComplexInterval.exact(1, 0, self.prec)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base if n > 1 else base
            n >>= 1
        return result

    def contains_zero(self) -> bool:
        return self.re.straddles_zero() and self.im.straddles_zero()

    def __repr__(self):
        return f"({self.re!r} + {self.im!r}*i)"


def exp_c(z: ComplexInterval) -> ComplexInterval:
    r = exp(z.re)
    return ComplexInterval(r * cos(z.im), r * sin(z.im))


def arg(z: ComplexInterval) -> RealInterval:
    """Principal argument of a rectangle excluding 0 and the branch cut."""
    if z.re.is_positive():
        return atan(z.im / z.re)
    half_pi = pi(z.prec) / 2
    if z.im.is_positive():
        # rotate by -pi/2: (re, im) -> (im, -re)
        return arg(ComplexInterval(z.im, -z.re)) + half_pi
    if z.im.is_negative():
        return arg(ComplexInterval(-z.im, z.re)) - half_pi
    raise DomainError("argument undefined: rectangle meets the closed negative real axis")


def log_c(z: ComplexInterval) -> ComplexInterval:
    a = z.abs()
    if not a.lo > 0:
        raise DomainError("complex log of a rectangle containing 0")
    return ComplexInterval(log(a), arg(z))


# -- certified checks and refinement -----------------------------------


def check_lt(x: RealInterval, y) -> Optional[bool]:
    """True if certainly x < y, False if certainly x >= y, else None."""
    o = y if isinstance(y, RealInterval) else RealInterval.exact(y, x.prec)
    if x.hi < o.lo:
        return True
    if x.lo >= o.hi:
        return False
    return None


def check_le(x: RealInterval, y) -> Optional[bool]:
    o = y if isinstance(y, RealInterval) else RealInterval.exact(y, x.prec)
    if x.hi <= o.lo:
        return True
    if x.lo > o.hi:
        return False
    return None


def require(flag: Optional[bool], message: str) -> None:
    """Turn a three-valued certified check into pass / refine / bug."""
    if flag is None:
        raise PrecisionExhausted(message)
    if not flag:
        raise BoundViolation(message)


def with_refinement(compute: Callable[[int], object],
                    start_bits: int = DEFAULT_PREC,
                    cap_bits: int = PREC_CAP):
    """Run compute(prec), doubling precision on PrecisionExhausted."""
    prec = start_bits
    while True:
        try:
            return compute(prec)
        except PrecisionExhausted:
            if prec >= cap_bits:
                raise
            prec = min(2 * prec, cap_bits)


# -- decimal rendering --------------------------------------------------


def _mpfr_fraction(x) -> Fraction:
    m, e = x.as_mantissa_exp()
    return Fraction(int(m)) * Fraction(2) ** int(e)


def _as_plain_fraction(value) -> Fraction:
    """Fraction with plain-int internals (gmpy2 rejects mpz-backed ones)."""
    if isinstance(value, Fraction):
        return Fraction(int(value.numerator), int(value.denominator))
    return Fraction(value)


def _decimal_directed(q: Fraction, digits: int, round_up: bool) -> str:
    if q == 0:
        return "0"
    e = len(str(abs(q.numerator))) - len(str(q.denominator))
    while Fraction(10) ** e > abs(q):
        e -= 1
    while Fraction(10) ** (e + 1) <= abs(q):
        e += 1
    t = e - digits + 1
    scaled = q * Fraction(10) ** (-t)
    n = -((-scaled.numerator) // scaled.denominator) if round_up else scaled.numerator // scaled.denominator
    if abs(n) >= 10 ** digits:
        n = n // 10 if n > 0 else -((-n) // 10)
        e += 1
    sign = "-" if n < 0 else ""
    s = str(abs(n)).rjust(digits, "0")
    return f"{sign}{s[0]}.{s[1:]}e{e:+03d}"


def certified_upper(x: RealInterval, digits: int = 25) -> str:
    """Decimal string that parses to a value >= every point of x."""
    if gmpy2.is_infinite(x.hi):
        return "inf"
    return _decimal_directed(_mpfr_fraction(x.hi), digits, round_up=True)


def certified_lower(x: RealInterval, digits: int = 25) -> str:
    if gmpy2.is_infinite(x.lo):
        return "-inf"
    return _decimal_directed(_mpfr_fraction(x.lo), digits, round_up=False)
