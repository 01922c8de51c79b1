"""Interval arithmetic: containment, directed rounding, refinement."""

from fractions import Fraction

import mpmath as mp
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nsbound import numerics as nm
from nsbound.errors import BoundViolation, DomainError, PrecisionExhausted

rationals = st.fractions(min_value=-100, max_value=100, max_denominator=1000)
nonzero_rationals = rationals.filter(lambda q: q != 0)


def _iv(q, prec=128):
    return nm.RealInterval.exact(q, prec)


class TestContainment:
    @given(a=rationals, b=rationals, c=nonzero_rationals)
    @settings(max_examples=150)
    def test_rational_expression_contained(self, a, b, c):
        exact = (a + b) * c - a / c + b * b
        got = (_iv(a) + _iv(b)) * _iv(c) - _iv(a) / _iv(c) + _iv(b) * _iv(b)
        assert got.contains(exact)

    @given(a=rationals)
    @settings(max_examples=80)
    def test_x_minus_x_contains_zero(self, a):
        x = _iv(a)
        assert (x - x).contains(0)

    @given(a=rationals, n=st.integers(min_value=0, max_value=7))
    @settings(max_examples=80)
    def test_integer_powers(self, a, n):
        assert nm.pow_int(_iv(a), n).contains(a ** n)

    @given(a=nonzero_rationals)
    @settings(max_examples=60)
    def test_abs_and_reciprocal(self, a):
        assert abs(_iv(a)).contains(abs(a))
        assert (1 / _iv(a)).contains(1 / a)

    def test_log_of_one_contains_zero(self):
        assert nm.log(_iv(1)).contains(0)

    def test_exp_log_roundtrip(self):
        x = _iv(Fraction(7, 3))
        assert nm.exp(nm.log(x)).contains(Fraction(7, 3))

    @given(q=st.fractions(min_value=Fraction(1, 50), max_value=50, max_denominator=500))
    @settings(max_examples=60)
    def test_log_against_mpmath(self, q):
        mp.mp.dps = 60
        oracle = mp.log(mp.mpf(q.numerator) / q.denominator)
        got = nm.log(_iv(q))
        assert float(got.lo) <= float(oracle) <= float(got.hi)

    @given(q=st.fractions(min_value=-4, max_value=4, max_denominator=300))
    @settings(max_examples=60)
    def test_sin_cos_against_mpmath(self, q):
        mp.mp.dps = 60
        x = mp.mpf(q.numerator) / q.denominator
        s, c = nm.sin(_iv(q)), nm.cos(_iv(q))
        assert float(s.lo) <= float(mp.sin(x)) <= float(s.hi)
        assert float(c.lo) <= float(mp.cos(x)) <= float(c.hi)


class TestRefinement:
    EXPRESSIONS = [
        lambda prec: nm.log(nm.RealInterval.exact(7, prec)),
        lambda prec: nm.exp(nm.RealInterval.exact(Fraction(5, 7), prec)),
        lambda prec: nm.pi(prec) * Fraction(22, 7),
        lambda prec: nm.sqrt(nm.RealInterval.exact(3, prec)),
        lambda prec: nm.sin(nm.pi(prec) / 7) / nm.sin(nm.pi(prec) * Fraction(2, 7)),
    ]

    @pytest.mark.parametrize("expr", EXPRESSIONS)
    def test_doubling_precision_never_widens(self, expr):
        prev = None
        for prec in (64, 128, 256, 512):
            cur = expr(prec)
            if prev is not None:
                assert cur.width() <= prev.width()
                # directed rounding: enclosures are nested as precision grows
                assert prev.lo <= cur.lo and cur.hi <= prev.hi
            prev = cur

    def test_with_refinement_doubles_until_success(self):
        calls = []

        def compute(prec):
            calls.append(prec)
            if prec < 512:
                raise PrecisionExhausted("narrow")
            return prec

        assert nm.with_refinement(compute, 128, 4096) == 512
        assert calls == [128, 256, 512]

    def test_with_refinement_raises_at_cap(self):
        with pytest.raises(PrecisionExhausted):
            nm.with_refinement(lambda prec: (_ for _ in ()).throw(PrecisionExhausted("x")),
                               128, 256)

    def test_require_three_way(self):
        nm.require(True, "fine")
        with pytest.raises(PrecisionExhausted):
            nm.require(None, "undecided")
        with pytest.raises(BoundViolation):
            nm.require(False, "broken")


class TestDomainErrors:
    def test_division_by_interval_with_zero(self):
        with pytest.raises(DomainError):
            _iv(1) / nm.RealInterval.hull_of(-1, 1, 128)

    def test_log_of_nonpositive(self):
        with pytest.raises(DomainError):
            nm.log(nm.RealInterval.hull_of(-1, 2, 128))
        with pytest.raises(DomainError):
            nm.log(_iv(0))

    def test_rpow_needs_positive_base(self):
        with pytest.raises(DomainError):
            nm.rpow(nm.RealInterval.hull_of(-1, 1, 128), Fraction(1, 2))

    def test_complex_log_branch_cut(self):
        z = nm.ComplexInterval(nm.RealInterval.hull_of(-2, -1, 128),
                               nm.RealInterval.hull_of(-1, 1, 128))
        with pytest.raises(DomainError):
            nm.log_c(z)


class TestComplex:
    def test_root_of_unity_difference(self):
        # |e^(2 pi i / 3) - e^(-2 pi i / 3)| = sqrt(3)
        prec = 128
        third = nm.pi(prec) * Fraction(2, 3)
        z1 = nm.exp_c(nm.ComplexInterval(nm.RealInterval.exact(0, prec), third))
        z2 = nm.exp_c(nm.ComplexInterval(nm.RealInterval.exact(0, prec), -third))
        d = (z1 - z2).abs()
        s3 = nm.sqrt(nm.RealInterval.exact(3, prec))
        assert d.lo <= s3.lo and s3.hi <= d.hi
        assert d.width() < Fraction(1, 2 ** 50)

    @given(a=rationals, b=rationals, c=rationals, d=rationals)
    @settings(max_examples=60)
    def test_complex_product_contains_exact(self, a, b, c, d):
        z = nm.ComplexInterval.exact(a, b) * nm.ComplexInterval.exact(c, d)
        assert z.re.contains(a * c - b * d)
        assert z.im.contains(a * d + b * c)

    def test_complex_division_roundtrip(self):
        z = nm.ComplexInterval.exact(Fraction(3, 7), Fraction(-2, 5))
        w = nm.ComplexInterval.exact(Fraction(1, 3), Fraction(4, 9))
        back = (z * w) / w
        assert back.re.contains(Fraction(3, 7)) and back.im.contains(Fraction(-2, 5))

    def test_exp_c_against_mpmath(self):
        mp.mp.dps = 50
        z = nm.ComplexInterval.exact(Fraction(1, 3), Fraction(-5, 4), 192)
        got = nm.exp_c(z)
        oracle = mp.e ** mp.mpc(mp.mpf(1) / 3, mp.mpf(-5) / 4)
        assert float(got.re.lo) <= float(oracle.real) <= float(got.re.hi)
        assert float(got.im.lo) <= float(oracle.imag) <= float(got.im.hi)

    def test_complex_pow(self):
        z = nm.ComplexInterval.exact(1, 1, 128)
        w = z ** 8  # (1+i)^8 = 16
        assert w.re.contains(16) and w.im.contains(0)


class TestDecimalRendering:
    def test_certified_upper_examples(self):
        x = nm.RealInterval.hull_of(Fraction(999, 1000), Fraction(1001, 1000), 64)
        assert float(nm.certified_upper(x, 6)) >= 1.001
        y = nm.RealInterval.hull_of(Fraction(-5, 2), Fraction(-12, 5), 64)
        assert float(nm.certified_upper(y, 6)) >= -2.4

    def test_log7_upper_bound(self):
        # high-precision value: log 7 = 1.945910149055313305102352...
        x = nm.log(nm.RealInterval.exact(7, 64))
        assert float(nm.certified_upper(x, 12)) >= 1.945910149

    @given(q=rationals, digits=st.integers(min_value=3, max_value=20))
    @settings(max_examples=100)
    def test_directed_decimal_is_directed(self, q, digits):
        x = _iv(q, 64)
        up = Fraction(nm.certified_upper(x, digits).replace("e", "E"))
        lo = Fraction(nm.certified_lower(x, digits).replace("e", "E"))
        assert lo <= q <= up

    def test_zero_renders(self):
        assert nm.certified_upper(_iv(0), 5) == "0"
