from fractions import Fraction

import pytest
import sympy
from sympy.polys.subresultants_qq_zz import sylvester
from hypothesis import given, settings
from hypothesis import strategies as st

from nbody_galois import exact
from nbody_galois.errors import InputError
from nbody_galois.exact import MPoly, Poly

small = st.fractions(min_value=-20, max_value=20, max_denominator=12)
polys = st.lists(small, min_size=1, max_size=6).map(Poly.from_rationals)


def to_sympy(p: Poly, x):
    return sum(sympy.Rational(str(c)) * x ** k for k, c in enumerate(p.coeffs))


def test_resultant_sign_against_product_formula():
    # Res(x^3 + 1, x^5) = prod over roots a of x^3 + 1 of a^5 = (-1)^5
    assert exact.resultant(Poly.from_rationals([1, 0, 0, 1]), Poly.from_rationals([0] * 5 + [1])) == -1


def test_resultant_trivial_examples():
    x_minus_1 = Poly.from_rationals([-1, 1])
    assert exact.resultant(x_minus_1, Poly.from_rationals([1, 0, 1])) == 2
    x = Poly.x()
    assert exact.resultant(x, x) == 0


@settings(max_examples=60, deadline=None)
@given(polys, polys)
def test_resultant_matches_sympy(p, q):
    if p.is_zero() or q.is_zero() or p.degree < 1 or q.degree < 1:
        return
    # sympy.resultant drops the sign for some monomial factors; the Sylvester
    # determinant is the definition used here
    x = sympy.Symbol("x")
    want = sylvester(to_sympy(p, x), to_sympy(q, x), x).det()
    assert sympy.Rational(str(exact.resultant(p, q))) == want


@settings(max_examples=60, deadline=None)
@given(polys, polys)
def test_resultant_antisymmetry(p, q):
    if p.is_zero() or q.is_zero():
        return
    sign = (-1) ** (p.degree * q.degree)
    assert exact.resultant(p, q) == sign * exact.resultant(q, p)


@settings(max_examples=60, deadline=None)
@given(polys, polys)
def test_resultant_zero_iff_common_factor(p, q):
    if p.is_zero() or q.is_zero() or p.degree < 1 or q.degree < 1:
        return
    assert (exact.resultant(p, q) == 0) == (exact.gcd(p, q).degree > 0)


@settings(max_examples=60, deadline=None)
@given(polys, polys)
def test_divmod_identity(p, q):
    if q.is_zero():
        return
    quo, rem = p.divmod(q)
    assert quo * q + rem == p
    assert rem.is_zero() or rem.degree < q.degree


@settings(max_examples=40, deadline=None)
@given(polys, polys, polys)
def test_arithmetic_ring_laws(a, b, c):
    assert (a + b) * c == a * c + b * c
    assert a * b == b * a


@settings(max_examples=40, deadline=None)
@given(polys, small)
def test_taylor_shift_evaluates_shifted(p, a):
    shifted = p.taylor_shift(a)
    for x in (Fraction(0), Fraction(1, 3), Fraction(-2)):
        assert shifted(x) == p(x + a)


def test_square_free_decomposition():
    x = Poly.x()
    one = Poly.from_rationals([1])
    p = (x - one) ** 3 * (x + 2 * one) ** 2 * (x * x + one)
    parts = exact.square_free_decomposition(p)
    rebuilt = Poly.from_rationals([1])
    for f, k in parts:
        rebuilt = rebuilt * f ** k
    assert rebuilt.monic() == p.monic()
    mult = {k: f for f, k in parts}
    assert mult[3] == x - one
    assert mult[2] == x + 2 * one


def test_rational_roots_and_sturm():
    x = Poly.x()
    one = Poly.from_rationals([1])
    p = (2 * x - one) * (3 * x + 2 * one) * (x * x - 2 * one)
    assert exact.rational_roots(p) == [Fraction(-2, 3), Fraction(1, 2)]
    assert exact.count_real_roots(p) == 4
    assert exact.count_real_roots(p, 0, 10) == 2
    intervals = exact.real_root_isolation(p, Fraction(1, 1000))
    assert len(intervals) == 4
    for lo, hi in intervals:
        assert hi - lo <= Fraction(1, 1000)


def test_charpoly_rank_nullspace():
    a = [[2, 1, 0], [0, 2, 0], [0, 0, 3]]
    chi = exact.charpoly(a)
    x = sympy.Symbol("x")
    assert sympy.expand(to_sympy(chi, x) - sympy.Matrix(a).charpoly(x).as_expr()) == 0
    shifted = [[a[i][j] - (2 if i == j else 0) for j in range(3)] for i in range(3)]
    assert exact.rank(shifted) == 2
    ns = exact.nullspace(shifted)
    assert len(ns) == 1


def test_format_parse_roundtrip():
    p = Poly.from_rationals(["1/2", 0, "-3/7", 4])
    assert exact.parse_poly(exact.format_poly(p)) == p
    with pytest.raises(InputError):
        exact.parse_poly("")


def test_mpoly_ratio_and_substitute():
    m1, m2, m3 = exact.mass_symbols()
    p = 3 * m1 * m2 + m3
    assert (2 * p).ratio_to(p) == 2
    assert (p + m1).ratio_to(p) is None
    q = p.substitute("m3", MPoly.const(1) - m1 - m2)
    assert q.evaluate((Fraction(1, 2), Fraction(1, 4), 0)) == p.evaluate((Fraction(1, 2), Fraction(1, 4), Fraction(1, 4)))


def test_as_rational_inputs():
    assert exact.as_rational(0.2) == Fraction(1, 5)
    assert exact.as_rational("3/9") == Fraction(1, 3)
    with pytest.raises(InputError):
        exact.as_rational("abc")
    with pytest.raises(InputError):
        exact.as_rational(float("nan"))
