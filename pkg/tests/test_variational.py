from fractions import Fraction

import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from nbody_galois import variational as var
from nbody_galois.errors import InputError, NoObstructionDefinedError, NotSingularPointError
from nbody_galois.variational import INFINITY, VariationalEquation

small_rationals = st.fractions(min_value=-10, max_value=10, max_denominator=8)


def test_normal_form_coefficients():
    eq = VariationalEquation.from_C(3, Fraction(1, 2))
    assert eq.exact and eq.H == Fraction(7, 2)
    t = sympy.Symbol("t")
    P = sum(sympy.Rational(str(c)) * t ** k for k, c in enumerate(eq.P.coeffs))
    assert sympy.expand(P - t * (-9 + 2 * t + 7 * t ** 2)) == 0


def test_singularities_generic_and_confluent():
    s = var.singularities(3, Fraction(7, 2))
    assert s.points == (Fraction(-9, 7), Fraction(0), Fraction(1), INFINITY)
    assert s.confluence is None
    assert "C=1" in var.singularities(1, Fraction(-1, 2)).confluence
    assert "infinity" in var.singularities("sqrt2", 0).confluence
    assert "C=0" in var.singularities(0, -1).confluence


def test_indicial_exponents_closed_forms():
    lam = Fraction(1, 2)
    eq = VariationalEquation.from_C(3, lam)
    # t = 0: -C^2 r (r - 2);  finite roots of 2H t^2 + 2t - C^2: r (2r - 1);  s = 1/t: r (r + 1)
    assert sorted(var.indicial_exponents(eq, 0)) == [0, 2]
    assert sorted(var.indicial_exponents(eq, 1)) == [0, Fraction(1, 2)]
    assert sorted(var.indicial_exponents(eq, Fraction(-9, 7))) == [0, Fraction(1, 2)]
    assert sorted(var.indicial_exponents(eq, INFINITY)) == [-1, 0]
    assert var.log_obstruction(eq, INFINITY) == -(1 + lam)
    with pytest.raises(NotSingularPointError):
        var.indicial_exponents(eq, Fraction(1, 3))


@settings(max_examples=40, deadline=None)
@given(st.sampled_from([3, 5, Fraction(1, 2), 7]), small_rationals)
def test_fuchs_relation(C, lam):
    eq = VariationalEquation.from_C(C, lam)
    assert var.fuchs_sum(eq) == 0


@pytest.mark.parametrize("C,H", [(1, Fraction(-1, 2)), ("sqrt2", 0), (0, -1)])
def test_fuchs_relation_confluent(C, H):
    eq = VariationalEquation.from_C(C, Fraction(3, 4), H)
    assert abs(complex(var.fuchs_sum(eq))) < 1e-12


@settings(max_examples=40, deadline=None)
@given(small_rationals)
def test_log_obstruction_closed_forms(lam):
    eq = VariationalEquation.from_C(3, lam)
    assert var.log_obstruction(eq, 0) == -(lam * lam + lam) / 9


def test_log_obstruction_undefined_for_half_integer_difference():
    eq = VariationalEquation.from_C(3, Fraction(1, 3))
    with pytest.raises(NoObstructionDefinedError):
        var.log_obstruction(eq, 1)


def test_frobenius_series_solves_equation():
    eq = VariationalEquation.from_C(3, Fraction(1, 2))
    coeffs = var.frobenius_series(eq, 1, Fraction(1, 2), 12)
    t = sympy.Symbol("t")
    x = sum(sympy.Rational(str(c)) * (t - 1) ** k for k, c in enumerate(coeffs)) * (t - 1) ** sympy.Rational(1, 2)
    P = t * (-9 + 2 * t + 7 * t ** 2)
    expr = P * sympy.diff(x, t, 2) + (9 - t) * sympy.diff(x, t) - sympy.Rational(1, 2) * x
    # residual vanishes to the truncation order
    val = complex(expr.subs(t, sympy.Rational(101, 100)).evalf(30))
    assert abs(val) < 1e-15


@pytest.mark.parametrize("C,H,name,rep", [
    (0, -1, "ZeroC", 0), (2, 0, "ZeroH", None), (1, Fraction(-1, 2), "MinusHalf", 1),
    (0, 0, "BothZero", 0), (3, Fraction(7, 2), "Generic", 3),
])
def test_level_class(C, H, name, rep):
    lc = var.level_class(C, H)
    assert lc.name == name
    if rep is not None:
        assert lc.representative_C == rep


@settings(max_examples=30, deadline=None)
@given(st.fractions(min_value=Fraction(1, 10), max_value=5), st.fractions(min_value=Fraction(1, 10), max_value=5),
       st.fractions(min_value=-3, max_value=3))
def test_level_class_scale_invariant(alpha, C, H):
    # (p, q) -> (alpha p, alpha^-2 q): C -> C/alpha, H -> alpha^2 H
    assert var.level_class(C, H).name == var.level_class(C / alpha, alpha ** 2 * H).name


@pytest.mark.parametrize("regime,lam,k", [
    ("ZeroC", 2, 2), ("ZeroH", 2, 2), ("ZeroC", -1, 0), ("ZeroC", 0, 1),
    ("MinusHalf", -4, 2), ("MinusHalf", 0, 0), ("ZeroC", 2.0000000001, 2),
])
def test_allowed_values(regime, lam, k):
    v = var.allowed_lambda(regime, lam)
    assert v.abelian_possible and v.matched_k == k


@pytest.mark.parametrize("regime,lam", [
    ("Generic", Fraction(1, 2)), ("ZeroC", Fraction(1, 2)), ("MinusHalf", -2), ("Generic", 2), ("ZeroH", 3),
])
def test_disallowed_values(regime, lam):
    assert not var.allowed_lambda(regime, lam).abelian_possible


def test_generic_allows_zero_and_minus_one():
    assert var.allowed_lambda("Generic", 0).abelian_possible
    assert var.allowed_lambda("Generic", -1).abelian_possible
    assert var.allowed_lambda("BothZero", Fraction(17, 3)).abelian_possible


def test_k_bound_limits_search():
    lam = Fraction(10 * 13, 2)    # k = 11
    assert var.allowed_lambda("ZeroC", lam, k_bound=20).matched_k == 11
    assert not var.allowed_lambda("ZeroC", lam, k_bound=10).abelian_possible
    with pytest.raises(InputError):
        var.allowed_lambda("ZeroC", lam, k_bound=-1)
    with pytest.raises(InputError):
        var.allowed_lambda("Nope", lam)


def test_verdict_examples():
    v = var.verdict(0, -1, 2)
    assert v.regime.name == "ZeroC" and v.abelian_possible and v.matched_k == 2
    v = var.verdict(3, Fraction(7, 2), Fraction(1, 2))
    assert not v.abelian_possible
    at_zero = [s for s in v.evidence["singularities"] if s["location"] == "0"]
    assert at_zero[0]["log_obstruction"] == "-1/12"


@pytest.mark.parametrize("lam", [0, -1])
def test_explicit_solution_residuals(lam):
    sol = var.explicit_solution(3, lam)
    assert sol.residual <= 1e-12
    assert len(sol.basis) == 2


def test_polynomial_solution_search_examples():
    assert var.polynomial_solution_search(3, Fraction(1, 2)) is None
    assert var.polynomial_solution_search(3, 0) is not None
    sol = var.polynomial_solution_search("sqrt2", 2)
    assert sol.describe() == "t^(2)" and sol.residual == 0
    for k in range(1, 5):
        assert var.polynomial_solution_search(1, -k * k) is not None


def test_polynomial_solution_search_oracle():
    # independently substitute each search result back with sympy
    t = sympy.Symbol("t")
    for k in range(2, 7):
        lam = Fraction((k - 1) * (k + 2), 2)
        sol = var.polynomial_solution_search("sqrt2", lam)
        x = sympy.Integer(1)
        for pt, e in sol.exponents:
            x *= (t - sympy.Rational(str(pt))) ** sympy.Rational(str(e))
        x *= sum(sympy.Rational(str(c)) * t ** j for j, c in enumerate(sol.p.coeffs))
        expr = t * (-2 + 2 * t) * sympy.diff(x, t, 2) + (2 - t) * sympy.diff(x, t) - sympy.Rational(str(lam)) * x
        assert sympy.simplify(expr) == 0


def test_hypergeometric_truncation():
    assert all(var.hypergeometric_truncation(1, -k * k) for k in range(1, 7))
    assert all(var.hypergeometric_truncation("sqrt2", Fraction((k - 1) * (k + 2), 2)) for k in range(2, 7))
    assert not var.hypergeometric_truncation(1, Fraction(1, 2))
    with pytest.raises(InputError):
        var.hypergeometric_truncation(3, 0)


def test_float_input_snaps_to_confluent_values():
    eq = VariationalEquation.from_C(2 ** 0.5, 2.0)
    assert eq.c2 == 2
