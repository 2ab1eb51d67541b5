from fractions import Fraction as F

import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from bethepop.errors import NonDivisible, Undefined, ZeroStep
from bethepop.exactmath import (
    ExpPoly,
    Poly,
    QPoly,
    Q,
    det,
    discrete_wronskian,
    divided_wronskian,
    exp_wronskian,
    gcd,
    is_squarefree,
    monicize,
    poly_from_json,
    poly_to_json,
    proportional_q,
    qwronskian,
    rational_str,
    shift,
    solve_linear,
    wronskian2,
)

X = Poly.x()
rationals = st.fractions(min_value=-5, max_value=5, max_denominator=7)
polys = st.lists(rationals, min_size=0, max_size=5).map(Poly)
nonzero_polys = polys.filter(lambda p: not p.is_zero())


def _sym(p: Poly):
    x = sympy.Symbol("x")
    return sum(sympy.Rational(c.numerator, c.denominator) * x**k for k, c in enumerate(p.coeffs)), x


def test_rational_parsing_round_trip():
    assert Q("−5/8") == F(-5, 8)
    assert Q(3) == F(3)
    assert rational_str(F(-5, 8)) == "-5/8"
    assert rational_str(F(2)) == "2/1"
    with pytest.raises(TypeError):
        Q(0.5)
    p = Poly([F(-5, 8), 1])
    assert poly_from_json(poly_to_json(p)) == p


def test_wronskian2_examples():
    f = Poly([3, 0, 1])
    assert wronskian2(f, f).is_zero()
    assert wronskian2(X, Poly.const(1)) == Poly.const(1)
    assert wronskian2(X**2, X**3) == -(X**4)


def test_qwronskian_examples():
    p = QPoly.of(X - 2, F(1, 3))
    assert qwronskian([p]) == p
    assert qwronskian([p, p]).is_zero()
    # seed pair: W(y, x^{lam+1} * 1) = (5/3) x^{5/3} (x - 1) for lam = 5/3
    lam = F(5, 3)
    w = qwronskian([QPoly.of(X - F(5, 8)), QPoly.of(Poly.const(1), lam + 1)])
    assert w.exponent == lam
    assert w.part == (X - 1).scale(F(5, 3))


def test_discrete_wronskian_examples():
    f = Poly([1, 2, 3])
    assert discrete_wronskian([f], 1) == f
    assert discrete_wronskian([Poly.const(1), X], F(1, 2)) == Poly.const(F(1, 2))
    assert discrete_wronskian([f, f], 3).is_zero()
    with pytest.raises(ZeroStep):
        discrete_wronskian([f], 0)


def test_divided_wronskian_examples():
    lam = F(5, 3)
    us = [QPoly.of(X - F(5, 8)), QPoly.of(Poly.const(1), lam + 1)]
    assert divided_wronskian(us[:1], [lam], [X - 1]) == us[0]
    value = divided_wronskian(us, [lam], [X - 1])
    assert value.exponent == 0 and value.part.degree == 0
    with pytest.raises(NonDivisible):
        divided_wronskian([QPoly.of(X - F(5, 8)), QPoly.of(X**2 + 1, lam + 1)], [lam], [X - 1])


def test_elementary_operations():
    assert shift(X**2, 1) == X**2 + 2 * X + 1
    assert not is_squarefree((X - 1) ** 2)
    assert is_squarefree(X**2 - 1)
    assert gcd(X**2 - 1, X - 1) == X - 1
    with pytest.raises(Undefined):
        gcd(Poly(), Poly())
    assert (X**3 - 1).exact_div(X - 1) == X**2 + X + 1
    with pytest.raises(NonDivisible):
        (X**3 + 1).exact_div(X - 1)


def test_exp_wronskian_rates_add():
    w = exp_wronskian([ExpPoly(F(0), Poly.const(1)), ExpPoly(F(2), Poly.const(1))])
    assert w.rate == 2 and w.part == Poly.const(2)


def test_solve_linear_cases():
    sol, nullity = solve_linear([[F(1), F(1)], [F(1), F(-1)]], [F(3), F(1)])
    assert sol == [2, 1] and nullity == 0
    sol, nullity = solve_linear([[F(1), F(1)]], [F(1)])
    assert nullity == 1
    sol, _ = solve_linear([[F(1)], [F(1)]], [F(1), F(2)])
    assert sol is None


@given(polys, polys, polys)
def test_poly_ring_axioms(a, b, c):
    assert a + b == b + a
    assert a * b == b * a
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c
    assert (a - a).is_zero()


@given(polys, nonzero_polys)
def test_divmod_reconstructs(a, b):
    q, r = a.divmod(b)
    assert q * b + r == a
    assert r.degree < b.degree


@given(polys, polys)
def test_poly_multiplication_matches_sympy(a, b):
    ea, x = _sym(a)
    eb, _ = _sym(b)
    ec, _ = _sym(a * b)
    assert sympy.expand(ea * eb - ec) == 0


@settings(max_examples=40)
@given(st.lists(polys, min_size=1, max_size=3))
def test_qwronskian_matches_derivative_determinant(fs):
    x = sympy.Symbol("x")
    exprs = [_sym(f)[0] for f in fs]
    n = len(fs)
    mat = sympy.Matrix(n, n, lambda i, j: sympy.diff(exprs[i], x, j))
    w = qwronskian([QPoly.of(f) for f in fs])
    got = sympy.expand(x ** sympy.Rational(w.exponent.numerator, w.exponent.denominator) * _sym(w.part)[0])
    assert sympy.expand(mat.det() - got) == 0


@given(polys, polys, polys)
def test_wronskian_product_identity(f, g, h):
    assert wronskian2(f * g, f * h) == f * f * wronskian2(g, h)


@given(polys, polys, st.fractions(min_value=-3, max_value=3, max_denominator=4).filter(bool))
def test_discrete_wronskian_antisymmetric(f, g, h):
    assert discrete_wronskian([f, g], h) == -discrete_wronskian([g, f], h)


@given(polys)
def test_monicize_idempotent(p):
    assert monicize(monicize(p)) == monicize(p)


@settings(max_examples=40)
@given(
    nonzero_polys.filter(lambda p: p[0] != 0),
    nonzero_polys,
    st.fractions(min_value=-4, max_value=4, max_denominator=9).filter(lambda q: q.denominator > 1),
)
def test_divided_wronskian_times_divisor_is_wronskian(y, yt, lam):
    u1, u2 = QPoly.of(y), QPoly.of(yt, lam + 1)
    full = qwronskian([u1, u2])
    if full.is_zero():
        return
    # the exponent is at least lam, so T below is a polynomial
    T = full.part * Poly.monomial(int(full.exponent - lam))
    divided = divided_wronskian([u1, u2], [lam], [T])
    assert proportional_q(divided * QPoly.of(T, lam), full)


def test_det_small():
    assert det([[F(1), F(2)], [F(3), F(4)]]) == -2
