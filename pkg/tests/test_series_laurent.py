from fractions import Fraction as F

import pytest
import sympy as sp
from hypothesis import given, strategies as st

from dtwall.errors import DomainError, ScaleError
from dtwall.series import (
    LaurentSeries,
    SeriesWindow,
    drop_variable,
    dump_json,
    dump_text,
    embed,
    load_json,
    load_text,
    series_inverse,
    series_mul,
    series_pow,
    substitute_monomial,
)

X, Y = sp.symbols("X Y")


def series_xy(terms, hx, hy):
    return LaurentSeries.build(("x", "y"), [(0, hx), (0, hy)], terms)


@st.composite
def power_series(draw):
    hx = draw(st.integers(0, 6))
    hy = draw(st.integers(0, 4))
    terms = draw(st.dictionaries(
        st.tuples(st.integers(0, hx), st.integers(0, hy)),
        st.integers(-5, 5), max_size=12,
    ))
    return series_xy(terms, hx, hy)


def to_sympy(s):
    return sum((sp.Rational(c.numerator, c.denominator) if isinstance(c, F) else c) * X ** e[0] * Y ** e[1]
               for e, c in s.items()) if len(s) else sp.Integer(0)


def truncated_terms(expr, hx, hy):
    poly = sp.Poly(sp.expand(expr), X, Y) if expr != 0 else None
    out = {}
    if poly is None:
        return out
    for (a, b), c in poly.terms():
        if a <= hx and b <= hy and c != 0:
            out[(F(a), F(b))] = F(int(c.p), int(c.q))
    return out


def as_dict(s):
    return dict(s.items())


def on(s, hx, hy):
    return as_dict(s.restrict([(0, hx), (0, hy)]))


@given(power_series(), power_series())
def test_product_matches_polynomial_truncation(a, b):
    p = a * b
    hx = min(a.real_window().bounds[0][1], b.real_window().bounds[0][1])
    hy = min(a.real_window().bounds[1][1], b.real_window().bounds[1][1])
    assert p.real_window().bounds == ((0, hx), (0, hy))
    assert as_dict(p) == truncated_terms(to_sympy(a) * to_sympy(b), hx, hy)


@given(power_series(), power_series(), power_series())
def test_ring_laws_on_common_window(a, b, c):
    hx = min(s.real_window().bounds[0][1] for s in (a, b, c))
    hy = min(s.real_window().bounds[1][1] for s in (a, b, c))
    assert on(a * b, hx, hy) == on(b * a, hx, hy)
    assert on((a * b) * c, hx, hy) == on(a * (b * c), hx, hy)
    assert on(a * (b + c), hx, hy) == on(a * b + a * c, hx, hy)
    assert on(a + b, hx, hy) == on(b + a, hx, hy)
    assert (a - a).is_zero()


@given(power_series())
def test_identity(a):
    one = LaurentSeries.one(("x", "y"), a.real_window())
    assert a * one == a


def test_difference_of_squares():
    x = LaurentSeries.build(("x",), [(0, 5)], {(0,): 1, (1,): 1})
    y = LaurentSeries.build(("x",), [(0, 5)], {(0,): 1, (1,): -1})
    assert as_dict(x * y) == {(0,): 1, (2,): -1}


def test_geometric_inverse():
    s = LaurentSeries.build(("x",), [(0, 6)], {(0,): 1, (1,): -1})
    assert as_dict(series_inverse(s)) == {(i,): 1 for i in range(7)}
    s2 = LaurentSeries.build(("x",), [(0, 4)], {(0,): 2, (1,): 1})
    assert as_dict(series_inverse(s2)) == {(i,): F((-1) ** i, 2 ** (i + 1)) for i in range(5)}


@given(power_series())
def test_inverse_is_inverse(a):
    if a.coefficient(0, 0) == 0:
        with pytest.raises(DomainError):
            series_inverse(a)
        return
    one = LaurentSeries.one(("x", "y"), a.real_window())
    assert a * series_inverse(a) == one


def test_inverse_refuses_negative_window():
    s = LaurentSeries.build(("x",), [(-1, 3)], {(0,): 1})
    with pytest.raises(DomainError):
        series_inverse(s)


@given(power_series(), st.integers(-3, 4))
def test_pow_matches_repeated_product(a, e):
    if e < 0 and a.coefficient(0, 0) == 0:
        return
    base = a if e >= 0 else series_inverse(a)
    expect = LaurentSeries.one(("x", "y"), a.real_window())
    for _ in range(abs(e)):
        expect = expect * base
    assert series_pow(a, e) == expect


def test_pow_negative_example():
    s = LaurentSeries.build(("x",), [(0, 4)], {(0,): 1, (1,): -1})
    # (1 − x)^{−2} = Σ (i+1) x^i
    assert as_dict(series_pow(s, -2)) == {(i,): i + 1 for i in range(5)}


def test_fractional_exponents_and_scales():
    s = LaurentSeries.build(("x",), [(F(-1, 2), 3)], {(F(1, 2),): 3, (F(-1, 3),): 1})
    assert s.scales == (6,)
    assert s.coefficient(F(1, 2)) == 3
    t = LaurentSeries.build(("x",), [(0, 2)], {(F(1, 4),): 1})
    assert t.scales == (12,)
    u = s * t
    assert u.scales == (12,)
    assert u.coefficient(F(3, 4)) == 3
    with pytest.raises(ScaleError):
        LaurentSeries.build(("x",), [(0, 1)], {(F(1, 5),): 1}, scales=(6,))


def test_rescale_preserves_values():
    s = LaurentSeries.build(("x", "y"), [(-1, 2), (0, 3)], {(F(1, 2), 1): 5})
    r = s.rescaled((12, 4))
    assert as_dict(r) == as_dict(s) and r.real_window() == s.real_window()
    with pytest.raises(ScaleError):
        s.rescaled((9, 2))


def test_window_drops_terms_and_add_intersects():
    s = LaurentSeries.build(("x",), [(0, 2)], {(0,): 1, (5,): 7})
    assert as_dict(s) == {(0,): 1}
    t = LaurentSeries.build(("x",), [(1, 4)], {(1,): 2, (4,): 1})
    u = s + t
    assert u.real_window().bounds == ((1, 2),) and as_dict(u) == {(1,): 2}


def test_truncation_coherence():
    # computing on a wide window and then cutting agrees with computing on the cut window
    a = LaurentSeries.build(("x", "y"), [(0, 8), (0, 3)], {(0, 0): 1, (1, 1): 2, (3, 0): -1, (2, 2): 4})
    b = LaurentSeries.build(("x", "y"), [(0, 8), (0, 3)], {(0, 0): 3, (2, 1): -5, (1, 0): 1})
    narrow = [(0, 4), (0, 2)]
    assert (a * b).restrict(narrow) == a.restrict(narrow) * b.restrict(narrow)


def test_explicit_product_window_with_negative_exponents():
    a = LaurentSeries.build(("x",), [(-2, 2)], {(-2,): 1, (1,): 1})
    b = LaurentSeries.build(("x",), [(-1, 3)], {(-1,): 1, (3,): 2})
    p = series_mul(a, b, [(-3, 5)])
    assert as_dict(p) == {(-3,): 1, (0,): 1, (1,): 2, (4,): 2}


def test_immutable():
    s = LaurentSeries.build(("x",), [(0, 1)], {(0,): 1})
    with pytest.raises(AttributeError):
        s.terms = {}


def test_substitute_monomial_examples():
    s = LaurentSeries.build(("x", "y"), [(0, 2), (0, 1)], {(1, 0): 1, (0, 1): 2, (2, 1): 3})
    t = substitute_monomial(s, {"x": {"x": 1, "z": -1}, "y": {"x": 2, "y": 1, "z": -2}})
    assert t.names == ("x", "y", "z")
    assert as_dict(t) == {(1, 0, -1): 1, (2, 1, -2): 2, (4, 1, -4): 3}
    assert t.real_window().bounds == ((0, 4), (0, 1), (-4, 0))
    half = substitute_monomial(s, {"x": {"x": F(1, 2)}, "y": {"y": 1}})
    assert half.coefficient(F(1, 2), 0) == 1
    with pytest.raises(DomainError):
        substitute_monomial(s, {"x": {"x": 1}})


@given(power_series(), power_series())
def test_substitution_is_a_ring_map(a, b):
    rules = {"x": {"x": 1, "z": -1}, "y": {"x": 3, "y": 1, "z": -2}}
    hx = min(a.real_window().bounds[0][1], b.real_window().bounds[0][1])
    hy = min(a.real_window().bounds[1][1], b.real_window().bounds[1][1])
    prod = (a * b).restrict([(0, hx), (0, hy)])
    lhs = substitute_monomial(prod, rules)
    rhs = series_mul(substitute_monomial(a, rules), substitute_monomial(b, rules), lhs.real_window())
    # the image window is a bounding box; pull terms back to (x, y) = (−z − 2y, y) to compare
    back = {e: c for e, c in rhs.items() if 0 <= -e[2] - 2 * e[1] <= hx and 0 <= e[1] <= hy}
    assert as_dict(lhs) == back


def test_embed_and_drop():
    s = LaurentSeries.build(("x",), [(0, 3)], {(1,): 2, (3,): 1})
    e = embed(s, ("x", "y"))
    assert as_dict(e) == {(1, 0): 2, (3, 0): 1}
    t = LaurentSeries.build(("x", "y"), [(0, 2), (0, 2)], {(1, 0): 1, (1, 2): 4, (2, 1): 1})
    assert as_dict(drop_variable(t, "y")) == {(1,): 5, (2,): 1}


@given(power_series())
def test_dump_round_trips(a):
    assert load_text(dump_text(a)) == a
    assert load_json(dump_json(a)) == a
    assert dump_text(load_text(dump_text(a))) == dump_text(a)


def test_dump_text_layout():
    s = LaurentSeries.build(("x", "y"), [(-2, 2), (0, 1)], {(-2, 0): -10, (F(1, 2), 1): F(1, 3)})
    assert dump_text(s) == "var x scale 6 window -12 12\nvar y scale 2 window 0 2\n-10/1 -12 0\n1/3 3 2\n"


def test_window_validation():
    with pytest.raises(DomainError):
        SeriesWindow.of(x=(2, 1))
    with pytest.raises(DomainError):
        LaurentSeries.build(("x", "x"), [(0, 1), (0, 1)], {})
