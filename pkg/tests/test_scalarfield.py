import zlib

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from ribaucour.errors import DomainError, ExprSyntaxError, NonSmoothPoint, UnboundParameter
from ribaucour.scalarfield import (J, ParaComplex, eval_jet2, evaluate, hyperbolic_unit,
                                   para_n2, para_pow, parse, pretty)


# -- parser ------------------------------------------------------------------------

def test_precedence_unary_minus_looser_than_power():
    assert evaluate(parse("-xi^2"), (3.0, 0.0)) == pytest.approx(-9.0)
    assert evaluate(parse("2*xi^2+3"), (2.0, 0.0)) == pytest.approx(11.0)
    assert evaluate(parse("xi-eta-1"), (5.0, 1.0)) == pytest.approx(3.0)
    assert evaluate(parse("xi/eta/2"), (8.0, 2.0)) == pytest.approx(2.0)


def test_parameters_and_greek_aliases():
    f = parse("a*ξ+η", {"a": 2.5})
    assert evaluate(f, (2.0, 1.0)) == pytest.approx(6.0)
    with pytest.raises(UnboundParameter):
        parse("a*xi")
    with pytest.raises(UnboundParameter):
        parse("foo(xi)")


def test_negative_exponent_literal():
    f = parse("(xi^2+eta^2)^(-0.25)")
    assert evaluate(f, (0.0, 2.0)) == pytest.approx(2 ** -0.5)


@pytest.mark.parametrize("src", ["xi+", "sin(xi", "atan2(xi)", "xi^eta",
                                 "rezpow(0)", "rezpow(2.5)", "2 xi", ""])
def test_syntax_errors_carry_offset(src):
    with pytest.raises(ExprSyntaxError) as e:
        parse(src)
    assert 0 <= e.value.offset <= len(src)


def test_arity_checked_at_parse_time():
    with pytest.raises(ExprSyntaxError):
        parse("sin(xi, eta)")
    with pytest.raises(ExprSyntaxError):
        parse("atan2(xi)")


ROUND_TRIP = ["xi^2*eta^2+(xi^4+eta^4)/6", "-(xi-eta)^3", "2-(3-xi)", "xi/(eta/2)",
              "rezpow(4)-imjpow(3)*tanh(xi)", "(xi^2+eta^2)*tanh((xi^2+eta^2)^(-0.25)"
              "*cos(2*atan2(eta,xi)))", "-xi^2", "(-xi)^2", "a*xi"]


@pytest.mark.parametrize("src", ROUND_TRIP)
def test_parse_pretty_round_trip(src):
    f = parse(src, {"a": 1.5})
    again = parse(pretty(f.ast), {"a": 1.5})
    assert again.ast == f.ast


# -- jets vs finite differences ---------------------------------------------------

def _fd(f, x, y, h=1e-5):
    v = lambda a, b: evaluate(f, (a, b))
    fx = (v(x + h, y) - v(x - h, y)) / (2 * h)
    fy = (v(x, y + h) - v(x, y - h)) / (2 * h)
    fxx = (v(x + h, y) - 2 * v(x, y) + v(x - h, y)) / h ** 2
    fyy = (v(x, y + h) - 2 * v(x, y) + v(x, y - h)) / h ** 2
    fxy = (v(x + h, y + h) - v(x + h, y - h) - v(x - h, y + h) + v(x - h, y - h)) / (4 * h * h)
    return (fx, fy), (fxx, fxy, fyy)


NODES = ["sin(xi*eta)", "cos(xi+eta)", "tan(xi)", "sinh(xi-eta)", "cosh(eta)",
         "tanh(xi*eta)", "exp(xi-eta)", "log(2+xi*eta)", "sqrt(2+xi+eta)", "abs(xi+3)",
         "atan2(eta+2,xi+3)", "rezpow(5)", "imzpow(4)", "rejpow(5)", "imjpow(3)",
         "xi^3*eta^2", "(2+xi)^(-1.5)", "xi/(3+eta)"]


@pytest.mark.parametrize("src", NODES)
def test_jet_matches_finite_differences(src):
    f = parse(src)
    rng = np.random.default_rng(zlib.crc32(src.encode()))
    for x, y in rng.uniform(-0.8, 0.8, (100, 2)):
        jet = eval_jet2(f, (x, y))
        d1, d2 = _fd(f, x, y)
        scale = 1 + max(abs(v) for v in (*jet.d1, *jet.d2))
        assert np.allclose(jet.d1, d1, atol=1e-6 * scale)
        # second differences with h=1e-5 lose ~6 digits to cancellation
        assert np.allclose(jet.d2, d2, atol=1e-3 * scale)


def test_batched_jet_equals_pointwise():
    f = parse("rezpow(4)+sin(xi)*eta")
    xs, ys = np.array([0.1, -0.3, 0.7]), np.array([0.2, 0.5, -0.4])
    batch = eval_jet2(f, (xs, ys))
    for i in range(3):
        one = eval_jet2(f, (xs[i], ys[i]))
        assert batch.take(i).d2 == pytest.approx(one.d2, rel=1e-15)


def test_domain_errors():
    with pytest.raises(DomainError):
        eval_jet2(parse("log(xi)"), (-1.0, 0.0))
    with pytest.raises(DomainError):
        eval_jet2(parse("sqrt(xi)"), (-1.0, 0.0))
    with pytest.raises(NonSmoothPoint):
        eval_jet2(parse("abs(xi)"), (0.0, 0.3))
    with pytest.raises(DomainError):
        eval_jet2(parse("xi^0.5"), (-4.0, 0.0))


# -- z^n and para-complex powers ---------------------------------------------------

@pytest.mark.parametrize("n", range(2, 9))
def test_zpow_recurrences(n):
    rng = np.random.default_rng(n)
    xs, ys = rng.uniform(-1, 1, (2, 50))
    re, im = eval_jet2(parse("rezpow(%d)" % n), (xs, ys)), eval_jet2(parse("imzpow(%d)" % n), (xs, ys))
    re1 = evaluate(parse("rezpow(%d)" % (n - 1)), (xs, ys))
    im1 = evaluate(parse("imzpow(%d)" % (n - 1)), (xs, ys))
    assert np.allclose(re.x, n * re1, atol=1e-10)
    assert np.allclose(re.y, -n * im1, atol=1e-10)
    assert np.allclose(im.x, n * im1, atol=1e-10)
    jre, jim = eval_jet2(parse("rejpow(%d)" % n), (xs, ys)), eval_jet2(parse("imjpow(%d)" % n), (xs, ys))
    jre1 = evaluate(parse("rejpow(%d)" % (n - 1)), (xs, ys))
    jim1 = evaluate(parse("imjpow(%d)" % (n - 1)), (xs, ys))
    assert np.allclose(jre.x, n * jre1, atol=1e-10)
    assert np.allclose(jre.y, n * jim1, atol=1e-10)
    assert np.allclose(jim.x, n * jim1, atol=1e-10)


def test_zpow_values_against_complex_arithmetic():
    for x, y in [(0.3, -0.7), (1.2, 0.4)]:
        z = complex(x, y) ** 5
        assert evaluate(parse("rezpow(5)"), (x, y)) == pytest.approx(z.real, rel=1e-13)
        assert evaluate(parse("imzpow(5)"), (x, y)) == pytest.approx(z.imag, rel=1e-13)
        w = para_pow(ParaComplex(x, y), 5)
        assert evaluate(parse("rejpow(5)"), (x, y)) == pytest.approx(w.re, rel=1e-13)
        assert evaluate(parse("imjpow(5)"), (x, y)) == pytest.approx(w.im, rel=1e-13)


def test_para_complex_examples():
    assert para_pow(ParaComplex(1, 1), 2) == ParaComplex(2, 2)
    assert para_pow(ParaComplex(2, 1), 3) == ParaComplex(14, 13)
    assert para_n2(para_pow(ParaComplex(2, 1), 3)) == 27 == para_n2(ParaComplex(2, 1)) ** 3
    assert para_n2(ParaComplex(1, 1)) == 0
    assert para_n2(ParaComplex(2, 1)) == 3
    assert J * J == ParaComplex(1, 0)
    with pytest.raises(ValueError):
        para_pow(ParaComplex(1, 0), 0)


finite = st.floats(-3, 3, allow_nan=False)


@given(finite, finite, finite, finite)
def test_split_norm_multiplicative(a, b, c, d):
    z, w = ParaComplex(a, b), ParaComplex(c, d)
    lhs, rhs = para_n2(z * w), para_n2(z) * para_n2(w)
    scale = (a * a + b * b) * (c * c + d * d) + 1e-300
    assert abs(lhs - rhs) <= 1e-12 * scale


@settings(max_examples=50)
@given(finite, finite, st.integers(1, 9))
def test_para_pow_is_repeated_multiplication(a, b, n):
    z = ParaComplex(a, b)
    acc = z
    for _ in range(n - 1):
        acc = acc * z
    got = para_pow(z, n)
    scale = (abs(a) + abs(b)) ** n + 1e-300
    assert abs(got.re - acc.re) <= 1e-12 * scale and abs(got.im - acc.im) <= 1e-12 * scale


@pytest.mark.parametrize("n", [2, 3, 4, 5, 6])
def test_null_line_identity(n):
    # (r(1 +- j))^(n-1) = 2^(n-2) r^(n-1) (1 +- j)
    r = 0.7
    for s in (1, -1):
        got = para_pow(ParaComplex(r, s * r), n - 1)
        want = 2 ** (n - 2) * r ** (n - 1)
        assert got.re == pytest.approx(want, rel=1e-14)
        assert got.im == pytest.approx(s * want, rel=1e-14)


@pytest.mark.parametrize("t", [-1.1, 0.0, 0.4])
def test_hyperbolic_unit_powers(t):
    got = para_pow(hyperbolic_unit(t), 3)
    want = hyperbolic_unit(3 * t)
    assert got.re == pytest.approx(want.re, rel=1e-13)
    assert got.im == pytest.approx(want.im, rel=1e-13, abs=1e-15)
    assert para_n2(hyperbolic_unit(t)) == pytest.approx(1.0, rel=1e-13)


def test_sector():
    assert ParaComplex(2, 1).sector() == "right"
    assert ParaComplex(-2, 1).sector() == "left"
    assert ParaComplex(0.1, 1).sector() == "top"
    assert ParaComplex(1, -3).sector() == "bottom"
    assert ParaComplex(1, 1).sector() is None
