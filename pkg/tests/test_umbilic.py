import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from ribaucour.errors import (ComplexPrincipal, DiscontinuousGlue, NoNullDirection,
                              NonConvergentSampling, ScalarPoint, UmbilicPoint,
                              UndefinedOnCircle, VanishingOnCircle)
from ribaucour.scalarfield import eval_jet2, parse
from ribaucour.umbilic import (EVERYWHERE_NULL, EigenLineField, HalfInt, LineDir, PointType,
                               Sector, SmoothNullFlow, SymTensor2, TensorField, ThmEField,
                               VectorLineField, characteristic_field, characteristic_vector,
                               classify_batch, classify_point, eigen_directions, eigen_field,
                               glued_field, hessian_matrix, index_line_field, null_directions,
                               perp_flow, s_matrix, t_matrix, tct_check, thmE_fields,
                               type_mask, winding_vector_field)
from ribaucour.umbilic.winding import WindingOptions
from ribaucour.verify import I2_MU, LAMBDA_M, POSITIVE_K_MU, random_tensor_field

O = (0.0, 0.0)
I2 = parse(I2_MU)
K2424 = parse(POSITIVE_K_MU)


def jet(src, p):
    return eval_jet2(parse(src) if isinstance(src, str) else src, p)


# -- tensors ---------------------------------------------------------------------------

def test_s_matrix_examples():
    assert s_matrix(jet("xi^2+eta^2", (0.3, -0.1))).norm() == pytest.approx(0, abs=1e-14)
    S = s_matrix(jet("xi^3", (0.2, 0.1)))
    assert (S.s11, S.s12, S.s22) == pytest.approx((0.0, -0.6, 0.0), abs=1e-14)


def test_t_matrix_examples():
    x, y = 0.3, -0.2
    T = t_matrix(eval_jet2(I2, (x, y)))
    assert (T.s11, T.s12, T.s22) == pytest.approx((4 * x * y, 2 * (x * x + y * y), 4 * x * y))
    assert T.det == pytest.approx(-4 * (x * x - y * y) ** 2)
    T = t_matrix(eval_jet2(K2424, (x, y)))
    assert (T.s11, T.s12, T.s22) == pytest.approx((0.0, 6 * (x * x + y * y), 0.0), abs=1e-14)


def test_hessian_and_characteristic_vector():
    x, y = 0.4, 0.7
    H = hessian_matrix(jet("rezpow(3)", (x, y)))
    assert (H.s11, H.s12, H.s22) == pytest.approx((6 * x, -6 * y, -6 * x))
    assert characteristic_vector(H) == pytest.approx((12 * x, -12 * y))
    assert characteristic_vector(SymTensor2(2.0, 0.0, 2.0)) == (0.0, 0.0)
    S = SymTensor2(0.3, -0.4, -0.3)
    assert characteristic_vector(S) == pytest.approx((2 * S.s11, 2 * S.s12))


@given(st.floats(-5, 5), st.floats(-5, 5))
def test_traceless_det_nonpositive(a, c):
    S = SymTensor2(a, c, -a)
    assert S.trace == 0 and S.det <= 0


def test_scalar_point_equivalence():
    for src in ("xi^2+eta^2", "xi^3", "rezpow(4)"):
        j = jet(src, (0.2, 0.1))
        H = hessian_matrix(j)
        assert (H.deviator_norm() < 1e-12) == (s_matrix(j).norm() < 1e-12)


# -- directions ---------------------------------------------------------------------------

def test_line_dir_and_half_int():
    assert LineDir.of(1, 1) == LineDir.of(-2, -2)
    assert LineDir.of(1, 0) != LineDir.of(0, 1)
    assert LineDir.at_angle(3 * math.pi / 2).angle == pytest.approx(math.pi / 2)
    h = HalfInt(-3)
    assert h == -1.5 and h == Fraction(-3, 2) and str(h) == "-3/2"
    assert h.to_json() == {"num": -3, "den": 2}
    assert HalfInt.of(1) + HalfInt.of(0.5) == HalfInt(3)
    assert -HalfInt(1) == HalfInt(-1) and str(HalfInt(4)) == "2"
    with pytest.raises(ValueError):
        HalfInt.of(0.3)


def test_eigen_directions():
    e1, e2 = eigen_directions(SymTensor2(2.0, 0.0, 1.0))
    assert e1 == LineDir.of(1, 0) and e2 == LineDir.of(0, 1)
    e1, e2 = eigen_directions(SymTensor2(0.0, 1.0, 0.0))
    assert e1 == LineDir.of(1, 1) and e2 == LineDir.of(1, -1)
    with pytest.raises(ScalarPoint):
        eigen_directions(SymTensor2(3.0, 0.0, 3.0))


@given(st.floats(-3, 3), st.floats(-3, 3), st.floats(-3, 3))
def test_eigen_directions_orthogonal_eigenvectors(a, b, c):
    S = SymTensor2(a, b, c)
    if S.deviator_norm() <= 1e-6 * (1 + S.norm()):
        return
    e1, e2 = eigen_directions(S)
    assert abs(e1.dot(e2)) < 1e-12
    for e in (e1, e2):
        v = S.matrix() @ np.array(e.u)
        assert abs(v[0] * e.u[1] - v[1] * e.u[0]) < 1e-10 * (1 + S.norm())


def test_null_directions():
    assert set(d.angle for d in null_directions(SymTensor2(0.0, 2.0, 0.0))) == \
        {0.0, math.pi / 2}
    assert null_directions(SymTensor2(1.0, 0.0, 1.0)) == ()
    assert null_directions(SymTensor2(0.0, 0.0, 0.0)) is EVERYWHERE_NULL
    t = 0.2
    (d,) = null_directions(t_matrix(eval_jet2(I2, (t, t))))
    assert d == LineDir.of(1, -1)


@given(st.floats(-3, 3), st.floats(-3, 3))
def test_null_directions_rotated_45_from_eigen(a, c):
    S = SymTensor2(a, c, -a)
    if S.norm() < 1e-6:
        return
    nulls = null_directions(S)
    assert len(nulls) == 2
    for nd in nulls:
        assert abs(S.quad(*nd.u)) < 1e-12 * S.norm()
        for ed in eigen_directions(S):
            d = (nd.angle - ed.angle) % (math.pi / 2)
            assert abs(d - math.pi / 4) < 1e-9


# -- classification ------------------------------------------------------------------

def test_classify_i2():
    assert classify_point(eval_jet2(I2, O), "timelike") is PointType.UMBILIC
    assert classify_point(eval_jet2(I2, (0.1, -0.1)), "timelike") is PointType.QUASI_UMBILIC
    assert classify_point(eval_jet2(I2, (0.1, 0.03)), "timelike") is PointType.REGULAR
    assert classify_point(jet("rejpow(5)", (0.1, 0.3)), "timelike") is \
        PointType.NO_REAL_PRINCIPAL


def test_classify_2424_has_no_quasi_umbilics():
    g = np.linspace(-0.2, 0.2, 31)
    X, Y = np.meshgrid(g, g)
    cls = classify_batch(eval_jet2(K2424, (X.ravel(), Y.ravel())), "timelike")
    assert not type_mask(cls, PointType.QUASI_UMBILIC).any()
    assert type_mask(cls, PointType.UMBILIC).sum() == 1


def test_classify_spacelike():
    assert classify_point(jet("xi^2+eta^2", (0.2, 0.1)), "spacelike") is PointType.UMBILIC
    assert classify_point(jet("xi^3", (0.2, 0.1)), "spacelike") is PointType.REGULAR


def test_type_mask_is_not_string_comparison():
    cls = classify_batch(eval_jet2(I2, (np.array([0.0, 0.1]), np.array([0.0, 0.1]))),
                         "timelike")
    assert type_mask(cls, PointType.UMBILIC).tolist() == [True, False]


def test_tct():
    assert tct_check(eval_jet2(I2, (0.2, 0.1))) < 1e-9
    j = eval_jet2(K2424, (0.1, 0.1))
    assert {d.angle for d in null_directions(t_matrix(j))} == {0.0, math.pi / 2}
    assert tct_check(j) < 1e-9
    with pytest.raises(NoNullDirection):
        tct_check(eval_jet2(I2, O))


# -- winding numbers ------------------------------------------------------------------

def test_winding_basic():
    assert winding_vector_field(lambda x, y: (x, y), O, 1.0)[0] == 1
    assert winding_vector_field(lambda x, y: (-x, y), O, 1.0)[0] == -1
    k, rep = winding_vector_field(lambda x, y: (x ** 3 - 3 * x * y * y, 3 * x * x * y - y ** 3),
                                  O, 0.5)
    assert k == 3 and rep.max_step < math.pi / 3 and rep.residual < 1e-6 * 2 * math.pi
    assert rep.min_magnitude > 1e-9


def test_high_winding_refines_sampling():
    k, rep = winding_vector_field(lambda x, y: (np.cos(200 * np.arctan2(y, x)),
                                                np.sin(200 * np.arctan2(y, x))), O, 1.0)
    assert k == 200 and rep.samples > 256


def test_winding_errors(monkeypatch):
    with pytest.raises(VanishingOnCircle):
        winding_vector_field(lambda x, y: (x - 1, y), O, 1.0)
    with pytest.raises(ValueError):
        winding_vector_field(lambda x, y: (x, y), O, 0.0)
    monkeypatch.setenv("UMBILIC_SAMPLES", "256")
    with pytest.raises(NonConvergentSampling) as e:
        winding_vector_field(lambda x, y: (np.cos(200 * np.arctan2(y, x)),
                                           np.sin(200 * np.arctan2(y, x))), O, 1.0)
    assert e.value.report.samples == 256
    with pytest.raises(NonConvergentSampling):
        winding_vector_field(lambda x, y: (x, y), O, 1.0,
                             WindingOptions(min_samples=8, max_samples=8, max_step=0.1))


def test_index_undefined_on_circle():
    with pytest.raises(UndefinedOnCircle) as e:
        index_line_field(SmoothNullFlow(parse("rejpow(5)")), O, 0.2)
    assert e.value.point is not None


def test_index_examples():
    assert index_line_field(eigen_field(parse("xi^4-eta^4")), O, 0.3)[0] == 0
    assert index_line_field(SmoothNullFlow(I2, which=1), O, 0.2)[0] == -1
    assert index_line_field(SmoothNullFlow(I2, which=2), O, 0.2)[0] == 1


@pytest.mark.parametrize("n", [3, 4, 5])
def test_rezpow_eigen_and_characteristic(n):
    f = parse("rezpow(%d)" % n)
    idx, _ = index_line_field(eigen_field(f), O, 0.5)
    assert idx == HalfInt(2 - n)
    k, _ = winding_vector_field(characteristic_field(TensorField.from_scalar(f, "H")), O, 0.5)
    assert k == 2 - n


def test_lambda2_reaches_its_asymptotic_index_only_at_small_radius():
    # at radius 0.1 the C1 family has not yet entered its asymptotic regime;
    # in double precision m = 2 shows 1 + m/2 first near radius 0.02
    f = parse(LAMBDA_M, {"m": 2})
    assert index_line_field(eigen_field(f), O, 0.1)[0] == 0
    assert index_line_field(eigen_field(f), O, 0.02)[0] == 2
    assert index_line_field(eigen_field(parse(LAMBDA_M, {"m": 1})), O, 0.1)[0] == 1.5


# -- fields ------------------------------------------------------------------------------

def test_thmE_fields():
    j = jet("xi^4+eta^4-xi^3*eta^2", (0.1, 0.05))
    v1, v2, phi = thmE_fields(j)
    a, b = 2 * j.xy, j.xx + j.yy
    assert b * b - a * a > 0
    n1, n2 = math.hypot(*v1), math.hypot(*v2)
    assert abs(v1[0] * v2[1] - v1[1] * v2[0]) <= 1e-9 * n1 * n2
    assert a * a - (b + phi) ** 2 <= 1e-12 and (phi - b) ** 2 - a * a <= 1e-12
    with pytest.raises(UmbilicPoint):
        thmE_fields(eval_jet2(I2, O))
    with pytest.raises(ComplexPrincipal):
        thmE_fields(jet("rejpow(5)", (0.1, 0.3)))


def test_thmE_flow_index_zero():
    assert index_line_field(ThmEField(I2), O, 0.2)[0] == 0
    assert index_line_field(ThmEField(parse("xi^4+eta^4-xi^3*eta^2")), O, 0.2)[0] == 0


def test_glued_fields():
    v1, v2 = SmoothNullFlow(I2, which=1), SmoothNullFlow(I2, which=2)
    half = glued_field([Sector(v2, 225, 315), Sector(v1)], O, check_radius=0.2)
    assert index_line_field(half, O, 0.2)[0] == HalfInt(-1)
    same = glued_field([Sector(v1, 0, 90), Sector(v1)], O, check_radius=0.2)
    assert index_line_field(same, O, 0.2)[0] == -1
    with pytest.raises(DiscontinuousGlue):
        glued_field([Sector(v2, 0, 90), Sector(v1)], O, check_radius=0.2)


def test_perp_flows():
    v1 = SmoothNullFlow(I2, which=1)
    assert index_line_field(perp_flow(v1, "timelike"), O, 0.2)[0] == 1
    f = parse("rezpow(3)")
    p = perp_flow(eigen_field(f, 0), "spacelike")
    xs, ys = np.array([0.3, -0.1]), np.array([0.1, 0.25])
    d_perp, _ = p.evaluate(xs, ys)
    d_other, _ = eigen_field(f, 1).evaluate(xs, ys)
    assert np.allclose(np.abs(np.sum(d_perp * d_other, axis=1)), 1)
    assert index_line_field(p, O, 0.5)[0] == index_line_field(eigen_field(f, 1), O, 0.5)[0]


@given(st.floats(0, 2 * math.pi), st.sampled_from(["timelike", "spacelike"]))
def test_double_perp_is_identity(theta, kind):
    L = VectorLineField(lambda x, y: (np.cos(theta + 0 * x), np.sin(theta + 0 * x)))
    d0, _ = L.evaluate([0.1], [0.2])
    d2, _ = perp_flow(perp_flow(L, kind), kind).evaluate([0.1], [0.2])
    assert abs(abs(float(np.sum(d0 * d2))) - 1) < 1e-12


@pytest.mark.parametrize("src,r", [(I2_MU, 0.2), (POSITIVE_K_MU, 0.2), ("rejpow(4)", 0.3),
                                   ("rejpow(6)", 0.3), ("rejpow(8)", 0.3)])
def test_timelike_index_plus_perp_is_zero(src, r):
    f = parse(src)
    for w in (1, 2):
        L = SmoothNullFlow(f, which=w)
        a = index_line_field(L, O, r)[0]
        b = index_line_field(perp_flow(L, "timelike"), O, r)[0]
        assert a + b == 0


def test_zero_index_mechanism_without_quasi_umbilics():
    # where |b| > |a| on the circle the null line never reaches the diagonals
    t = 2 * np.pi * np.arange(512) / 512
    xs, ys = 0.2 * np.cos(t), 0.2 * np.sin(t)
    j = eval_jet2(K2424, (xs, ys))
    a, b = 2 * j.xy, j.xx + j.yy
    assert np.all(np.abs(b) > np.abs(a))
    L = SmoothNullFlow(K2424, which=1)
    d, _ = L.evaluate(xs, ys)
    theta = np.arctan2(d[:, 1], d[:, 0])
    assert np.all(np.abs(np.sin(2 * theta)) < 1)
    assert index_line_field(L, O, 0.2)[0] == 0


@pytest.mark.parametrize("m,want", [(4, (-1, 1)), (6, (0, 0)), (8, (-1, 1))])
def test_para_complex_family_parity(m, want):
    f = parse("rejpow(%d)" % m)
    got = tuple(index_line_field(SmoothNullFlow(f, which=w), O, 0.3)[0] for w in (1, 2))
    assert got == want


@pytest.mark.parametrize("m", range(3, 9))
def test_para_complex_family_det(m):
    rng = np.random.default_rng(m)
    xs, ys = rng.uniform(-0.5, 0.5, (2, 50))
    keep = np.abs(np.abs(xs) - np.abs(ys)) > 0.05
    xs, ys = xs[keep], ys[keep]
    det = t_matrix(jet("rejpow(%d)" % m, (xs, ys))).det
    ref = -(m * m) * (m - 1) ** 2 * (xs * xs - ys * ys) ** (m - 2)
    assert np.allclose(det, ref, rtol=1e-9, atol=0)


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_eigen_index_is_half_characteristic_winding(seed):
    T, _ = random_tensor_field(np.random.default_rng(seed))
    try:
        idx, _ = index_line_field(EigenLineField(T), O, 0.05)
    except (VanishingOnCircle, UndefinedOnCircle, NonConvergentSampling):
        return
    k, _ = winding_vector_field(characteristic_field(T), O, 0.05)
    assert idx == HalfInt(k)
