"""Ribaucour-reduced immersions, graph surfaces and their curvature data.

Every constructor takes a 2-jet (possibly batched) and returns a
`SurfaceSample` whose vectors have a trailing axis of length 3.  The second
fundamental form is the Weingarten pairing II(X, Y) = -<dnu(X), dX(Y)>, so
second derivatives of the generating function are all that is needed.
"""

from __future__ import annotations

import enum
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import (CausalityViolation, DegenerateMetric, DegenerateNormal,
                     DomainError, FieldUndefined, NoConvergence)
from .scalarfield import eval_jet2
from .umbilic import tensors as _t
from .umbilic.fields import LineField
from .umbilic.tensors import SymTensor2


class Kind(str, enum.Enum):
    EUCLID_RIBAUCOUR = "EuclidRibaucour"
    SPACELIKE_RIBAUCOUR = "SpacelikeRibaucour"
    TIMELIKE_RIBAUCOUR = "TimelikeRibaucour"
    GRAPH_EUCLID = "GraphEuclid"
    GRAPH_SPACELIKE = "GraphSpacelike"
    GRAPH_TIMELIKE = "GraphTimelike"

    @property
    def lorentz(self):
        return self not in (Kind.EUCLID_RIBAUCOUR, Kind.GRAPH_EUCLID)

    @property
    def normal_square(self):
        """nu . nu in the ambient metric."""
        if self in (Kind.SPACELIKE_RIBAUCOUR, Kind.GRAPH_SPACELIKE):
            return -1.0
        return 1.0


_ALIASES = {
    "euclid": Kind.EUCLID_RIBAUCOUR, "spacelike": Kind.SPACELIKE_RIBAUCOUR,
    "timelike": Kind.TIMELIKE_RIBAUCOUR, "graph-euclid": Kind.GRAPH_EUCLID,
    "graph-spacelike": Kind.GRAPH_SPACELIKE, "graph-timelike": Kind.GRAPH_TIMELIKE,
}


def as_kind(kind) -> Kind:
    if isinstance(kind, Kind):
        return kind
    key = str(kind)
    if key in _ALIASES:
        return _ALIASES[key]
    return Kind(key)


def dot(a, b, lorentz):
    """Inner product over the last axis; signature (+, +, -) if `lorentz`."""
    s = a[..., 0] * b[..., 0] + a[..., 1] * b[..., 1]
    return s - a[..., 2] * b[..., 2] if lorentz else s + a[..., 2] * b[..., 2]


@dataclass(frozen=True)
class SurfaceSample:
    kind: Kind
    position: np.ndarray
    normal: np.ndarray
    first_ff: SymTensor2
    second_ff: SymTensor2
    # partial derivatives of the immersion and normal in the chart
    tangents: tuple = ()
    normal_derivs: tuple = ()

    @property
    def ambient(self):
        return "Lorentz(++-)" if self.kind.lorentz else "Euclidean"

    def normal_square(self):
        return dot(self.normal, self.normal, self.kind.lorentz)

    def gauss(self):
        """Gaussian curvature (nu.nu) * det(shape operator).

        With this sign the Euclidean and Lorentzian curvatures of one graph
        have opposite signs, and det of the shape operator keeps its usual
        meaning for time-like surfaces where nu.nu = +1.
        """
        det_i = self.first_ff.det
        return self.kind.normal_square * self.second_ff.det / det_i


def _stack(*cols):
    return np.stack(np.broadcast_arrays(*cols), axis=-1)


def _forms(kind, X1, X2, nu, nu1, nu2):
    lor = kind.lorentz
    first = SymTensor2(dot(X1, X1, lor), dot(X1, X2, lor), dot(X2, X2, lor))
    second = SymTensor2(-dot(nu1, X1, lor),
                        -0.5 * (dot(nu1, X2, lor) + dot(nu2, X1, lor)),
                        -dot(nu2, X2, lor))
    return first, second


def _grad_parts(jet):
    p, q = jet.d1
    a, c, b = jet.d2
    return p, q, a, c, b


def euclid_ribaucour(jet) -> SurfaceSample:
    """f = (x, y, 0) - lam*nu + lam*e3 with the Euclidean Ribaucour normal."""
    lam = jet.value
    x, y = jet.point
    p, q, a, c, b = _grad_parts(jet)
    s = p * p + q * q
    den = 1 + s
    nu = _stack(2 * p, 2 * q, s - 1) / _col(den)
    s1, s2 = 2 * (p * a + q * c), 2 * (p * c + q * b)
    nu1 = (_stack(2 * a, 2 * c, s1) - nu * _col(s1)) / _col(den)
    nu2 = (_stack(2 * c, 2 * b, s2) - nu * _col(s2)) / _col(den)
    e3 = np.array([0.0, 0.0, 1.0])
    pos = _stack(x, y, 0 * x) - _col(lam) * nu + _col(lam) * e3
    X1 = np.array([1.0, 0, 0]) - _col(p) * nu - _col(lam) * nu1 + _col(p) * e3
    X2 = np.array([0, 1.0, 0]) - _col(q) * nu - _col(lam) * nu2 + _col(q) * e3
    first, second = _forms(Kind.EUCLID_RIBAUCOUR, X1, X2, nu, nu1, nu2)
    return SurfaceSample(Kind.EUCLID_RIBAUCOUR, pos, nu, first, second,
                         (X1, X2), (nu1, nu2))


def _col(v):
    v = np.asarray(v, dtype=float)
    return v[..., None]


def _check_k(k, jet, what):
    bad = ~(np.abs(k) > 1e-12)
    if np.any(bad):
        raise DegenerateNormal("%s normal degenerates at %s (k = %r)" % (
            what, _pt(jet, bad), np.ravel(k)[np.flatnonzero(np.ravel(bad))[0]]))


def _pt(jet, mask):
    idx = int(np.flatnonzero(np.ravel(mask))[0]) if np.ndim(mask) else 0
    return tuple(float(np.ravel(c)[idx]) for c in jet.point)


def spacelike_ribaucour(jet) -> SurfaceSample:
    """g = (xi, eta, 0) - mu*nu + mu*e3, nu = (2mu_x, 2mu_y, s+1)/(s-1)."""
    mu = jet.value
    x, y = jet.point
    p, q, a, c, b = _grad_parts(jet)
    s = p * p + q * q
    bad = s >= 1
    if np.any(bad):
        raise DegenerateNormal("space-like reduction needs |grad mu| < 1; "
                               "violated at %s" % (_pt(jet, bad),))
    k = s - 1
    nu = _stack(2 * p, 2 * q, s + 1) / _col(k)
    s1, s2 = 2 * (p * a + q * c), 2 * (p * c + q * b)
    nu1 = (_stack(2 * a, 2 * c, s1) - nu * _col(s1)) / _col(k)
    nu2 = (_stack(2 * c, 2 * b, s2) - nu * _col(s2)) / _col(k)
    e3 = np.array([0.0, 0.0, 1.0])
    pos = _stack(x, y, 0 * x) - _col(mu) * nu + _col(mu) * e3
    X1 = np.array([1.0, 0, 0]) - _col(p) * nu - _col(mu) * nu1 + _col(p) * e3
    X2 = np.array([0, 1.0, 0]) - _col(q) * nu - _col(mu) * nu2 + _col(q) * e3
    first, second = _forms(Kind.SPACELIKE_RIBAUCOUR, X1, X2, nu, nu1, nu2)
    return SurfaceSample(Kind.SPACELIKE_RIBAUCOUR, pos, nu, first, second,
                         (X1, X2), (nu1, nu2))


def timelike_ribaucour(jet) -> SurfaceSample:
    """h = (0, xi, eta) - mu*nu + mu*e1, nu = (1-p^2+q^2, -2p, 2q)/(-1-p^2+q^2)."""
    mu = jet.value
    x, y = jet.point
    p, q, a, c, b = _grad_parts(jet)
    k = -1 - p * p + q * q
    _check_k(k, jet, "time-like")
    nu = _stack(1 - p * p + q * q, -2 * p, 2 * q) / _col(k)
    k1, k2 = -2 * p * a + 2 * q * c, -2 * p * c + 2 * q * b
    nu1 = (_stack(k1, -2 * a, 2 * c) - nu * _col(k1)) / _col(k)
    nu2 = (_stack(k2, -2 * c, 2 * b) - nu * _col(k2)) / _col(k)
    e1 = np.array([1.0, 0.0, 0.0])
    pos = _stack(0 * x, x, y) - _col(mu) * nu + _col(mu) * e1
    X1 = np.array([0, 1.0, 0]) - _col(p) * nu - _col(mu) * nu1 + _col(p) * e1
    X2 = np.array([0, 0, 1.0]) - _col(q) * nu - _col(mu) * nu2 + _col(q) * e1
    first, second = _forms(Kind.TIMELIKE_RIBAUCOUR, X1, X2, nu, nu1, nu2)
    return SurfaceSample(Kind.TIMELIKE_RIBAUCOUR, pos, nu, first, second,
                         (X1, X2), (nu1, nu2))


RIBAUCOUR = {
    Kind.EUCLID_RIBAUCOUR: euclid_ribaucour,
    Kind.SPACELIKE_RIBAUCOUR: spacelike_ribaucour,
    Kind.TIMELIKE_RIBAUCOUR: timelike_ribaucour,
}


def ribaucour_surface(jet, kind) -> SurfaceSample:
    return RIBAUCOUR[as_kind(kind)](jet)


# -- graphs ------------------------------------------------------------------------

def graph_surface(f, kind, p) -> SurfaceSample:
    """Monge patch of `f` at `p`.

    GraphEuclid and GraphSpacelike are z = f(x, y); GraphTimelike is
    x = f(y, z), with the chart coordinates (y, z) passed as (xi, eta).
    """
    kind = as_kind(kind)
    jet = eval_jet2(f, p)
    return graph_from_jet(jet, kind)


def graph_from_jet(jet, kind) -> SurfaceSample:
    kind = as_kind(kind)
    u, v = jet.point
    h = jet.value
    p, q, a, c, b = _grad_parts(jet)
    zero = 0 * p
    if kind is Kind.GRAPH_TIMELIKE:
        pos = _stack(h, u, v)
        X1, X2 = _stack(p, 1 + zero, zero), _stack(q, zero, 1 + zero)
        X11, X12, X22 = _stack(a, zero, zero), _stack(c, zero, zero), _stack(b, zero, zero)
    else:
        pos = _stack(u, v, h)
        X1, X2 = _stack(1 + zero, zero, p), _stack(zero, 1 + zero, q)
        X11, X12, X22 = _stack(zero, zero, a), _stack(zero, zero, c), _stack(zero, zero, b)

    if kind is Kind.GRAPH_EUCLID:
        w = np.sqrt(1 + p * p + q * q)
        nu = _stack(-p, -q, 1 + zero) / _col(w)
    elif kind is Kind.GRAPH_SPACELIKE:
        d2 = 1 - p * p - q * q
        bad = ~(np.asarray(d2) > 0)
        if np.any(bad):
            raise CausalityViolation(_pt(jet, bad), "|grad phi| >= 1, not space-like")
        nu = -_stack(p, q, 1 + zero) / _col(np.sqrt(d2))
    elif kind is Kind.GRAPH_TIMELIKE:
        d2 = 1 + p * p - q * q
        bad = ~(np.asarray(d2) > 0)
        if np.any(bad):
            raise CausalityViolation(_pt(jet, bad), "1 + psi_y^2 - psi_z^2 <= 0, "
                                     "not time-like")
        nu = -_stack(1 + zero, -p, q) / _col(np.sqrt(d2))
    else:
        raise ValueError("not a graph kind: %s" % kind)

    lor = kind.lorentz
    first = SymTensor2(dot(X1, X1, lor), dot(X1, X2, lor), dot(X2, X2, lor))
    second = SymTensor2(dot(X11, nu, lor), dot(X12, nu, lor), dot(X22, nu, lor))
    return SurfaceSample(kind, pos, nu, first, second, (X1, X2), ())


# -- shape operator -------------------------------------------------------------------

class ShapeClass(str, enum.Enum):
    REAL_DISTINCT = "RealDistinct"
    REAL_DOUBLE = "RealDouble"
    COMPLEX_PAIR = "ComplexPair"


def shape_operator(s: SurfaceSample):
    """(I^-1 II as a 2x2 matrix, eigenvalue classification). Single points only."""
    I, II = s.first_ff, s.second_ff
    det_i = float(I.det)
    scale = max(abs(float(I.s11)), abs(float(I.s22)), abs(float(I.s12)), 1e-300)
    if abs(det_i) <= 1e-14 * scale * scale:
        raise DegenerateMetric("first fundamental form is degenerate (det = %r)" % det_i)
    A = np.linalg.solve(I.matrix(), II.matrix())
    tr = A[0, 0] + A[1, 1]
    det = A[0, 0] * A[1, 1] - A[0, 1] * A[1, 0]
    disc = tr * tr - 4 * det
    band = 1e-9 * (1 + tr * tr)
    if abs(disc) <= band:
        cls = ShapeClass.REAL_DOUBLE
    elif disc > 0:
        cls = ShapeClass.REAL_DISTINCT
    else:
        cls = ShapeClass.COMPLEX_PAIR
    return A, cls


def principal_directions(s: SurfaceSample):
    """Unit chart vectors of the principal directions, batched.

    Returns an array (..., 2, 2) whose [..., i, :] is the eigenvector of the
    shape operator for its i-th eigenvalue in decreasing order of the real
    part.  Complex eigenvalues give NaN rows.
    """
    I, II = s.first_ff, s.second_ff
    Imat = np.moveaxis(np.array(I.matrix()), (0, 1), (-2, -1)) if np.ndim(I.s11) \
        else I.matrix()
    IImat = np.moveaxis(np.array(II.matrix()), (0, 1), (-2, -1)) if np.ndim(II.s11) \
        else II.matrix()
    A = np.linalg.solve(Imat, IImat)
    w, V = np.linalg.eig(A)
    order = np.argsort(-w.real, axis=-1)
    V = np.take_along_axis(V, order[..., None, :], axis=-1)
    out = np.swapaxes(V.real, -1, -2).copy()
    complex_ = np.abs(w.imag).max(axis=-1) > 1e-12 * (1 + np.abs(w).max(axis=-1))
    out[complex_] = np.nan
    return out / np.linalg.norm(out, axis=-1, keepdims=True)


# -- closed-form curvature data -------------------------------------------------------

@dataclass(frozen=True)
class CurvatureDetail:
    ln_minus_m2: float
    q: float
    d: float
    hess_det: float
    gauss: float


def curvature_detail(jet, kind) -> CurvatureDetail:
    """Factorized L N - M^2 = 4 hessDet D / q^4 for the three reductions.

    `gauss` is evaluated from the immersion itself, not from the closed form.
    """
    kind = as_kind(kind)
    m = jet.value
    p, q_, a, c, b = _grad_parts(jet)
    h = a * b - c * c
    if kind is Kind.SPACELIKE_RIBAUCOUR:
        q = 1 - p * p - q_ * q_
        d = q * q + 2 * m * (a + b) * q + 4 * m * m * h
    elif kind is Kind.EUCLID_RIBAUCOUR:
        q = 1 + p * p + q_ * q_
        d = q * q - 2 * m * (a + b) * q + 4 * m * m * h
    elif kind is Kind.TIMELIKE_RIBAUCOUR:
        q = 1 + p * p - q_ * q_
        d = q * q - 2 * m * (a - b) * q - 4 * m * m * h
    else:
        raise ValueError("closed forms exist only for the Ribaucour kinds")
    surf = ribaucour_surface(jet, kind)
    return CurvatureDetail(4 * h * d / q ** 4, q, d, h, surf.gauss())


def spacelike_second_ff_closed(jet) -> SymTensor2:
    """Closed-form L_S, M_S, N_S of the space-like reduction."""
    m = jet.value
    p, q_, a, c, b = _grad_parts(jet)
    q = 1 - p * p - q_ * q_
    return SymTensor2(2 * a / q + 4 * m * (c * c + a * a) / q ** 2,
                      2 * c / q + 4 * m * c * (a + b) / q ** 2,
                      2 * b / q + 4 * m * (c * c + b * b) / q ** 2)


def _det3(u, v, w):
    return np.linalg.det(np.stack([u, v, w], axis=-1))


def curvatureline_form(jet, kind) -> SymTensor2:
    """Coefficients of det(nu, dX, dnu) as a quadratic form in (dxi, deta)."""
    kind = as_kind(kind)
    if kind not in (Kind.SPACELIKE_RIBAUCOUR, Kind.TIMELIKE_RIBAUCOUR):
        raise ValueError("curvature-line form is defined for the Lorentz reductions")
    s = ribaucour_surface(jet, kind)
    (X1, X2), (n1, n2) = s.tangents, s.normal_derivs
    nu = s.normal
    return SymTensor2(_det3(nu, X1, n1),
                      0.5 * (_det3(nu, X1, n2) + _det3(nu, X2, n1)),
                      _det3(nu, X2, n2))


def ribaucour_k(jet, kind):
    """The normal denominator k of the Lorentz reductions."""
    p, q = jet.d1
    kind = as_kind(kind)
    if kind is Kind.SPACELIKE_RIBAUCOUR:
        return p * p + q * q - 1
    if kind is Kind.TIMELIKE_RIBAUCOUR:
        return -1 - p * p + q * q
    raise ValueError(kind)


def reduced_form(jet, kind) -> SymTensor2:
    """(-2/k) S_mu (space-like) or (-2/k) T_mu (time-like)."""
    kind = as_kind(kind)
    S = _t.s_matrix(jet) if kind is Kind.SPACELIKE_RIBAUCOUR else _t.t_matrix(jet)
    return S.scaled(-2.0 / ribaucour_k(jet, kind))


# -- forward reduction maps -------------------------------------------------------------

@dataclass(frozen=True)
class ReductionSample:
    source: tuple
    xi_eta: tuple
    mu: float
    delta: float
    nu: np.ndarray


def _warn_if_not_critical(f):
    try:
        j0 = eval_jet2(f, (0.0, 0.0))
    except DomainError:
        warnings.warn("generating graph is not defined at the origin", stacklevel=3)
        return
    if max(abs(j0.value), abs(j0.x), abs(j0.y)) > 1e-12:
        warnings.warn("graph function does not have critical value 0 at the origin; "
                      "the reduction is still computed but is not centred",
                      stacklevel=3)


def spacelike_reduction(f, p, check_origin=True) -> ReductionSample:
    """(x, y) -> (xi, eta, mu) for the graph z = f(x, y) in L^3."""
    if check_origin:
        _warn_if_not_critical(f)
    jet = eval_jet2(f, p)
    fx, fy = jet.d1
    d2 = 1 - fx * fx - fy * fy
    if not d2 > 0:
        raise CausalityViolation(p, "|grad phi| >= 1")
    delta = np.sqrt(d2)
    nu = -np.array([fx, fy, 1.0]) / delta
    mu = jet.value * delta / (1 + delta)
    x, y = jet.point
    return ReductionSample((x, y), (x + mu * nu[0], y + mu * nu[1]), mu, delta, nu)


def timelike_reduction(f, p, check_origin=True) -> ReductionSample:
    """(y, z) -> (xi, eta, mu) for the graph x = f(y, z) in L^3."""
    if check_origin:
        _warn_if_not_critical(f)
    jet = eval_jet2(f, p)
    fy, fz = jet.d1
    d2 = 1 + fy * fy - fz * fz
    if not d2 > 0:
        raise CausalityViolation(p, "1 + psi_y^2 - psi_z^2 <= 0")
    delta = np.sqrt(d2)
    nu = -np.array([1.0, -fy, fz]) / delta
    mu = jet.value * delta / (1 + delta)
    y, z = jet.point
    return ReductionSample((y, z), (y + mu * nu[1], z + mu * nu[2]), mu, delta, nu)


def reduction_identity_residual(f, r: ReductionSample, kind) -> float:
    """max |Q + mu e - X - mu nu| for the graph immersion X."""
    kind = as_kind(kind)
    val = eval_jet2(f, r.source).value
    u, v = r.source
    xi, eta = r.xi_eta
    if kind is Kind.GRAPH_TIMELIKE or kind is Kind.TIMELIKE_RIBAUCOUR:
        lhs = np.array([r.mu, xi, eta])
        rhs = np.array([val, u, v]) + r.mu * r.nu
    else:
        lhs = np.array([xi, eta, r.mu])
        rhs = np.array([u, v, val]) + r.mu * r.nu
    return float(np.max(np.abs(lhs - rhs)))


def invert_reduction(f, kind, target, guess, tol=1e-10, max_steps=50, fd_step=1e-6):
    """Newton solve reduction(p).xi_eta = target with a finite-difference Jacobian."""
    kind = as_kind(kind)
    if kind in (Kind.SPACELIKE_RIBAUCOUR, Kind.GRAPH_SPACELIKE):
        forward = spacelike_reduction
    elif kind in (Kind.TIMELIKE_RIBAUCOUR, Kind.GRAPH_TIMELIKE):
        forward = timelike_reduction
    else:
        raise ValueError("reductions exist for the Lorentz kinds only")
    _warn_if_not_critical(f)
    target = np.asarray(target, dtype=float)

    def F(pt):
        return np.asarray(forward(f, tuple(pt), check_origin=False).xi_eta) - target

    x = np.asarray(guess, dtype=float)
    try:
        for step in range(max_steps + 1):
            r = F(x)
            if np.max(np.abs(r)) < tol:
                return (float(x[0]), float(x[1]))
            if step == max_steps:
                break
            Jm = np.empty((2, 2))
            for i in range(2):
                e = np.zeros(2)
                e[i] = fd_step
                Jm[:, i] = (F(x + e) - F(x - e)) / (2 * fd_step)
            if not np.all(np.isfinite(Jm)) or abs(np.linalg.det(Jm)) < 1e-14:
                raise NoConvergence("singular Jacobian at step %d, point %s" % (step, x))
            x = x - np.linalg.solve(Jm, r)
    except (CausalityViolation, DomainError) as exc:
        raise NoConvergence("Newton iterate left the admissible region: %s" % exc) from exc
    raise NoConvergence("no convergence in %d Newton steps (residual %.3g)"
                        % (max_steps, float(np.max(np.abs(F(x))))))


# -- umbilic search ----------------------------------------------------------------------

def umbilic_residual(s: SurfaceSample):
    """(E N - G L, E M - F L): zero exactly where II is proportional to I."""
    E, F, G = s.first_ff.s11, s.first_ff.s12, s.first_ff.s22
    L, M, N = s.second_ff.s11, s.second_ff.s12, s.second_ff.s22
    return E * N - G * L, E * M - F * L


def _relative_residual(s):
    r1, r2 = umbilic_residual(s)
    scale = s.first_ff.norm() * s.second_ff.norm()
    return np.hypot(r1, r2) / np.maximum(scale, 1e-300)


def find_umbilics(f, kind, bbox, n=41, tol=1e-13, max_steps=40, fd_step=1e-7):
    """Umbilics of a graph surface in `bbox` = (x0, x1, y0, y1).

    Local minima of the relative umbilic residual on an n x n grid seed a
    Newton iteration with a central-difference Jacobian.  Points where the
    surface is not admissible are skipped.  Returns a sorted list of chart
    points, duplicates within 1e-6 merged.
    """
    kind = as_kind(kind)
    xs = np.linspace(bbox[0], bbox[1], n)
    ys = np.linspace(bbox[2], bbox[3], n)
    res = np.full((n, n), np.inf)
    for i, x in enumerate(xs):
        for j, y in enumerate(ys):
            try:
                res[i, j] = _relative_residual(graph_surface(f, kind, (x, y)))
            except (CausalityViolation, DomainError, DegenerateMetric):
                pass
    pad = np.pad(res, 1, constant_values=np.inf)
    nb = [pad[1 + di:n + 1 + di, 1 + dj:n + 1 + dj]
          for di in (-1, 0, 1) for dj in (-1, 0, 1) if di or dj]
    is_min = np.isfinite(res) & np.all([res <= q for q in nb], axis=0)

    def F(pt):
        return np.array(umbilic_residual(graph_surface(f, kind, tuple(pt))), dtype=float)

    found = []
    for i, j in zip(*np.nonzero(is_min)):
        x = np.array([xs[i], ys[j]])
        try:
            for _ in range(max_steps):
                r = F(x)
                Jm = np.empty((2, 2))
                for k in range(2):
                    e = np.zeros(2)
                    e[k] = fd_step
                    Jm[:, k] = (F(x + e) - F(x - e)) / (2 * fd_step)
                if abs(np.linalg.det(Jm)) < 1e-300:
                    break
                dx = np.linalg.solve(Jm, r)
                x = x - dx
                if np.max(np.abs(dx)) < tol:
                    break
        except (CausalityViolation, DomainError, DegenerateMetric, np.linalg.LinAlgError):
            continue
        inside = bbox[0] <= x[0] <= bbox[1] and bbox[2] <= x[1] <= bbox[3]
        if inside and _relative_residual(graph_surface(f, kind, tuple(x))) < 1e-9:
            if all(np.hypot(*(x - y)) > 1e-6 for y in found):
                found.append(x)
    return sorted((float(p[0]), float(p[1])) for p in found)


class PrincipalLineField(LineField):
    """Principal directions of an actual immersion, in chart coordinates.

    Computed from the shape operator of the sampled surface rather than from
    the reduced tensors, so it serves as an independent check of them.
    ``which=0`` follows the larger principal curvature.
    """

    def __init__(self, f, kind, which=0):
        self.f = f
        self.kind = as_kind(kind)
        self.which = which
        self.name = "principal%d(%s)" % (which + 1, self.kind.value)

    def evaluate(self, xs, ys):
        xs = np.atleast_1d(np.asarray(xs, dtype=float)).ravel()
        ys = np.atleast_1d(np.asarray(ys, dtype=float)).ravel()
        try:
            jet = eval_jet2(self.f, (xs, ys))
            if self.kind in (Kind.GRAPH_EUCLID, Kind.GRAPH_SPACELIKE, Kind.GRAPH_TIMELIKE):
                s = graph_from_jet(jet, self.kind)
            else:
                s = ribaucour_surface(jet, self.kind)
        except (DomainError, CausalityViolation, DegenerateNormal) as e:
            raise FieldUndefined(getattr(e, "point", None), str(e)) from e
        I, II = s.first_ff, s.second_ff
        A = np.linalg.solve(I.stacked(), II.stacked())
        w = np.linalg.eigvals(A)
        gap = np.abs(w[:, 0] - w[:, 1])
        scale = 1e-9 * (1 + np.abs(w).max(axis=1))
        bad = (gap <= scale) | (np.abs(w.imag).max(axis=1) > scale)
        if bad.any():
            i = int(np.flatnonzero(bad)[0])
            raise FieldUndefined((float(xs[i]), float(ys[i])),
                                 "umbilic or complex principal curvatures")
        dirs = principal_directions(s)[:, self.which, :]
        return dirs, gap
