"""Line fields (direction fields modulo sign) built from generating functions.

Every field implements ``evaluate(xs, ys) -> (dirs, strength)`` on flat
coordinate arrays: ``dirs`` is (N, 2) of unit vectors and ``strength`` is a
non-negative number per point that vanishes where the field degenerates
(used for the winding magnitude guard).  ``candidates`` lists every admissible
direction at a point, which lets streamline tracing follow a branch
locally without global labelling.
"""

from __future__ import annotations

import math
from collections import OrderedDict
from dataclasses import dataclass

import numpy as np

from ..errors import (ComplexPrincipal, DiscontinuousGlue, DomainError,
                      FieldUndefined, UmbilicPoint)
from ..scalarfield import eval_jet2
from .classify import det_band, umbilic_tol
from .directions import LineDir, null_pair_arrays
from . import tensors as _t
from .tensors import SymTensor2


def _flat(xs, ys):
    xs = np.atleast_1d(np.asarray(xs, dtype=float)).ravel()
    ys = np.atleast_1d(np.asarray(ys, dtype=float)).ravel()
    return np.broadcast_arrays(xs, ys)


def _unit(u, v):
    n = np.hypot(u, v)
    with np.errstate(invalid="ignore", divide="ignore"):
        return np.stack([u / n, v / n], axis=-1), n


def _fail(mask, xs, ys, reason):
    i = int(np.flatnonzero(mask)[0])
    raise FieldUndefined((float(xs[i]), float(ys[i])), reason)


def _jets(f, xs, ys):
    try:
        return eval_jet2(f, (xs, ys))
    except DomainError as e:
        raise FieldUndefined(e.point, "generating function: %s" % e) from e


class LineField:
    name = "field"

    def evaluate(self, xs, ys):
        raise NotImplementedError

    def candidates(self, xs, ys):
        """(N, k, 2) admissible unit directions; defaults to the field itself."""
        dirs, _ = self.evaluate(xs, ys)
        return dirs[:, None, :]

    def at(self, x, y) -> LineDir:
        dirs, _ = self.evaluate([x], [y])
        return LineDir(tuple(map(float, dirs[0])))

    def __repr__(self):
        return "<%s %s>" % (type(self).__name__, self.name)


class VectorLineField(LineField):
    """The line field spanned by a vector field F(xs, ys) -> (u, v)."""

    def __init__(self, F, name="vector"):
        self.F = F
        self.name = name

    def evaluate(self, xs, ys):
        xs, ys = _flat(xs, ys)
        u, v = self.F(xs, ys)
        u = np.broadcast_to(np.asarray(u, dtype=float), xs.shape)
        v = np.broadcast_to(np.asarray(v, dtype=float), xs.shape)
        dirs, n = _unit(u, v)
        bad = ~(np.isfinite(n) & (n > 0))
        if bad.any():
            _fail(bad, xs, ys, "vector field vanishes")
        return dirs, n


class TensorField:
    """A batched symmetric-tensor field with a per-point degeneracy tolerance.

    ``fn(xs, ys)`` returns ``(SymTensor2, tol)``.
    """

    def __init__(self, fn, name="tensor"):
        self.fn = fn
        self.name = name

    def __call__(self, xs, ys):
        return self.fn(xs, ys)

    @classmethod
    def from_scalar(cls, f, which="T"):
        if which not in _t.TENSOR_NAMES:
            raise ValueError("unknown tensor %r" % (which,))

        def fn(xs, ys):
            jet = _jets(f, xs, ys)
            return _t.build_tensor(which, jet), umbilic_tol(jet)
        return cls(fn, which)

    @classmethod
    def from_entries(cls, entries, name="tensor"):
        """``entries(xs, ys) -> (s11, s12, s22)``."""
        def fn(xs, ys):
            S = SymTensor2(*(np.broadcast_to(np.asarray(c, dtype=float), xs.shape)
                             for c in entries(xs, ys)))
            return S, 1e-12 * (1 + S.norm())
        return cls(fn, name)


class EigenLineField(LineField):
    """Eigen-direction field; ``which=0`` follows the larger eigenvalue."""

    def __init__(self, tensor: TensorField, which=0):
        self.tensor = tensor
        self.which = which
        self.name = "eigen%d(%s)" % (which + 1, tensor.name)

    def evaluate(self, xs, ys):
        xs, ys = _flat(xs, ys)
        S, tol = self.tensor(xs, ys)
        m = S.stacked().reshape(-1, 2, 2)
        w, V = np.linalg.eigh(m)
        gap = w[:, 1] - w[:, 0]
        bad = gap <= np.broadcast_to(tol, gap.shape)
        if bad.any():
            _fail(bad, xs, ys, "ScalarPoint")
        col = 1 - self.which
        return V[:, :, col].copy(), gap


class NullLineField(LineField):
    """Null directions of S labelled by eigen-frame (``sign`` = -1 or +1).

    The labelling is continuous wherever det S < 0 but may jump where the two
    null directions merge (quasi-umbilics); see `SmoothNullFlow` for a
    labelling that passes smoothly through merges.
    """

    def __init__(self, tensor: TensorField, sign=-1):
        self.tensor = tensor
        self.sign = sign
        self.name = "null%s(%s)" % ("-" if sign < 0 else "+", tensor.name)

    def _pair(self, xs, ys):
        S, tol = self.tensor(xs, ys)
        n = S.norm()
        if np.any(n <= tol):
            _fail(n <= tol, xs, ys, "Umbilic")
        bad = S.det > det_band(S, tol)
        if np.any(bad):
            _fail(bad, xs, ys, "NoRealPrincipal")
        minus, plus, _ = null_pair_arrays(S.s11, S.s12, S.s22)
        return minus.reshape(-1, 2), plus.reshape(-1, 2), np.ravel(n)

    def evaluate(self, xs, ys):
        xs, ys = _flat(xs, ys)
        minus, plus, n = self._pair(xs, ys)
        return (minus if self.sign < 0 else plus), n

    def candidates(self, xs, ys):
        xs, ys = _flat(xs, ys)
        minus, plus, _ = self._pair(xs, ys)
        return np.stack([minus, plus], axis=1)


# -- time-like null fields in the explicit (v1, v2) form -----------------------

def _ab(jet):
    return 2 * jet.xy, jet.xx + jet.yy


def _v_from_phi(a, b, phi):
    """The common direction of v1 = (-b+phi, a) and v2 = (-a, b+phi)."""
    v1 = np.stack([-b + phi, a], axis=-1)
    v2 = np.stack([-a, b + phi], axis=-1)
    n1 = np.linalg.norm(v1, axis=-1)
    n2 = np.linalg.norm(v2, axis=-1)
    v = np.where((n1 >= n2)[..., None], v1, v2)
    n = np.maximum(n1, n2)
    with np.errstate(invalid="ignore", divide="ignore"):
        return v / n[..., None], n


def _disc(jet):
    """(a, b, D, tol) with D = b^2 - a^2 clamped inside the tolerance band."""
    a, b = _ab(jet)
    tol = umbilic_tol(jet)
    D = b * b - a * a
    band = 4 * det_band(_t.t_matrix(jet), tol)
    D = np.where((D < 0) & (D >= -band), 0.0, D)
    return a, b, D, tol


def thmE_fields(jet):
    """(v1, v2, phi) on the branch phi = sgn(b) sqrt(b^2 - a^2), sgn(0) = +1.

    v1 and v2 are parallel (det = phi^2 - b^2 + a^2 = 0) and span one of the
    two null lines of T; they vanish together only at an umbilic.
    """
    a, b, D, tol = _disc(jet)
    T = _t.t_matrix(jet)
    if np.any(T.norm() <= tol):
        raise UmbilicPoint("umbilic at %r" % (jet.point,))
    if np.any(D < 0):
        raise ComplexPrincipal("b^2 - a^2 = %r < 0 at %r" % (
            float(np.min(b * b - a * a)), jet.point))
    phi = np.where(b >= 0, 1.0, -1.0) * np.sqrt(D)
    v1 = (-b + phi, a)
    v2 = (-a, b + phi)
    if np.ndim(phi) == 0:
        v1 = tuple(map(float, v1))
        v2 = tuple(map(float, v2))
        phi = float(phi)
    return v1, v2, phi


class _TimelikeNullBase(LineField):
    def __init__(self, f):
        self.f = f

    def _jet_data(self, xs, ys):
        jet = _jets(self.f, xs, ys)
        a, b, D, tol = _disc(jet)
        n = _t.t_matrix(jet).norm()
        if np.any(n <= tol):
            _fail(n <= tol, xs, ys, "Umbilic")
        if np.any(D < 0):
            _fail(D < 0, xs, ys, "NoRealPrincipal")
        return a, b, D, n

    def candidates(self, xs, ys):
        xs, ys = _flat(xs, ys)
        a, b, D, _ = self._jet_data(xs, ys)
        r = np.sqrt(D)
        d1, _ = _v_from_phi(a, b, r)
        d2, _ = _v_from_phi(a, b, -r)
        return np.stack([d1, d2], axis=1)


class ThmEField(_TimelikeNullBase):
    """The null line field on the pinned branch of `thmE_fields`."""
    name = "thmE"

    def evaluate(self, xs, ys):
        xs, ys = _flat(xs, ys)
        a, b, D, n = self._jet_data(xs, ys)
        phi = np.where(b >= 0, 1.0, -1.0) * np.sqrt(D)
        dirs, _ = _v_from_phi(a, b, phi)
        return dirs, n



# window half-width and difference order for the branch decision at zeros
_WIN = 7
_ORDER = 5


def _roughness(seq):
    return float(np.sum(np.diff(seq, _ORDER) ** 2))


def _continue_root(r, b):
    """Signs for r = sqrt(b^2 - a^2) making sigma * r smooth around a circle.

    A smooth function's zero can have any order, and the smooth square root
    changes sign exactly at the odd-order ones, so no fixed-order
    extrapolation can decide it.  At every small local minimum of r we
    compare "no flip" against a flip on either side of it and keep
    whichever sequence has the smallest high-order differences.
    Returns (phi, k0); phi is None when the signs fail to close up.
    """
    N = len(r)
    top = r.max()
    if top == 0:
        return np.zeros(N), 0
    k0 = int(np.argmax(r > 1e-3 * top))
    rr = np.roll(r, -k0)
    sig = np.ones(N)
    small = rr < 0.05 * top
    is_min = (rr <= np.roll(rr, 1)) & (rr <= np.roll(rr, -1)) & small
    is_min &= ~np.roll(is_min, 1)
    pos = np.arange(-_WIN, _WIN + 1)
    for e in np.flatnonzero(is_min):
        j = e + pos
        vals = rr[j % N]
        s = np.where(j < 0, 1.0, sig[np.clip(j, 0, N - 1)])
        best, choice = _roughness(s * vals), None
        for cut in (e, e + 1):
            cand = np.where(j >= cut, -s, s)
            score = _roughness(cand * vals)
            if score < best:
                best, choice = score, cut
        if choice is not None and choice < N:
            sig[choice:] *= -1
    if sig[-1] != sig[0] and rr[-1] > 0:
        return None, k0
    s0 = -1.0 if b[k0] >= 0 else 1.0
    return np.roll(s0 * sig * rr, k0), k0


class SmoothNullFlow(_TimelikeNullBase):
    """A time-like null field whose root phi is continued smoothly in angle.

    Around each circle about ``center`` the square root phi = +-sqrt(b^2-a^2)
    is followed on a uniform angular grid by extrapolation, so the field
    passes through quasi-umbilics (where the two null lines touch) instead
    of switching branches there.  The branch is fixed at the first grid
    angle (counterclockwise from the positive xi-axis) where the two lines
    are distinct, by phi = -sgn(b) sqrt(b^2-a^2) for ``which=1``; ``which=2``
    takes the other root throughout, i.e. the swapped field.
    """

    def __init__(self, f, center=(0.0, 0.0), which=1, grid=1024, cache=64):
        super().__init__(f)
        self.center = (float(center[0]), float(center[1]))
        self.which = which
        self.grid = grid
        self.name = "null%d" % which
        self._cache = OrderedDict()
        self._cache_size = cache

    def _sweep(self, radii):
        """Continued phi on the angular grid for each radius, shape (R, N)."""
        N = self.grid
        t = 2 * np.pi * np.arange(N) / N
        cx, cy = self.center
        X = cx + radii[:, None] * np.cos(t)[None, :]
        Y = cy + radii[:, None] * np.sin(t)[None, :]
        a, b, D, _ = self._jet_data(X.ravel(), Y.ravel())
        b, D = (np.reshape(q, X.shape) for q in (b, D))
        out = np.empty_like(D)
        for i in range(len(radii)):
            row, k0 = _continue_root(np.sqrt(D[i]), b[i])
            if row is None:
                ang = t[k0]
                raise FieldUndefined(
                    (cx + radii[i] * math.cos(ang), cy + radii[i] * math.sin(ang)),
                    "smooth null continuation does not close around the circle")
            out[i] = row
        return out

    def _phi_rows(self, radii):
        missing = [r for r in radii if r not in self._cache]
        if missing:
            arr = np.array(missing)
            rows = self._sweep(arr)
            for r, row in zip(missing, rows):
                self._cache[r] = row
                self._cache.move_to_end(r)
            while len(self._cache) > max(self._cache_size, len(radii)):
                self._cache.popitem(last=False)
        return np.stack([self._cache[r] for r in radii])

    def evaluate(self, xs, ys):
        xs, ys = _flat(xs, ys)
        a, b, D, n = self._jet_data(xs, ys)
        dx, dy = xs - self.center[0], ys - self.center[1]
        rad = np.hypot(dx, dy)
        if np.any(rad == 0):
            _fail(rad == 0, xs, ys, "continuation centre")
        key = np.round(rad, 12)
        uniq, inv = np.unique(key, return_inverse=True)
        rows = self._phi_rows([float(r) for r in uniq])
        N = self.grid
        pos = (np.arctan2(dy, dx) % (2 * np.pi)) / (2 * np.pi) * N
        i0 = np.floor(pos).astype(int) % N
        w = pos - np.floor(pos)
        guide = (1 - w) * rows[inv, i0] + w * rows[inv, (i0 + 1) % N]
        root = np.sqrt(D)
        phi = np.where(np.abs(guide - root) <= np.abs(guide + root), root, -root)
        if self.which == 2:
            phi = -phi
        dirs, _ = _v_from_phi(a, b, phi)
        return dirs, n


class PerpField(LineField):
    """The complementary curvature-line field.

    Space-like: rotation by 90 degrees (u, v) -> (-v, u).  Time-like: the
    swap (u, v) -> (v, u), which negates the index.
    """

    def __init__(self, base: LineField, kind):
        from .classify import reduction_of
        self.base = base
        self.kind = reduction_of(kind)
        self.name = "perp(%s)" % base.name

    def _map(self, d):
        if self.kind == "timelike":
            return d[..., ::-1].copy()
        return np.stack([-d[..., 1], d[..., 0]], axis=-1)

    def evaluate(self, xs, ys):
        dirs, s = self.base.evaluate(xs, ys)
        return self._map(dirs), s

    def candidates(self, xs, ys):
        return self._map(self.base.candidates(xs, ys))


def perp_flow(L: LineField, kind) -> LineField:
    return PerpField(L, kind)


@dataclass(frozen=True)
class Sector:
    """Directions from ``start`` to ``end`` degrees (counterclockwise) about
    the glue centre; ``start is None`` means "everything not yet claimed"."""
    field: LineField
    start: float = None
    end: float = None

    def contains(self, ang_deg):
        if self.start is None:
            return np.ones(np.shape(ang_deg), dtype=bool)
        width = (self.end - self.start) % 360 or 360
        return (ang_deg - self.start) % 360 <= width


class GluedField(LineField):
    def __init__(self, sectors, center=(0.0, 0.0), name="glued"):
        self.sectors = list(sectors)
        self.center = (float(center[0]), float(center[1]))
        self.name = name

    def _owner(self, xs, ys):
        ang = np.degrees(np.arctan2(ys - self.center[1], xs - self.center[0])) % 360
        owner = np.full(xs.shape, -1)
        for i, s in enumerate(self.sectors):
            owner = np.where((owner < 0) & s.contains(ang), i, owner)
        return owner

    def _dispatch(self, xs, ys, method):
        xs, ys = _flat(xs, ys)
        owner = self._owner(xs, ys)
        if np.any(owner < 0):
            _fail(owner < 0, xs, ys, "no glue piece covers this point")
        parts = {}
        for i in np.unique(owner):
            m = owner == i
            parts[i] = (m, getattr(self.sectors[i].field, method)(xs[m], ys[m]))
        return xs, owner, parts

    def evaluate(self, xs, ys):
        xs, owner, parts = self._dispatch(xs, ys, "evaluate")
        dirs = np.empty((len(xs), 2))
        strength = np.empty(len(xs))
        for m, (d, s) in parts.values():
            dirs[m] = d
            strength[m] = s
        return dirs, strength

    def candidates(self, xs, ys):
        xs, owner, parts = self._dispatch(xs, ys, "candidates")
        k = max(c.shape[1] for _, c in parts.values())
        out = np.empty((len(xs), k, 2))
        for m, c in parts.values():
            out[m] = np.concatenate([c, np.repeat(c[:, -1:], k - c.shape[1], 1)], 1)
        return out

    def check_continuity(self, radius, samples=1024, tol=1e-9):
        """Compare adjacent pieces along every boundary ray up to `radius`."""
        rs = radius * np.arange(1, samples + 1) / samples
        for i, s in enumerate(self.sectors):
            if s.start is None:
                continue
            for edge in (s.start, s.end):
                t = math.radians(edge)
                xs = self.center[0] + rs * math.cos(t)
                ys = self.center[1] + rs * math.sin(t)
                inside, _ = s.field.evaluate(xs, ys)
                # the neighbour is whoever owns the points just across the edge
                eps = 1e-7 if edge == s.end else -1e-7
                across = self._owner(self.center[0] + rs * math.cos(t + eps),
                                     self.center[1] + rs * math.sin(t + eps))
                for j in np.unique(across):
                    if j == i or j < 0:
                        continue
                    m = across == j
                    other, _ = self.sectors[j].field.evaluate(xs[m], ys[m])
                    # LineDir equality: |dot| >= 1 - tol
                    dots = np.abs(np.sum(inside[m] * other, axis=1))
                    if np.any(dots < 1 - tol):
                        k = int(np.argmin(dots))
                        raise DiscontinuousGlue(
                            (float(xs[m][k]), float(ys[m][k])),
                            float(math.acos(min(1.0, dots[k]))))


def glued_field(pieces, center=(0.0, 0.0), check_radius=None, samples=1024,
                name="glued"):
    """Glue line fields over angular sectors about `center`.

    `pieces` is a list of `Sector` (or (field, start, end) tuples).  The
    first matching sector wins; put a catch-all sector (start None) last.
    With `check_radius` the pieces must agree along the boundary rays.
    """
    sectors = [p if isinstance(p, Sector) else Sector(*p) for p in pieces]
    g = GluedField(sectors, center, name)
    if check_radius is not None:
        g.check_continuity(check_radius, samples)
    return g


def eigen_field(f, which=0, tensor="H"):
    return EigenLineField(TensorField.from_scalar(f, tensor), which)


def null_field(f, sign=-1, tensor="S"):
    return NullLineField(TensorField.from_scalar(f, tensor), sign)


def characteristic_field(tensor: TensorField):
    """The vector field (s11 - s22, 2 s12) as a callable for winding."""
    def F(xs, ys):
        S, _ = tensor(xs, ys)
        return S.s11 - S.s22, 2 * S.s12
    return F
