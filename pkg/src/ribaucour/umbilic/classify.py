"""Point classification for the reduced curvature-line equation."""

from __future__ import annotations

import enum

import numpy as np

from ..errors import NoNullDirection
from .directions import null_directions
from . import tensors as _t
from .tensors import SymTensor2


class PointType(str, enum.Enum):
    UMBILIC = "Umbilic"
    QUASI_UMBILIC = "QuasiUmbilic"
    REGULAR = "RegularTwoDirections"
    NO_REAL_PRINCIPAL = "NoRealPrincipal"


def reduction_of(kind) -> str:
    """'timelike' or 'spacelike'; Euclidean kinds behave like space-like ones."""
    name = getattr(kind, "value", kind)
    return "timelike" if "imelike" in str(name) else "spacelike"


def umbilic_tol(jet):
    return 1e-10 * (1 + jet.d2_norm())


def det_band(S, tol):
    """Half-width of the "det = 0" band: tol^2, widened to the rounding floor
    of the products in s11 s22 - s12^2."""
    floor = 64 * np.finfo(float).eps * (np.abs(S.s11 * S.s22) + S.s12 * S.s12)
    return np.maximum(tol * tol, floor)


def _codes(jet, kind):
    tol = umbilic_tol(jet)
    if reduction_of(kind) == "spacelike":
        n = _t.s_matrix(jet).norm()
        return np.where(n <= tol, 0, 2), n, tol
    T = _t.t_matrix(jet)
    n, det = T.norm(), T.det
    tol2 = det_band(T, tol)
    code = np.select([n <= tol, np.abs(det) <= tol2, det > tol2], [0, 1, 3], 2)
    return code, n, tol


_BY_CODE = (PointType.UMBILIC, PointType.QUASI_UMBILIC, PointType.REGULAR,
            PointType.NO_REAL_PRINCIPAL)


def classify_point(jet, kind) -> PointType:
    code, _, _ = _codes(jet, kind)
    return _BY_CODE[int(code)]


def classify_batch(jet, kind) -> np.ndarray:
    """Vectorized `classify_point`; an object array of `PointType`."""
    code, _, _ = _codes(jet, kind)
    out = np.empty(np.shape(code), dtype=object)
    for c, t in enumerate(_BY_CODE):
        out[code == c] = t
    return out


def type_mask(types, t) -> np.ndarray:
    """Boolean mask of entries of a `classify_batch` result equal to `t`.

    Plain `==` against an object array of str-enums compares as strings of
    a different dtype and silently yields all False, hence this helper.
    """
    arr = np.asarray(types, dtype=object)
    return np.fromiter((c is t for c in arr.ravel()), bool, arr.size).reshape(arr.shape)


def tct_check(jet) -> float:
    """Largest |(E2 H) v x v| over the null directions v of T at `jet`.

    Null directions of the time-like tensor are eigenvectors of E2 H with
    E2 = diag(1, -1); the residual should be at rounding level.
    """
    T = _t.t_matrix(jet)
    nulls = null_directions(T)
    if not isinstance(nulls, tuple) or not nulls:
        raise NoNullDirection("T has no isolated null direction at %r" % (jet.point,))
    E = _t.checked_e2h(jet)
    scale = max(1.0, float(np.abs(E).max()))
    worst = 0.0
    for d in nulls:
        u = np.array(d.u)
        w = E @ u
        worst = max(worst, abs(w[0] * u[1] - w[1] * u[0]) / scale)
    return worst


def principal_tensor(jet, kind) -> SymTensor2:
    """The tensor whose null directions are the curvature directions."""
    return _t.t_matrix(jet) if reduction_of(kind) == "timelike" else _t.s_matrix(jet)
