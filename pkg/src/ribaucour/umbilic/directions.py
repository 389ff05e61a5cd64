"""Unoriented directions, half-integers, and eigen/null directions of tensors."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from ..errors import ScalarPoint
from .tensors import SymTensor2


@dataclass(frozen=True, eq=False)
class LineDir:
    """A point of the projective line: u and -u are the same direction."""
    u: tuple

    @classmethod
    def of(cls, x, y):
        n = math.hypot(x, y)
        if not n > 0:
            raise ValueError("zero vector has no direction")
        return cls((x / n, y / n))

    @classmethod
    def at_angle(cls, theta):
        return cls((math.cos(theta), math.sin(theta)))

    @property
    def angle(self):
        """Representative angle in [0, pi)."""
        return math.atan2(self.u[1], self.u[0]) % math.pi

    def dot(self, other):
        return self.u[0] * other.u[0] + self.u[1] * other.u[1]

    def same_as(self, other, eps=1e-9):
        return abs(self.dot(other)) >= 1 - eps

    def __eq__(self, other):
        if not isinstance(other, LineDir):
            return NotImplemented
        return self.same_as(other)

    __hash__ = None

    def rotated(self, angle):
        c, s = math.cos(angle), math.sin(angle)
        x, y = self.u
        return LineDir((c * x - s * y, s * x + c * y))

    def __repr__(self):
        return "LineDir(%.6f, %.6f)" % self.u


@dataclass(frozen=True, order=True)
class HalfInt:
    """An element of (1/2)Z stored as the integer `twice`."""
    twice: int

    @classmethod
    def of(cls, value):
        f = Fraction(value)
        if (2 * f).denominator != 1:
            raise ValueError("%r is not a half-integer" % (value,))
        return cls(int(2 * f))

    def as_fraction(self):
        return Fraction(self.twice, 2)

    def __float__(self):
        return self.twice / 2

    def __neg__(self):
        return HalfInt(-self.twice)

    def __add__(self, other):
        return HalfInt(self.twice + HalfInt.of(other).twice) if not isinstance(
            other, HalfInt) else HalfInt(self.twice + other.twice)

    def __eq__(self, other):
        if isinstance(other, HalfInt):
            return self.twice == other.twice
        if isinstance(other, (int, Fraction)):
            return Fraction(self.twice, 2) == other
        if isinstance(other, float):
            return self.twice == 2 * other
        return NotImplemented

    def __hash__(self):
        return hash(Fraction(self.twice, 2))

    def to_json(self):
        return {"num": self.twice, "den": 2}

    def __str__(self):
        if self.twice % 2 == 0:
            return str(self.twice // 2)
        return "%d/2" % self.twice


class _EverywhereNull:
    """Marker: the zero tensor, for which every direction is null."""

    def __repr__(self):
        return "EVERYWHERE_NULL"

    def __bool__(self):
        return True


EVERYWHERE_NULL = _EverywhereNull()


def _eig_sorted(m):
    w, V = np.linalg.eigh(m)
    # eigh sorts ascending; put the larger eigenvalue first
    return w[..., ::-1], V[..., :, ::-1]


def eigen_directions(S: SymTensor2):
    """(direction of the larger eigenvalue, the orthogonal one)."""
    if S.deviator_norm() <= 1e-12 * (1 + S.norm()):
        raise ScalarPoint("tensor is scalar: %r" % (S,))
    _, V = _eig_sorted(S.matrix())
    e1 = LineDir.of(V[0, 0], V[1, 0])
    return e1, LineDir((-e1.u[1], e1.u[0]))


def null_pair_arrays(s11, s12, s22):
    """Batched null vectors (minus, plus) and a validity mask.

    With e1 the unit eigenvector of the larger eigenvalue l1 >= 0 >= l2 and
    e2 its 90-degree rotation, the null vectors are sqrt(-l2) e1 -+ sqrt(l1) e2.
    The labelling does not depend on the sign chosen for e1 and varies
    continuously wherever det < 0.
    """
    m = SymTensor2(s11, s12, s22).stacked()
    w, V = _eig_sorted(m)
    l1, l2 = w[..., 0], w[..., 1]
    e1 = V[..., :, 0]
    e2 = np.stack([-e1[..., 1], e1[..., 0]], axis=-1)
    scale = np.abs(w).max(axis=-1)
    valid = (l1 >= -1e-12 * scale) & (l2 <= 1e-12 * scale) & (scale > 0)
    a = np.sqrt(np.clip(-l2, 0, None))[..., None]
    b = np.sqrt(np.clip(l1, 0, None))[..., None]
    minus = a * e1 - b * e2
    plus = a * e1 + b * e2
    for v in (minus, plus):
        n = np.linalg.norm(v, axis=-1, keepdims=True)
        np.divide(v, n, out=v, where=n > 0)
    return minus, plus, valid


def null_directions(S: SymTensor2):
    """Null directions of S: v with S(v, v) = 0.

    Returns a tuple of 0, 1 or 2 `LineDir` (two ordered as (minus, plus), see
    `null_pair_arrays`), or `EVERYWHERE_NULL` for the zero tensor.
    """
    n = float(S.norm())
    if n == 0:
        return EVERYWHERE_NULL
    det = float(S.det)
    band = 1e-12 * n * n
    if det > band:
        return ()
    if det >= -band:
        w, V = np.linalg.eigh(S.matrix())
        i = int(np.argmin(np.abs(w)))
        return (LineDir.of(V[0, i], V[1, i]),)
    minus, plus, _ = null_pair_arrays(float(S.s11), float(S.s12), float(S.s22))
    return LineDir(tuple(map(float, minus))), LineDir(tuple(map(float, plus)))
