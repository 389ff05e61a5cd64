"""Symmetric 2x2 tensors built from the Hessian of a generating function."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class SymTensor2:
    """s11 dx^2 + 2 s12 dx dy + s22 dy^2; entries may be arrays (batched)."""
    s11: object
    s12: object
    s22: object

    @property
    def trace(self):
        return self.s11 + self.s22

    @property
    def det(self):
        return self.s11 * self.s22 - self.s12 * self.s12

    def norm(self):
        """Frobenius norm."""
        return np.sqrt(self.s11 ** 2 + 2 * self.s12 ** 2 + self.s22 ** 2)

    def matrix(self):
        return np.array([[self.s11, self.s12], [self.s12, self.s22]], dtype=float)

    def stacked(self):
        """Batched (..., 2, 2) array."""
        m = np.array([[self.s11, self.s12], [self.s12, self.s22]], dtype=float)
        return np.moveaxis(m, (0, 1), (-2, -1))

    def scaled(self, c):
        return SymTensor2(c * self.s11, c * self.s12, c * self.s22)

    def quad(self, u, v):
        return self.s11 * u * u + 2 * self.s12 * u * v + self.s22 * v * v

    def deviator_norm(self):
        """Distance from the nearest scalar tensor."""
        half = 0.5 * (self.s11 - self.s22)
        return np.sqrt(2 * half * half + 2 * self.s12 * self.s12)

    def take(self, i):
        return SymTensor2(*(float(np.ravel(c)[i]) for c in (self.s11, self.s12, self.s22)))


def s_matrix(jet) -> SymTensor2:
    """Traceless tensor of the space-like reduction."""
    a, c, b = jet.d2
    return SymTensor2(c, 0.5 * (b - a), -c)


def t_matrix(jet) -> SymTensor2:
    """Equal-diagonal tensor of the time-like reduction."""
    a, c, b = jet.d2
    return SymTensor2(c, 0.5 * (b + a), c)


def hessian_matrix(jet) -> SymTensor2:
    a, c, b = jet.d2
    return SymTensor2(a, c, b)


def characteristic_vector(S: SymTensor2):
    """(s11 - s22, 2 s12); vanishes exactly at scalar points."""
    return (S.s11 - S.s22, 2 * S.s12)


def checked_e2h(jet):
    """E2 H_mu with E2 = diag(1, -1), as a (non-symmetric) 2x2 array."""
    a, c, b = jet.d2
    return np.array([[a, c], [-c, -b]], dtype=float)


TENSOR_NAMES = {"S": "s_matrix", "T": "t_matrix", "H": "hessian_matrix"}


def build_tensor(which, jet) -> SymTensor2:
    """Look the builder up at call time so every consumer sees the same one."""
    return globals()[TENSOR_NAMES[which]](jet)
