"""Forward-mode second-order jets over the expression AST.

Every node carries its value, gradient and (symmetric) Hessian with respect
to (xi, eta).  All arithmetic is elementwise numpy, so the same code
evaluates one point or a whole circle of sample points at once.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import DomainError, NonSmoothPoint
from . import expr as E


@dataclass(frozen=True)
class Jet2:
    """Value, gradient and Hessian of a scalar field at `point`.

    Entries are floats for a single point, or equally shaped arrays when
    the field was evaluated on a batch of points.
    """
    value: object
    d1: tuple
    d2: tuple
    point: tuple = (0.0, 0.0)

    @property
    def x(self):
        return self.d1[0]

    @property
    def y(self):
        return self.d1[1]

    @property
    def xx(self):
        return self.d2[0]

    @property
    def xy(self):
        return self.d2[1]

    @property
    def yy(self):
        return self.d2[2]

    def d2_norm(self):
        xx, xy, yy = self.d2
        return np.sqrt(xx * xx + 2 * xy * xy + yy * yy)

    def take(self, i):
        """The single-point jet at batch index `i`."""
        pick = lambda a: float(np.asarray(a)[i])
        return Jet2(pick(self.value), tuple(map(pick, self.d1)),
                    tuple(map(pick, self.d2)), tuple(map(pick, self.point)))

    def __len__(self):
        return int(np.size(self.value))


class _J:
    """Mutable-free working jet: v, (x, y), (xx, xy, yy)."""
    __slots__ = ("v", "x", "y", "xx", "xy", "yy")

    def __init__(self, v, x, y, xx, xy, yy):
        self.v, self.x, self.y = v, x, y
        self.xx, self.xy, self.yy = xx, xy, yy

    @classmethod
    def const(cls, c, like):
        z = np.zeros_like(like)
        return cls(z + c, z, z, z, z, z)

    def __add__(self, o):
        return _J(self.v + o.v, self.x + o.x, self.y + o.y,
                  self.xx + o.xx, self.xy + o.xy, self.yy + o.yy)

    def __sub__(self, o):
        return _J(self.v - o.v, self.x - o.x, self.y - o.y,
                  self.xx - o.xx, self.xy - o.xy, self.yy - o.yy)

    def __neg__(self):
        return _J(-self.v, -self.x, -self.y, -self.xx, -self.xy, -self.yy)

    def __mul__(self, o):
        return _J(self.v * o.v,
                  self.x * o.v + self.v * o.x,
                  self.y * o.v + self.v * o.y,
                  self.xx * o.v + 2 * self.x * o.x + self.v * o.xx,
                  self.xy * o.v + self.x * o.y + self.y * o.x + self.v * o.xy,
                  self.yy * o.v + 2 * self.y * o.y + self.v * o.yy)

    def scale(self, c):
        return _J(c * self.v, c * self.x, c * self.y,
                  c * self.xx, c * self.xy, c * self.yy)

    def chain(self, g0, g1, g2):
        """Compose with a scalar function whose derivatives at self.v are g0, g1, g2."""
        return _J(g0, g1 * self.x, g1 * self.y,
                  g2 * self.x * self.x + g1 * self.xx,
                  g2 * self.x * self.y + g1 * self.xy,
                  g2 * self.y * self.y + g1 * self.yy)

    def ipow(self, n):
        result = None
        base = self
        while n:
            if n & 1:
                result = base if result is None else result * base
            n >>= 1
            if n:
                base = base * base
        return result


def _first_bad(mask, xs, ys):
    idx = int(np.flatnonzero(np.ravel(mask))[0])
    return (float(np.ravel(xs)[idx]), float(np.ravel(ys)[idx]))


class _Evaluator:
    def __init__(self, xs, ys):
        self.xs, self.ys = xs, ys
        zero = np.zeros_like(xs)
        one = zero + 1.0
        self.xi = _J(xs, one, zero, zero, zero, zero)
        self.eta = _J(ys, zero, one, zero, zero, zero)

    def fail(self, node, mask, cls=DomainError, detail=""):
        raise cls(E.pretty(node), _first_bad(mask, self.xs, self.ys), detail)

    def check(self, node, j):
        # non-finite parts always poison the sum, so one test covers the fast path
        if np.isfinite(j.v + j.x + j.y + j.xx + j.xy + j.yy).all():
            return j
        for part in (j.v, j.x, j.y, j.xx, j.xy, j.yy):
            bad = ~np.isfinite(part)
            if np.any(bad):
                self.fail(node, bad, detail="non-finite result")
        return j

    def ev(self, node):
        return self.check(node, self._ev(node))

    def _ev(self, node):
        if isinstance(node, E.Num):
            return _J.const(node.value, self.xs)
        if isinstance(node, E.Param):
            return _J.const(node.value, self.xs)
        if isinstance(node, E.Var):
            return self.xi if node.name == "xi" else self.eta
        if isinstance(node, E.Neg):
            return -self.ev(node.arg)
        if isinstance(node, E.BinOp):
            a, b = self.ev(node.left), self.ev(node.right)
            if node.op == "+":
                return a + b
            if node.op == "-":
                return a - b
            if node.op == "*":
                return a * b
            zero = b.v == 0
            if np.any(zero):
                self.fail(node, zero, detail="division by zero")
            inv = b.chain(1.0 / b.v, -1.0 / b.v ** 2, 2.0 / b.v ** 3)
            return a * inv
        if isinstance(node, E.Pow):
            return self.power(node)
        if isinstance(node, E.ZPow):
            return self.zpow(node)
        if isinstance(node, E.Call):
            return self.call(node)
        raise TypeError("not an expression node: %r" % (node,))

    def power(self, node):
        u = self.ev(node.base)
        p = node.exponent
        if float(p).is_integer():
            n = int(p)
            if n == 0:
                return _J.const(1.0, self.xs)
            r = u.ipow(abs(n))
            if n > 0:
                return r
            zero = r.v == 0
            if np.any(zero):
                self.fail(node, zero, detail="negative power of zero")
            return r.chain(1.0 / r.v, -1.0 / r.v ** 2, 2.0 / r.v ** 3)
        bad = u.v <= 0
        if np.any(bad):
            self.fail(node, bad, detail="non-integer power needs a positive base")
        return u.chain(u.v ** p, p * u.v ** (p - 1), p * (p - 1) * u.v ** (p - 2))

    def zpow(self, node):
        para = node.func in ("rejpow", "imjpow")
        re_, im = self.xi, self.eta
        for _ in range(node.n - 1):
            if para:
                re_, im = self.xi * re_ + self.eta * im, self.xi * im + self.eta * re_
            else:
                re_, im = self.xi * re_ - self.eta * im, self.xi * im + self.eta * re_
        return re_ if node.func in ("rezpow", "rejpow") else im

    def call(self, node):
        f = node.func
        if f == "atan2":
            return self.atan2(node)
        u = self.ev(node.args[0])
        v = u.v
        if f == "sin":
            s, c = np.sin(v), np.cos(v)
            return u.chain(s, c, -s)
        if f == "cos":
            s, c = np.sin(v), np.cos(v)
            return u.chain(c, -s, -c)
        if f == "tan":
            t = np.tan(v)
            sec2 = 1 + t * t
            return u.chain(t, sec2, 2 * t * sec2)
        if f == "sinh":
            return u.chain(np.sinh(v), np.cosh(v), np.sinh(v))
        if f == "cosh":
            return u.chain(np.cosh(v), np.sinh(v), np.cosh(v))
        if f == "tanh":
            t = np.tanh(v)
            s = 1 - t * t
            return u.chain(t, s, -2 * t * s)
        if f == "exp":
            e = np.exp(v)
            return u.chain(e, e, e)
        if f == "log":
            bad = v <= 0
            if np.any(bad):
                self.fail(node, bad, detail="log of a non-positive value")
            return u.chain(np.log(v), 1 / v, -1 / v ** 2)
        if f == "sqrt":
            bad = v <= 0
            if np.any(bad):
                self.fail(node, bad, detail="sqrt needs a positive argument")
            r = np.sqrt(v)
            return u.chain(r, 0.5 / r, -0.25 / (r * v))
        if f == "abs":
            bad = v == 0
            if np.any(bad):
                self.fail(node, bad, NonSmoothPoint, "abs has no 2-jet at 0")
            sg = np.sign(v)
            return u.chain(np.abs(v), sg, np.zeros_like(v))
        raise TypeError("unknown function %r" % f)

    def atan2(self, node):
        y, x = self.ev(node.args[0]), self.ev(node.args[1])
        r2 = x.v ** 2 + y.v ** 2
        bad = r2 == 0
        if np.any(bad):
            self.fail(node, bad, detail="atan2 at the origin of its arguments")
        # partials of atan2(y, x) in its two arguments
        ay, ax = x.v / r2, -y.v / r2
        ayy = -2 * x.v * y.v / r2 ** 2
        axx = -ayy
        axy = (y.v ** 2 - x.v ** 2) / r2 ** 2

        def mixed(p, q):
            return (ayy * getattr(y, p) * getattr(y, q)
                    + axx * getattr(x, p) * getattr(x, q)
                    + axy * (getattr(y, p) * getattr(x, q) + getattr(x, p) * getattr(y, q)))

        return _J(np.arctan2(y.v, x.v),
                  ay * y.x + ax * x.x,
                  ay * y.y + ax * x.y,
                  mixed("x", "x") + ay * y.xx + ax * x.xx,
                  mixed("x", "y") + ay * y.xy + ax * x.xy,
                  mixed("y", "y") + ay * y.yy + ax * x.yy)


def _as_arrays(point):
    xs = np.asarray(point[0], dtype=float)
    ys = np.asarray(point[1], dtype=float)
    xs, ys = np.broadcast_arrays(xs, ys)
    return np.array(xs, dtype=float), np.array(ys, dtype=float)


def eval_jet2(f, point) -> Jet2:
    """2-jet of the field `f` at `point` = (xi, eta).

    The coordinates may be scalars or equally shaped arrays.  Raises
    `DomainError` (or `NonSmoothPoint`) instead of returning non-finite
    entries.
    """
    xs, ys = _as_arrays(point)
    scalar = xs.ndim == 0
    with np.errstate(all="ignore"):
        j = _Evaluator(xs, ys).ev(f.ast)
    parts = [j.v, j.x, j.y, j.xx, j.xy, j.yy]
    parts = [np.broadcast_to(p, xs.shape) for p in parts]
    if scalar:
        parts = [float(p) for p in parts]
        pt = (float(xs), float(ys))
    else:
        parts = [np.array(p) for p in parts]
        pt = (xs, ys)
    v, x, y, xx, xy, yy = parts
    return Jet2(v, (x, y), (xx, xy, yy), pt)


def evaluate(f, point):
    """Value only; unlike `eval_jet2` it accepts kinks such as abs at 0."""
    xs, ys = _as_arrays(point)
    with np.errstate(all="ignore"):
        out = _value(f.ast, xs, ys)
    out = np.broadcast_to(out, xs.shape)
    bad = ~np.isfinite(out)
    if np.any(bad):
        raise DomainError(f.pretty(), _first_bad(bad, xs, ys), "non-finite value")
    return float(out) if xs.ndim == 0 else np.array(out)


_VALUE_FUNCS = {
    "sin": np.sin, "cos": np.cos, "tan": np.tan, "sinh": np.sinh,
    "cosh": np.cosh, "tanh": np.tanh, "exp": np.exp, "abs": np.abs,
}


def _value(node, xs, ys):
    if isinstance(node, (E.Num, E.Param)):
        return np.zeros_like(xs) + node.value
    if isinstance(node, E.Var):
        return xs if node.name == "xi" else ys
    if isinstance(node, E.Neg):
        return -_value(node.arg, xs, ys)
    if isinstance(node, E.BinOp):
        a, b = _value(node.left, xs, ys), _value(node.right, xs, ys)
        return {"+": np.add, "-": np.subtract,
                "*": np.multiply, "/": np.divide}[node.op](a, b)
    if isinstance(node, E.Pow):
        b = _value(node.base, xs, ys)
        if not float(node.exponent).is_integer() and np.any(b <= 0):
            raise DomainError(E.pretty(node), _first_bad(b <= 0, xs, ys),
                              "non-integer power needs a positive base")
        return b ** node.exponent
    if isinstance(node, E.ZPow):
        w = (xs + 1j * ys) ** node.n if node.func in ("rezpow", "imzpow") else None
        if w is not None:
            return w.real if node.func == "rezpow" else w.imag
        re_, im = xs, ys
        for _ in range(node.n - 1):
            re_, im = xs * re_ + ys * im, xs * im + ys * re_
        return re_ if node.func == "rejpow" else im
    if isinstance(node, E.Call):
        args = [_value(a, xs, ys) for a in node.args]
        if node.func == "atan2":
            return np.arctan2(args[0], args[1])
        if node.func in ("log", "sqrt"):
            bad = args[0] <= 0 if node.func == "log" else args[0] < 0
            if np.any(bad):
                raise DomainError(E.pretty(node), _first_bad(bad, xs, ys))
            return np.log(args[0]) if node.func == "log" else np.sqrt(args[0])
        return _VALUE_FUNCS[node.func](args[0])
    raise TypeError("not an expression node: %r" % (node,))
