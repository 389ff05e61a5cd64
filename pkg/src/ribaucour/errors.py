"""Exception hierarchy.

Two families matter to callers: `UsageError` (bad input, exit code 2 in the
CLI) and `NumericalError` (a computation that cannot be completed, exit
code 3).
"""


class RibaucourError(Exception):
    """Base class for every error raised by this package."""


class UsageError(RibaucourError, ValueError):
    pass


class NumericalError(RibaucourError, ArithmeticError):
    pass


# -- expression language ---------------------------------------------------

class ExprSyntaxError(UsageError):
    """Malformed expression source.

    Carries the character offset of the offending token and the set of
    tokens that would have been accepted there.
    """

    def __init__(self, offset, expected, found=None, source=None):
        self.offset = offset
        self.expected = tuple(sorted(set(expected)))
        self.found = found
        self.source = source
        what = "end of input" if found is None else repr(found)
        msg = "at offset %d: expected one of %s, got %s" % (
            offset, ", ".join(self.expected), what)
        super().__init__(msg)


class UnboundParameter(UsageError):
    def __init__(self, name):
        self.name = name
        super().__init__("parameter %r is referenced but not bound" % name)


class DomainError(NumericalError):
    """A node was evaluated outside its natural domain."""

    def __init__(self, node, point, detail=""):
        self.node = node
        self.point = point
        text = "%s outside its domain at %s" % (node, _fmt_point(point))
        if detail:
            text += " (%s)" % detail
        super().__init__(text)


class NonSmoothPoint(DomainError):
    """The 2-jet does not exist (e.g. abs at its kink)."""


# -- surfaces ----------------------------------------------------------------

class DegenerateNormal(NumericalError):
    pass


class DegenerateMetric(NumericalError):
    pass


class CausalityViolation(NumericalError):
    """The graph point lies on the wrong causal part of the surface."""

    def __init__(self, point, detail=""):
        self.point = point
        super().__init__("causal character violated at %s%s" % (
            _fmt_point(point), ": " + detail if detail else ""))


class NoConvergence(NumericalError):
    pass


# -- tensors, directions, line fields ----------------------------------------

class NoNullDirection(NumericalError):
    pass


class ScalarPoint(NumericalError):
    pass


class ComplexPrincipal(NumericalError):
    pass


class UmbilicPoint(NumericalError):
    pass


class FieldUndefined(NumericalError):
    """A line field has no value at a point."""

    def __init__(self, point, reason):
        self.point = point
        self.reason = reason
        super().__init__("line field undefined at %s: %s" % (
            _fmt_point(point), reason))


class DiscontinuousGlue(NumericalError):
    def __init__(self, point, mismatch):
        self.point = point
        self.mismatch = mismatch
        super().__init__("glued pieces disagree at %s (angle mismatch %.3g rad)"
                         % (_fmt_point(point), mismatch))


# -- winding numbers -----------------------------------------------------------

class WindingError(NumericalError):
    """Base for failures of the circle-sampling index computation.

    ``report`` holds whatever margins were measured before giving up.
    """

    def __init__(self, message, report=None):
        self.report = report
        super().__init__(message)


class VanishingOnCircle(WindingError):
    pass


class NonConvergentSampling(WindingError):
    pass


class UndefinedOnCircle(WindingError):
    def __init__(self, message, point=None, cause=None, report=None):
        self.point = point
        self.cause = cause
        super().__init__(message, report)


# -- flowtrace -------------------------------------------------------------------

class SeedUndefined(NumericalError):
    pass


class EmptyMesh(NumericalError):
    pass


def _fmt_point(point):
    try:
        return "(" + ", ".join("%.6g" % float(c) for c in point) + ")"
    except (TypeError, ValueError):
        return str(point)
