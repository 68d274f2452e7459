"""Exception hierarchy.

Every error raised on purpose by the package derives from :class:`TangentaError`
so the CLI can map it onto exit code 3 and a JSON payload on stderr.
"""

from __future__ import annotations


class TangentaError(Exception):
    kind = "error"

    def to_dict(self) -> dict:
        return {"error": self.kind, "message": str(self)}


class ParseError(TangentaError, ValueError):
    kind = "syntax"

    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} at offset {offset}")
        self.offset = offset

    def to_dict(self) -> dict:
        d = super().to_dict()
        d["offset"] = self.offset
        return d


class UnknownIdentifierError(ParseError):
    kind = "unknown-identifier"


class DomainError(TangentaError, ValueError):
    """Evaluation left the real domain of a node (ln of x <= 0, 1/0, sqrt(-1), ...)."""

    kind = "domain"

    def __init__(self, message: str, node=None):
        super().__init__(message)
        self.node = node

    def to_dict(self) -> dict:
        d = super().to_dict()
        if self.node is not None:
            d["node"] = str(self.node)
        return d


class UnboundVariableError(TangentaError, KeyError):
    kind = "unbound-variable"

    def __str__(self):
        return Exception.__str__(self)


class NotPolynomialError(TangentaError, ValueError):
    kind = "not-polynomial"


class NotOnCurveError(TangentaError, ValueError):
    kind = "not-on-curve"


class VerticalTangentError(TangentaError, ArithmeticError):
    kind = "vertical-tangent"


class OutOfDomainError(TangentaError, ValueError):
    kind = "out-of-domain"


class DerivativeUndefinedError(TangentaError, ArithmeticError):
    kind = "derivative-undefined"


class ZeroSlopeError(TangentaError, ArithmeticError):
    """The slope vanishes, so the subtangent is infinite."""

    kind = "zero-slope"


class PreconditionError(TangentaError, ValueError):
    kind = "precondition"


class MonotonicityError(PreconditionError):
    kind = "not-monotone"


class ZeroOrdinateError(PreconditionError):
    kind = "zero-ordinate"


class GridEdgeError(PreconditionError):
    kind = "grid-edge"


class IterationCapError(TangentaError, RuntimeError):
    kind = "iteration-cap"


class InfeasibleCamError(TangentaError, ValueError):
    """The string cannot reach the pen: U - ET(x) < x somewhere, or ET < 0.

    ``trace`` holds the states recorded before the violation when the problem
    was discovered mid-run.
    """

    kind = "infeasible-cam"

    def __init__(self, message: str, trace=None):
        super().__init__(message)
        self.trace = trace


class SimulationAccuracyError(TangentaError, RuntimeError):
    kind = "accuracy"

    def __init__(self, message: str, trace=None):
        super().__init__(message)
        self.trace = trace


class FigureGeometryError(TangentaError, AssertionError):
    kind = "figure-geometry"
