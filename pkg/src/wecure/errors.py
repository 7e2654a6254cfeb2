"""Exception hierarchy shared by all modules."""


class WecureError(Exception):
    """Base class for errors raised by this package."""


class InvalidArgumentError(WecureError, ValueError):
    pass


class DegenerateBandwidthError(WecureError, ValueError):
    """A vertex has zero local bandwidth because of duplicate points."""

    def __init__(self, vertex, message=None):
        self.vertex = int(vertex)
        super().__init__(message or
                         f"vertex {self.vertex}: bandwidth is zero "
                         f"(its k-th nearest neighbor is a duplicate point)")


class SingularSystemError(WecureError, ArithmeticError):
    """The interpolation system has no unique solution."""

    def __init__(self, message, vertex=None):
        self.vertex = vertex
        super().__init__(message)


class NonConvergenceError(WecureError, ArithmeticError):
    """Conjugate gradient did not reach the requested tolerance."""

    def __init__(self, residual, iterations, message=None):
        self.residual = float(residual)
        self.iterations = int(iterations)
        super().__init__(message or
                         f"CG did not converge in {self.iterations} iterations "
                         f"(relative residual {self.residual:.3e})")


class ParseError(WecureError, ValueError):
    """Malformed input file. ``offset`` is a byte offset or a line number."""

    def __init__(self, message, offset=None):
        self.offset = offset
        super().__init__(message)


class UnsupportedFormatError(WecureError, ValueError):
    pass
