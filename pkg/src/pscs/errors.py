"""Exception types raised across the package."""


class PSCSError(Exception):
    """Base class for all errors raised by pscs."""


# core
class ZeroColumn(PSCSError, ValueError):
    pass


class TooFewColumns(PSCSError, ValueError):
    pass


class DimensionMismatch(PSCSError, ValueError):
    pass


class IndexOutOfRange(PSCSError, IndexError):
    pass


# ric
class BadOrder(PSCSError, ValueError):
    pass


class CapExceeded(PSCSError):
    """Exhaustive enumeration would visit more subsets than allowed."""

    def __init__(self, required, cap, order=None):
        self.required = required
        self.cap = cap
        self.order = order
        what = f" for order {order}" if order is not None else ""
        super().__init__(
            f"exact enumeration{what} needs {required} subsets, cap is {cap}"
        )


# conditions
class NegativeConstant(PSCSError, ValueError):
    pass


class DeltaKTooLarge(PSCSError, ValueError):
    pass


class MissingConstant(PSCSError, KeyError):
    pass


class BadDecomposition(PSCSError, ValueError):
    pass


class EmptySupportUnion(PSCSError, ValueError):
    pass


# solvers
class Inconsistent(PSCSError, ValueError):
    """No x satisfies Ax = y to the residual tolerance."""


class TooLarge(PSCSError, ValueError):
    pass


class RankDeficient(PSCSError, ValueError):
    pass


class DegenerateDenominator(PSCSError, ValueError):
    pass


class Unbounded(PSCSError):
    pass


# harness
class InfeasibleSizes(PSCSError, ValueError):
    pass


class MalformedFile(PSCSError, ValueError):
    def __init__(self, message, line=None, path=None):
        self.line = line
        self.path = path
        where = ""
        if path is not None:
            where += f"{path}:"
        if line is not None:
            where += f"{line}:"
        super().__init__(f"{where} {message}" if where else message)
