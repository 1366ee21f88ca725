"""Exception hierarchy shared by all modules."""


class HspecError(Exception):
    pass


class MatrixValueError(HspecError, ValueError):
    pass


class NonSquare(MatrixValueError):
    pass


class NegativeEntry(MatrixValueError):
    def __init__(self, index, value):
        self.index = index  # 1-based (row, col)
        self.value = value
        super().__init__(f"negative entry {value!r} at {index}")


class NonFiniteEntry(MatrixValueError):
    def __init__(self, index, value):
        self.index = index
        self.value = value
        super().__init__(f"non-finite entry {value!r} at {index}")


class DimensionMismatch(MatrixValueError):
    pass


class LengthMismatch(HspecError, ValueError):
    pass


class NegativeExponent(HspecError, ValueError):
    pass


class EmptyList(HspecError, ValueError):
    pass


class WeightsNotConvex(HspecError, ValueError):
    pass


class WeightsTooSmall(HspecError, ValueError):
    pass


class ExponentDomain(HspecError, ValueError):
    pass


class OddM(HspecError, ValueError):
    pass


class MissingPermutation(HspecError, ValueError):
    pass


class DepthOverflow(HspecError, ArithmeticError):
    pass


class NotConverged(HspecError, ArithmeticError):
    """Raised only on request; normally a bracket comes back with converged=False."""

    def __init__(self, result):
        self.result = result
        super().__init__(
            f"spectral radius bracket [{result.lo!r}, {result.hi!r}] did not meet tolerance"
        )


class UnknownLaw(HspecError, KeyError):
    pass


class InputShapeMismatch(HspecError, ValueError):
    pass


class Unsatisfiable(HspecError):
    pass


class ParseError(HspecError, ValueError):
    def __init__(self, message, line=None):
        self.line = line
        where = f"line {line}: " if line is not None else ""
        super().__init__(where + message)
