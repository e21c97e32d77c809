"""Exception types raised across the package."""


class FlyEmbedError(Exception):
    """Base class for all package errors."""


class EmptyMatrix(FlyEmbedError, ValueError):
    pass


class NonFiniteValue(FlyEmbedError, ValueError):
    def __init__(self, row: int, col: int):
        super().__init__(f"non-finite value at row {row}, column {col}")
        self.row = row
        self.col = col


class ZeroMeanColumn(FlyEmbedError, ValueError):
    def __init__(self, j: int):
        super().__init__(f"column {j} has zero mean after the shift step")
        self.j = j


class ZeroNormVector(FlyEmbedError, ValueError):
    def __init__(self, j: int | None = None):
        msg = "zero-norm vector" if j is None else f"vector {j} has zero norm"
        super().__init__(msg)
        self.j = j


class DimensionMismatch(FlyEmbedError, ValueError):
    pass


class InvalidRowWeight(FlyEmbedError, ValueError):
    pass


class InvalidColWeight(FlyEmbedError, ValueError):
    pass


class BadK(FlyEmbedError, ValueError):
    pass


class BadBlockIndex(FlyEmbedError, ValueError):
    pass


class BadId(FlyEmbedError, IndexError):
    pass


class TruncatedRecord(FlyEmbedError, ValueError):
    pass


class InconsistentDim(FlyEmbedError, ValueError):
    pass


class IoError(FlyEmbedError, OSError):
    pass


class BadMagic(FlyEmbedError, ValueError):
    pass


class TruncatedFile(FlyEmbedError, ValueError):
    pass


class ParseError(FlyEmbedError, ValueError):
    def __init__(self, line: int, detail: str = ""):
        super().__init__(f"line {line}: {detail}" if detail else f"line {line}")
        self.line = line


class SubsetTooLarge(FlyEmbedError, ValueError):
    pass


class InvalidSpec(FlyEmbedError, ValueError):
    pass


class SchemaViolation(FlyEmbedError, ValueError):
    pass
