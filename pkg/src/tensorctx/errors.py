"""Exception hierarchy shared by every tensorctx module."""

from __future__ import annotations


class TensorCtxError(Exception):
    """Base class for all errors raised by tensorctx."""


class DimensionMismatch(TensorCtxError, ValueError):
    pass


class TypeMismatch(TensorCtxError, ValueError):
    """Two tensor operators (or contexts) do not share a type."""


class NotUnitary(TensorCtxError, ValueError):
    pass


class NotHermitian(TensorCtxError, ValueError):
    pass


class NotOrthonormal(TensorCtxError, ValueError):
    pass


class NotNormalized(TensorCtxError, ValueError):
    pass


class WrongCount(TensorCtxError, ValueError):
    pass


class ContextMismatch(TensorCtxError, ValueError):
    """Pairing operators taken from different multipartite contexts."""


class DecompositionError(TensorCtxError, RuntimeError):
    """SVD or eigendecomposition failed to converge (internal defect at these sizes)."""


class ParseError(TensorCtxError):
    """Malformed scenario file.

    ``line`` and ``column`` are 1-based and may be ``None`` when the problem
    is not tied to a particular location.
    """

    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        self.message = message
        self.line = line
        self.column = column
        where = f"{line}:{column}: " if line is not None else ""
        super().__init__(f"{where}{message}")


class ResolutionError(TensorCtxError):
    """A scenario refers to a label that was never defined."""
