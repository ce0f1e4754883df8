"""Bipartite tensor product operators as explicit values.

Every tensor operator of type ``C^d1 x C^d2 -> C^D`` (``D = d1*d2``) is the
canonical Kronecker map followed by a unitary *twist* ``W`` on the target:
``apply(x, y) = W @ kron(x, y)``.  Factor spaces keep their standard bases;
only the target basis varies between operators of one type.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, NotOrthonormal, TypeMismatch, WrongCount
from .numerics import (
    RECONSTRUCTION_TOL,
    UNITARY_TOL,
    as_matrix,
    as_vector,
    dagger,
    kron,
    require_unitary,
)


@dataclass(frozen=True)
class TensorType:
    """The type ``H1 x H2 -> H`` with ``dim H = d1 * d2``."""

    d1: int
    d2: int

    def __post_init__(self):
        for name in ("d1", "d2"):
            val = getattr(self, name)
            if not isinstance(val, (int, np.integer)) or val < 1:
                raise ValueError(f"{name} must be a positive integer, got {val!r}")

    @property
    def D(self) -> int:
        return self.d1 * self.d2

    def __str__(self) -> str:
        return f"C^{self.d1} x C^{self.d2} -> C^{self.D}"


@dataclass(frozen=True, eq=False)
class TensorProductOperator:
    ttype: TensorType
    twist: np.ndarray
    label: str = ""

    def __post_init__(self):
        w = require_unitary(self.twist, self.ttype.D, name=f"twist of {self.label or 'tensor operator'}")
        object.__setattr__(self, "twist", w)

    def apply(self, x, y) -> np.ndarray:
        """``x (x)_t y``: the image of the pair under this operator."""
        x = as_vector(x, "left factor")
        y = as_vector(y, "right factor")
        if x.size != self.ttype.d1 or y.size != self.ttype.d2:
            raise DimensionMismatch(
                f"{self.label or 'operator'} has type {self.ttype}; got factors of dims {x.size} and {y.size}"
            )
        return self.twist @ kron(x, y)

    __call__ = apply

    def lift(self, left, right) -> np.ndarray:
        """The operator ``left (x)_t right = W kron(left, right) W^dag`` on the target."""
        a = as_matrix(left, "left factor")
        b = as_matrix(right, "right factor")
        if a.shape != (self.ttype.d1,) * 2 or b.shape != (self.ttype.d2,) * 2:
            raise DimensionMismatch(
                f"{self.label or 'operator'} has type {self.ttype}; got factor operators {a.shape} and {b.shape}"
            )
        return self.twist @ kron(a, b) @ dagger(self.twist)

    def product_basis(self) -> np.ndarray:
        """Columns are ``apply(e_i, f_j)`` in lexicographic order (the twist itself)."""
        return self.twist.copy()

    def same_as(self, other: TensorProductOperator, tol: float = RECONSTRUCTION_TOL) -> bool:
        return self.ttype == other.ttype and float(np.max(np.abs(self.twist - other.twist))) <= tol

    def __repr__(self) -> str:
        return f"TensorProductOperator({self.label!r}, {self.ttype})"


def canonical(d1: int, d2: int, label: str = "") -> TensorProductOperator:
    return TensorProductOperator(TensorType(d1, d2), np.eye(d1 * d2, dtype=np.complex128), label or f"kron{d1}x{d2}")


def from_twist(t: TensorProductOperator, u, label: str = "") -> TensorProductOperator:
    """The operator ``u o t`` of the same type."""
    u = require_unitary(u, t.ttype.D, name="twist factor")
    return TensorProductOperator(t.ttype, u @ t.twist, label)


def from_basis_images(ttype: TensorType, images, label: str = "", tol: float = UNITARY_TOL) -> TensorProductOperator:
    """Build the operator sending ``(e_i, f_j)`` to ``images[i*d2 + j]``.

    Raises:
        WrongCount: if there are not ``d1*d2`` images.
        NotOrthonormal: if the images are not an orthonormal list in C^D.
    """
    images = list(images)
    if len(images) != ttype.D:
        raise WrongCount(f"type {ttype} needs {ttype.D} basis images, got {len(images)}")
    cols = [as_vector(v, f"image {k}") for k, v in enumerate(images)]
    for k, c in enumerate(cols):
        if c.size != ttype.D:
            raise DimensionMismatch(f"image {k} has dim {c.size}, expected {ttype.D}")
    w = np.stack(cols, axis=1)
    gram_dev = float(np.max(np.abs(dagger(w) @ w - np.eye(ttype.D))))
    if gram_dev > tol:
        raise NotOrthonormal(f"basis images are not orthonormal (max Gram deviation {gram_dev:.3e})")
    return TensorProductOperator(ttype, w, label)


def relating_unitary(a: TensorProductOperator, b: TensorProductOperator) -> np.ndarray:
    """The unique unitary ``W`` with ``b = W o a``."""
    if a.ttype != b.ttype:
        raise TypeMismatch(f"cannot relate operators of types {a.ttype} and {b.ttype}")
    return b.twist @ dagger(a.twist)


@dataclass(frozen=True)
class AxiomReport:
    label: str
    trials: int
    bilinearity_residual: float
    norm_residual: float
    tolerance: float

    @property
    def residual(self) -> float:
        return max(self.bilinearity_residual, self.norm_residual)

    @property
    def passed(self) -> bool:
        return self.residual <= self.tolerance


def _crandn(rng: np.random.Generator, *shape: int) -> np.ndarray:
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2)


def verify_axioms(
    t: TensorProductOperator, trials: int = 100, seed: int = 0, tol: float = RECONSTRUCTION_TOL
) -> AxiomReport:
    """Randomized check of bilinearity in each slot and norm preservation."""
    rng = np.random.default_rng(seed)
    d1, d2 = t.ttype.d1, t.ttype.d2
    bil = 0.0
    nrm = 0.0
    for _ in range(trials):
        x, x2 = _crandn(rng, d1), _crandn(rng, d1)
        y, y2 = _crandn(rng, d2), _crandn(rng, d2)
        al, be = _crandn(rng, 2)
        lhs = t.apply(al * x + be * x2, y)
        bil = max(bil, float(np.linalg.norm(lhs - al * t.apply(x, y) - be * t.apply(x2, y))))
        lhs = t.apply(x, al * y + be * y2)
        bil = max(bil, float(np.linalg.norm(lhs - al * t.apply(x, y) - be * t.apply(x, y2))))
        ux, uy = x / np.linalg.norm(x), y / np.linalg.norm(y)
        nrm = max(nrm, abs(float(np.linalg.norm(t.apply(ux, uy))) - 1.0))
    return AxiomReport(t.label, trials, bil, nrm, tol)
