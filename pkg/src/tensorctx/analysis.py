"""Separability of states and locality of operators relative to a tensor operator."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, NotNormalized
from .numerics import (
    RECONSTRUCTION_TOL,
    as_matrix,
    as_vector,
    dagger,
    max_abs,
    numerical_rank,
    require_unitary,
    svd,
)
from .tensor_op import TensorProductOperator


@dataclass(frozen=True, eq=False)
class SchmidtDecomposition:
    coefficients: np.ndarray
    left_vectors: np.ndarray  # columns, dim d1
    right_vectors: np.ndarray  # columns, dim d2
    rank: int

    def reconstruct(self, t: TensorProductOperator, terms: int | None = None) -> np.ndarray:
        n = len(self.coefficients) if terms is None else terms
        out = np.zeros(t.ttype.D, dtype=np.complex128)
        for k in range(n):
            out += self.coefficients[k] * t.apply(self.left_vectors[:, k], self.right_vectors[:, k])
        return out


@dataclass(frozen=True, eq=False)
class OperatorFactorization:
    left: np.ndarray
    right: np.ndarray
    residual: float


def _check_state(state, t: TensorProductOperator) -> np.ndarray:
    v = as_vector(state, "state")
    if v.size != t.ttype.D:
        raise DimensionMismatch(f"state has dim {v.size}, but {t.label or 'operator'} targets C^{t.ttype.D}")
    return v


def unfold(state, t: TensorProductOperator) -> np.ndarray:
    """Coefficient matrix ``M[i, j]`` of ``state`` on the product basis ``t(e_i, f_j)``."""
    v = _check_state(state, t)
    return (dagger(t.twist) @ v).reshape(t.ttype.d1, t.ttype.d2)


def schmidt(state, t: TensorProductOperator) -> SchmidtDecomposition:
    u, s, v = svd(unfold(state, t))
    # M = U diag(s) V^dag, and kron(x, y) has coefficients x_i y_j, so the right
    # Schmidt vectors are the conjugated columns of V
    return SchmidtDecomposition(s, u, np.conj(v), numerical_rank(s))


def factorize_state(state, t: TensorProductOperator, tol: float = 1e-8):
    """Split a separable state as ``t(x, y)``; ``None`` when it is entangled under ``t``.

    ``x`` is a unit vector whose largest-magnitude entry is real and
    nonnegative; ``y`` carries the remaining phase and the norm, so
    ``t.apply(x, y)`` reproduces ``state`` itself, not just its ray.
    """
    v = _check_state(state, t)
    if abs(np.linalg.norm(v) - 1.0) > tol:
        raise NotNormalized(f"state norm is {np.linalg.norm(v):.12g}, expected 1")
    dec = schmidt(v, t)
    if dec.rank != 1:
        return None
    x = dec.left_vectors[:, 0]
    y = dec.coefficients[0] * dec.right_vectors[:, 0]
    return x, y


def kronecker_rearrangement(m, d1: int, d2: int) -> np.ndarray:
    """Reshape a ``D x D`` matrix into ``d1^2 x d2^2`` so ``kron(A, B) -> vec(A) vec(B)^T``."""
    a = as_matrix(m)
    if a.shape != (d1 * d2, d1 * d2):
        raise DimensionMismatch(f"expected a {d1 * d2}x{d1 * d2} matrix, got {a.shape}")
    return a.reshape(d1, d2, d1, d2).transpose(0, 2, 1, 3).reshape(d1 * d1, d2 * d2)


def factorize_operator(op, t: TensorProductOperator):
    """Decide whether ``op = left (x)_t right`` and return the factors if so.

    The twist is undone first and the rearranged matrix tested for numerical
    rank one.  ``left`` has unit Frobenius norm with its largest-magnitude
    entry real nonnegative; ``right`` carries the scale.
    """
    L = as_matrix(op, "operator")
    d1, d2 = t.ttype.d1, t.ttype.d2
    if L.shape != (t.ttype.D, t.ttype.D):
        raise DimensionMismatch(f"operator is {L.shape}, but {t.label or 'operator'} targets C^{t.ttype.D}")
    local = dagger(t.twist) @ L @ t.twist
    u, s, v = svd(kronecker_rearrangement(local, d1, d2))
    if numerical_rank(s) > 1:
        return None
    left = u[:, 0].reshape(d1, d1)
    right = s[0] * np.conj(v[:, 0]).reshape(d2, d2)
    residual = max_abs(t.lift(left, right) - L)
    return OperatorFactorization(left, right, residual)


def conjugate(op, w) -> np.ndarray:
    """``W^dag L W``: moves ``L`` from the context ``W o t`` back to ``t``."""
    L = as_matrix(op, "operator")
    W = require_unitary(w, name="conjugating unitary")
    if L.shape != W.shape:
        raise DimensionMismatch(f"operator {L.shape} and unitary {W.shape} do not match")
    return dagger(W) @ L @ W


def is_local(op, t: TensorProductOperator, tol: float = RECONSTRUCTION_TOL) -> bool:
    f = factorize_operator(op, t)
    return f is not None and f.residual <= tol
