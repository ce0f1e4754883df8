"""Standard kets, gates and the named tensor operators used in the worked examples.

``tensor1`` is the canonical (Kronecker) operator on C^2 x C^2, ``tensor2``
is ``CX`` composed with it, and ``tensor3`` is the operator whose product
basis is the signed Bell list ``(b10, b11, -b01, -b00)`` taken with respect
to ``tensor1``; its twist is the matrix ``S_MATRIX``.
"""

from __future__ import annotations

import numpy as np

from .tensor_op import TensorProductOperator, canonical, from_basis_images, from_twist

R2 = 1 / np.sqrt(2)


def _ro(a) -> np.ndarray:
    m = np.array(a, dtype=np.complex128)
    m.setflags(write=False)
    return m


KET0 = _ro([1, 0])
KET1 = _ro([0, 1])
PLUS = _ro([R2, R2])
MINUS = _ro([R2, -R2])

I2 = _ro(np.eye(2))
I4 = _ro(np.eye(4))
X = _ro([[0, 1], [1, 0]])
Y = _ro([[0, -1j], [1j, 0]])
Z = _ro([[1, 0], [0, -1]])
H = _ro(np.array([[1, 1], [1, -1]]) * R2)
CX = _ro(np.eye(4)[[0, 1, 3, 2]])
CZ = _ro(np.diag([1, 1, 1, -1]))
SWAP = _ro(np.eye(4)[[0, 2, 1, 3]])

# Bell states with respect to the canonical operator
BELL00 = _ro(np.array([1, 0, 0, 1]) * R2)
BELL01 = _ro(np.array([0, 1, 1, 0]) * R2)
BELL10 = _ro(np.array([1, 0, 0, -1]) * R2)
BELL11 = _ro(np.array([0, 1, -1, 0]) * R2)

S_MATRIX = _ro(np.array([[1, 0, 0, -1], [0, 1, -1, 0], [0, -1, -1, 0], [-1, 0, 0, -1]]) * R2)


def ket(bits: str) -> np.ndarray:
    """Standard basis ket for a bit string, e.g. ``ket("011")`` is e_3 of C^8."""
    v = np.zeros(2 ** len(bits), dtype=np.complex128)
    v[int(bits, 2)] = 1
    return v


def basis_vector(dim: int, index: int) -> np.ndarray:
    v = np.zeros(dim, dtype=np.complex128)
    v[index] = 1
    return v


def tensor1() -> TensorProductOperator:
    return canonical(2, 2, label="tensor1")


def tensor2() -> TensorProductOperator:
    return from_twist(tensor1(), CX, label="tensor2")


def tensor3() -> TensorProductOperator:
    return from_basis_images(tensor1().ttype, [BELL10, BELL11, -BELL01, -BELL00], label="tensor3")
