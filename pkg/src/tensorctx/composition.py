"""Multipartite spaces assembled from bipartite tensor operators.

A :class:`MultipartiteContext` fixes an ordered list of parts and a global
basis ``b_{ijk...}`` indexed lexicographically (``b_ijk <-> 4i + 2j + k`` for
three qubits).  A :class:`PairingOperator` combines the states of two slots
(each slot is one part, or a pair of parts joined by its registered tensor
operator) into the global space by sending product-basis pairs to the
matching ``b`` vector.  Pairings are always applied prefix-style with named
slots; there is deliberately no infix chaining of a bipartite operator onto
a 4 x 2 pair, since that would silently overload it.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product
from math import prod

import numpy as np

from .errors import ContextMismatch, DimensionMismatch, TypeMismatch
from .numerics import as_matrix, as_vector, dagger, kron
from .tensor_op import TensorProductOperator, TensorType


@dataclass(frozen=True)
class Part:
    name: str
    dim: int = 2

    def __post_init__(self):
        if self.dim < 1:
            raise ValueError(f"part {self.name} needs a positive dimension")


@dataclass(frozen=True, eq=False)
class PairingOperator:
    """A tensor operator of type ``H_left x H_right -> H_global``.

    ``left_op``/``right_op`` are the pairwise operators whose product bases
    index a two-part slot; ``None`` means the slot is read in the reference
    coordinates of its space (always the case for a single part).
    ``assignment[q]`` is the global index hit by product-basis pair ``q``,
    with ``q = left_index * dim_right + right_index``.
    """

    name: str
    parts: tuple[Part, ...]
    left: tuple[str, ...]
    right: tuple[str, ...]
    left_op: TensorProductOperator | None
    right_op: TensorProductOperator | None
    assignment: np.ndarray
    op: TensorProductOperator = field(repr=False)

    @property
    def global_dim(self) -> int:
        return self.op.ttype.D

    @property
    def slot_dims(self) -> tuple[int, int]:
        return self.op.ttype.d1, self.op.ttype.d2

    def apply(self, left_state, right_state) -> np.ndarray:
        return self.op.apply(left_state, right_state)

    def lift(self, left_op, right_op) -> np.ndarray:
        """Global operator acting as ``left_op`` on the left slot and ``right_op`` on the right.

        Slot operators are written in the reference coordinates of their slot
        spaces, exactly like the states passed to :meth:`apply`.
        """
        return self.op.lift(left_op, right_op)

    def coefficients(self, state) -> np.ndarray:
        """Coefficients of a global state on this pairing's product basis."""
        v = as_vector(state, "state")
        if v.size != self.global_dim:
            raise DimensionMismatch(f"state has dim {v.size}, expected {self.global_dim}")
        return v[self.assignment]

    def from_coefficients(self, coeffs) -> np.ndarray:
        c = as_vector(coeffs, "coefficients")
        if c.size != self.global_dim:
            raise DimensionMismatch(f"got {c.size} coefficients, expected {self.global_dim}")
        out = np.zeros(self.global_dim, dtype=np.complex128)
        out[self.assignment] = c
        return out

    def permutation(self) -> np.ndarray:
        """Unitary taking product-basis coordinates to global coordinates."""
        p = np.zeros((self.global_dim, self.global_dim), dtype=np.complex128)
        p[self.assignment, np.arange(self.global_dim)] = 1
        return p

    def __repr__(self) -> str:
        return f"PairingOperator({self.name!r}, {self.left} x {self.right})"


def _slot_dim(parts: dict[str, Part], names: tuple[str, ...]) -> int:
    return prod(parts[n].dim for n in names)


def make_pairing(
    name: str,
    parts: tuple[Part, ...] | list[Part],
    left: tuple[str, ...] | list[str],
    right: tuple[str, ...] | list[str],
    left_op: TensorProductOperator | None = None,
    right_op: TensorProductOperator | None = None,
) -> PairingOperator:
    parts = tuple(parts)
    left, right = tuple(left), tuple(right)
    by_name = {p.name: p for p in parts}
    if len(by_name) != len(parts):
        raise ValueError("part names must be unique")
    if sorted(left + right) != sorted(by_name) or set(left) & set(right):
        raise ValueError(f"slots {left} and {right} must partition the parts {tuple(by_name)}")
    for names, op in ((left, left_op), (right, right_op)):
        if op is None:
            continue
        if len(names) != 2:
            raise TypeMismatch(f"a tensor operator needs a two-part slot, got {names}")
        want = TensorType(by_name[names[0]].dim, by_name[names[1]].dim)
        if op.ttype != want:
            raise TypeMismatch(f"slot {names} needs an operator of type {want}, got {op.ttype}")

    dl, dr = _slot_dim(by_name, left), _slot_dim(by_name, right)
    order = [p.name for p in parts]
    radices = [p.dim for p in parts]
    assignment = np.empty(dl * dr, dtype=np.intp)
    for g, digits in enumerate(product(*(range(r) for r in radices))):
        d = dict(zip(order, digits))
        lp = 0
        for n in left:
            lp = lp * by_name[n].dim + d[n]
        rp = 0
        for n in right:
            rp = rp * by_name[n].dim + d[n]
        assignment[lp * dr + rp] = g
    assignment.setflags(write=False)

    perm = np.zeros((dl * dr, dl * dr), dtype=np.complex128)
    perm[assignment, np.arange(dl * dr)] = 1
    tl = np.eye(dl) if left_op is None else left_op.twist
    tr = np.eye(dr) if right_op is None else right_op.twist
    twist = perm @ kron(dagger(tl), dagger(tr))
    op = TensorProductOperator(TensorType(dl, dr), twist, name)
    return PairingOperator(name, parts, left, right, left_op, right_op, assignment, op)


def _pair_key(parts: tuple[Part, ...], a: str, b: str) -> tuple[str, str]:
    order = [p.name for p in parts]
    return (a, b) if order.index(a) < order.index(b) else (b, a)


@dataclass(frozen=True, eq=False)
class MultipartiteContext:
    parts: tuple[Part, ...]
    pairwise: dict[tuple[str, str], TensorProductOperator]
    pairings: dict[str, PairingOperator]

    def __post_init__(self):
        names = [p.name for p in self.parts]
        if len(set(names)) != len(names):
            raise ValueError("part names must be unique within a context")
        dims = {p.name: p.dim for p in self.parts}
        for (a, b), op in self.pairwise.items():
            if op.ttype != TensorType(dims[a], dims[b]):
                raise TypeMismatch(f"pair ({a}, {b}) needs type C^{dims[a]} x C^{dims[b]}, got {op.ttype}")
        for pr in self.pairings.values():
            if pr.parts != self.parts:
                raise ContextMismatch(f"pairing {pr.name} was built over different parts")
            for slot, op in ((pr.left, pr.left_op), (pr.right, pr.right_op)):
                if op is None:
                    continue
                registered = self.pairwise.get(tuple(slot))
                if registered is None or not registered.same_as(op):
                    raise TypeMismatch(f"pairing {pr.name} uses an operator on {slot} that is not the registered one")

    @property
    def global_dim(self) -> int:
        return prod(p.dim for p in self.parts)

    @property
    def part_names(self) -> tuple[str, ...]:
        return tuple(p.name for p in self.parts)

    def pairing(self, name: str) -> PairingOperator:
        try:
            return self.pairings[name]
        except KeyError:
            raise KeyError(f"no pairing named {name!r}; have {sorted(self.pairings)}") from None

    def operator_for(self, a: str, b: str) -> TensorProductOperator:
        return self.pairwise[_pair_key(self.parts, a, b)]

    def global_index(self, **digits: int) -> int:
        g = 0
        for p in self.parts:
            g = g * p.dim + digits[p.name]
        return g


# names of the three auxiliary operators of the 3-qubit context
B_A1A2 = "B(A1A2)"
A2_A1B = "A2(A1B)"
A1_A2B = "A1(A2B)"


def standard_context_3q(
    t12: TensorProductOperator, t13: TensorProductOperator, t23: TensorProductOperator
) -> MultipartiteContext:
    """Three qubits ``A1, A2, B`` joined pairwise by ``t12``, ``t13``, ``t23``.

    The pairings send
    ``(t12(i, j), k) -> b_ijk`` (``B(A1A2)``),
    ``(t13(i, k), j) -> b_ijk`` (``A2(A1B)``) and
    ``(t23(j, k), i) -> b_ijk`` (``A1(A2B)``).
    """
    qubit = TensorType(2, 2)
    for lab, t in (("t12", t12), ("t13", t13), ("t23", t23)):
        if t.ttype != qubit:
            raise TypeMismatch(f"{lab} must have type {qubit}, got {t.ttype}")
    parts = (Part("A1"), Part("A2"), Part("B"))
    pairings = {
        B_A1A2: make_pairing(B_A1A2, parts, ("A1", "A2"), ("B",), t12),
        A2_A1B: make_pairing(A2_A1B, parts, ("A1", "B"), ("A2",), t13),
        A1_A2B: make_pairing(A1_A2B, parts, ("A2", "B"), ("A1",), t23),
    }
    pairwise = {("A1", "A2"): t12, ("A1", "B"): t13, ("A2", "B"): t23}
    return MultipartiteContext(parts, pairwise, pairings)


def pair_apply(p: PairingOperator, pair_state, third_state) -> np.ndarray:
    return p.apply(pair_state, third_state)


def pair_lift(p: PairingOperator, pair_op, third_op) -> np.ndarray:
    return p.lift(pair_op, third_op)


def rebase(value, source: PairingOperator, target: PairingOperator) -> np.ndarray:
    """Re-express coefficients (1-D) or an operator matrix (2-D) between pairings.

    ``value`` is written on ``source``'s product basis; the result is the same
    global object written on ``target``'s product basis.
    """
    if source.parts != target.parts:
        raise ContextMismatch(f"pairings {source.name} and {target.name} belong to different contexts")
    a = np.asarray(value, dtype=np.complex128)
    if a.ndim == 1:
        return target.coefficients(source.from_coefficients(a))
    m = as_matrix(a, "operator")
    if m.shape != (source.global_dim,) * 2:
        raise DimensionMismatch(f"operator is {m.shape}, expected {source.global_dim}x{source.global_dim}")
    change = dagger(target.permutation()) @ source.permutation()
    return change @ m @ dagger(change)
