"""Circuits whose gates are annotated with the tensor context they are written in.

Gate matrices are stored as operators on the circuit's whole space, in the
reference coordinates of that space; the ``context`` string records which
tensor operator or pairing was used to assemble them.  Classical control is
a ``condition = (record_label, outcome)`` on the gate: it fires only when the
measurement labelled ``record_label`` returned ``outcome``.
"""

from __future__ import annotations

from collections.abc import Mapping
from dataclasses import dataclass, field, replace

import numpy as np

from .analysis import factorize_state
from .composition import (
    A1_A2B,
    A2_A1B,
    B_A1A2,
    MultipartiteContext,
    PairingOperator,
    Part,
    make_pairing,
    standard_context_3q,
)
from .errors import DimensionMismatch, NotNormalized, TypeMismatch
from .measurement import MeasurementResult, Observable, measure, observable_from, sample
from .numerics import EPS, as_matrix, as_vector, dagger, require_unitary
from .rng import sub_seed
from .tensor_op import TensorProductOperator, TensorType, relating_unitary

UNITARY = "unitary"
MEASUREMENT = "measurement"

_OUTCOME_TOL = 1e-8


@dataclass(frozen=True, eq=False)
class Gate:
    kind: str
    matrix: np.ndarray
    context: str = ""
    label: str = ""
    observable: Observable | None = field(default=None, repr=False)
    condition: tuple[str, float] | None = None

    def __post_init__(self):
        if self.kind == UNITARY:
            object.__setattr__(self, "matrix", require_unitary(self.matrix, name=f"gate {self.label}"))
        elif self.kind == MEASUREMENT:
            m = as_matrix(self.matrix, f"observable {self.label}")
            object.__setattr__(self, "matrix", m)
            if self.observable is None:
                object.__setattr__(self, "observable", observable_from(m))
        else:
            raise ValueError(f"gate kind must be {UNITARY!r} or {MEASUREMENT!r}, got {self.kind!r}")

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]


def unitary_gate(matrix, context: str = "", label: str = "", condition=None) -> Gate:
    return Gate(UNITARY, matrix, context, label, condition=condition)


def local_gate(ctx: TensorProductOperator | PairingOperator, left, right, label: str = "", condition=None) -> Gate:
    """Gate ``left (x)_ctx right``; for a pairing, ``left`` acts on its left slot."""
    name = ctx.name if isinstance(ctx, PairingOperator) else ctx.label
    return Gate(UNITARY, ctx.lift(left, right), name, label, condition=condition)


def measurement_gate(matrix, context: str = "", label: str = "") -> Gate:
    return Gate(MEASUREMENT, matrix, context, label)


def local_measurement(ctx: TensorProductOperator | PairingOperator, left, right, label: str = "") -> Gate:
    name = ctx.name if isinstance(ctx, PairingOperator) else ctx.label
    return Gate(MEASUREMENT, ctx.lift(left, right), name, label)


@dataclass(frozen=True, eq=False)
class Circuit:
    """An ordered gate list over a bipartite operator or a multipartite context."""

    context: TensorProductOperator | MultipartiteContext
    gates: tuple[Gate, ...]
    initial_state: np.ndarray
    name: str = ""
    parts: tuple[str, ...] = ("Q1", "Q2")

    def __post_init__(self):
        object.__setattr__(self, "gates", tuple(self.gates))
        psi = as_vector(self.initial_state, "initial state")
        if psi.size != self.dim:
            raise DimensionMismatch(f"initial state has dim {psi.size}, circuit space has dim {self.dim}")
        if abs(np.linalg.norm(psi) - 1) > 1e-9:
            raise NotNormalized(f"initial state norm is {np.linalg.norm(psi):.12g}")
        object.__setattr__(self, "initial_state", psi)
        if isinstance(self.context, MultipartiteContext):
            object.__setattr__(self, "parts", self.context.part_names)
        allowed = self._context_labels()
        labels = set()
        for g in self.gates:
            if g.dim != self.dim:
                raise DimensionMismatch(f"gate {g.label!r} is {g.dim}x{g.dim}, circuit space has dim {self.dim}")
            if g.context and g.context not in allowed:
                raise TypeMismatch(f"gate {g.label!r} is written under {g.context!r}, not part of this circuit's context")
            if g.condition is not None and g.condition[0] not in labels:
                raise ValueError(f"gate {g.label!r} is conditioned on unknown measurement {g.condition[0]!r}")
            if g.kind == MEASUREMENT:
                labels.add(g.label)

    def _context_labels(self) -> set[str]:
        if isinstance(self.context, TensorProductOperator):
            return {self.context.label}
        return set(self.context.pairings) | {op.label for op in self.context.pairwise.values()}

    @property
    def dim(self) -> int:
        if isinstance(self.context, TensorProductOperator):
            return self.context.ttype.D
        return self.context.global_dim

    @property
    def is_bipartite(self) -> bool:
        return isinstance(self.context, TensorProductOperator)


@dataclass
class Trace:
    checkpoints: list[tuple[str, np.ndarray]]
    records: list[tuple[str, MeasurementResult]]
    probability: float = 1.0

    def state(self, label: str) -> np.ndarray:
        for lab, v in self.checkpoints:
            if lab == label:
                return v
        raise KeyError(label)

    @property
    def final(self) -> np.ndarray:
        return self.checkpoints[-1][1]

    @property
    def outcomes(self) -> dict[str, float]:
        return {lab: r.outcome for lab, r in self.records}


def _fires(g: Gate, outcomes: dict[str, float]) -> bool:
    if g.condition is None:
        return True
    lab, want = g.condition
    return abs(outcomes[lab] - want) <= _OUTCOME_TOL


def simulate(c: Circuit, seed: int = 0, tol: float = EPS) -> Trace:
    """Run the circuit once; measurement at gate ``k`` samples with ``sub_seed(seed, k)``."""
    state = c.initial_state
    trace = Trace([("initial", state)], [])
    outcomes: dict[str, float] = {}
    for k, g in enumerate(c.gates):
        if _fires(g, outcomes):
            if g.kind == UNITARY:
                state = g.matrix @ state
            else:
                res = sample(state, g.observable, sub_seed(seed, k), tol)
                state = res.post_state
                outcomes[g.label] = res.outcome
                trace.records.append((g.label, res))
                trace.probability *= res.probability
        trace.checkpoints.append((g.label or f"gate{k}", state))
    return trace


def enumerate_branches(c: Circuit, tol: float = EPS) -> list[Trace]:
    """Every measurement history with nonzero probability, each as a full trace."""
    out: list[Trace] = []

    def walk(k: int, state: np.ndarray, trace: Trace, outcomes: dict[str, float]):
        if k == len(c.gates):
            out.append(trace)
            return
        g = c.gates[k]
        lab = g.label or f"gate{k}"
        if not _fires(g, outcomes):
            walk(k + 1, state, Trace(trace.checkpoints + [(lab, state)], trace.records, trace.probability), outcomes)
        elif g.kind == UNITARY:
            nxt = g.matrix @ state
            walk(k + 1, nxt, Trace(trace.checkpoints + [(lab, nxt)], trace.records, trace.probability), outcomes)
        else:
            for res in measure(state, g.observable, tol):
                if not res.defined:
                    continue
                walk(
                    k + 1,
                    res.post_state,
                    Trace(
                        trace.checkpoints + [(lab, res.post_state)],
                        trace.records + [(g.label, res)],
                        trace.probability * res.probability,
                    ),
                    {**outcomes, g.label: res.outcome},
                )

    walk(0, c.initial_state, Trace([("initial", c.initial_state)], []), {})
    return out


def transform_circuit(
    c: Circuit, new_ops: Mapping[tuple[str, str], TensorProductOperator] | TensorProductOperator
) -> Circuit:
    """Change the circuit's tensor operator, conjugating every gate and observable.

    With ``W = relating_unitary(old, new)`` each matrix ``M`` becomes
    ``W M W^dag`` and the initial state ``W psi``; simulating the result gives
    ``W`` times the original trace.  Only bipartite circuits are supported.
    """
    if not c.is_bipartite:
        raise TypeMismatch("transform_circuit rewrites bipartite circuits; multipartite contexts are not supported")
    old = c.context
    if isinstance(new_ops, TensorProductOperator):
        new = new_ops
    else:
        key = tuple(c.parts)
        new = new_ops.get(key) or new_ops.get(key[::-1]) or new_ops.get(old.label)
        if new is None:
            return c
    W = relating_unitary(old, new)
    Wd = dagger(W)
    gates = []
    for g in c.gates:
        m = W @ g.matrix @ Wd
        if g.kind == UNITARY:
            gates.append(replace(g, matrix=m, context=new.label))
        else:
            gates.append(replace(g, matrix=m, context=new.label, observable=None))
    return Circuit(new, tuple(gates), W @ c.initial_state, c.name, c.parts)


def swap_matrix(d: int) -> np.ndarray:
    s = np.zeros((d * d, d * d), dtype=np.complex128)
    for i in range(d):
        for j in range(d):
            s[j * d + i, i * d + j] = 1
    return s


MAIN = "main"
BRIDGE = "bridge"


def swap_bridge(c: Circuit, partner_op: TensorProductOperator, bridge_op: TensorProductOperator) -> Circuit:
    """Append swaps that move the pair's state onto a shadow pair joined by ``partner_op``.

    The 4-part space is the Kronecker product of the original pair's target
    space and the shadow pair's target space (``b_ijkl <-> 8i + 4j + 2k + l``
    for qubits), so a completed swap leaves the shadow holding the very same
    pair-space vector, now read under ``partner_op``.  Each swap is the
    standard swap written in ``bridge_op``'s product basis.
    """
    if not c.is_bipartite:
        raise TypeMismatch("swap_bridge needs a bipartite circuit")
    t = c.context
    d1, d2 = t.ttype.d1, t.ttype.d2
    if partner_op.ttype != t.ttype:
        raise TypeMismatch(f"partner operator must have type {t.ttype}, got {partner_op.ttype}")
    if d1 != d2 or bridge_op.ttype != TensorType(d1, d1):
        raise TypeMismatch(f"bridge operator must have type C^{d1} x C^{d1}, got {bridge_op.ttype}")
    q1, q2 = c.parts
    s1, s2 = q1 + "'", q2 + "'"
    parts = (Part(q1, d1), Part(q2, d2), Part(s1, d1), Part(s2, d2))
    main = make_pairing(MAIN, parts, (q1, q2), (s1, s2))
    bridge = make_pairing(BRIDGE, parts, (q1, s1), (q2, s2), bridge_op, bridge_op)
    ctx = MultipartiteContext(
        parts,
        {(q1, q2): t, (s1, s2): partner_op, (q1, s1): bridge_op, (q2, s2): bridge_op},
        {MAIN: main, BRIDGE: bridge},
    )
    e0 = np.zeros(d1, dtype=np.complex128)
    e0[0] = 1
    shadow0 = partner_op.apply(e0, e0)
    ident = np.eye(t.ttype.D)

    gates = []
    for g in c.gates:
        lifted = main.lift(g.matrix, ident)
        gates.append(replace(g, matrix=lifted, context=MAIN, observable=None))
    sw = bridge_op.twist @ swap_matrix(d1) @ dagger(bridge_op.twist)
    eye_b = np.eye(d1 * d1)
    gates.append(unitary_gate(bridge.lift(sw, eye_b), BRIDGE, f"SWAP({q1},{s1})"))
    gates.append(unitary_gate(bridge.lift(eye_b, sw), BRIDGE, f"SWAP({q2},{s2})"))
    return Circuit(ctx, tuple(gates), main.apply(c.initial_state, shadow0), f"{c.name}+bridge")


def split_bridge_state(state, c: Circuit):
    """Split a swap-bridge state into (original pair vector, shadow pair vector), or ``None``."""
    return factorize_state(state, c.context.pairing(MAIN).op)


def build_teleportation(
    t12: TensorProductOperator, t13: TensorProductOperator, t23: TensorProductOperator, a: complex, b: complex
) -> Circuit:
    """Teleport ``a|0> + b|1>`` from A1 to B with per-pair tensor operators.

    A2 and B share the Bell state ``(t23(0,0) + t23(1,1))/sqrt 2``.  The
    circuit applies CX on (A1, A2) written in ``t12``'s basis, H on A1,
    measures Z on A1 and on A2, then applies ``X^j`` and ``Z^i`` to B.
    Checkpoint labels: ``initial`` (phi1), ``CX`` (phi2), ``H`` (phi3).
    """
    if abs(abs(a) ** 2 + abs(b) ** 2 - 1) > 1e-10:
        raise NotNormalized(f"|a|^2 + |b|^2 = {abs(a) ** 2 + abs(b) ** 2:.12g}, expected 1")
    ctx = standard_context_3q(t12, t13, t23)
    p_b, p_a2, p_a1 = ctx.pairing(B_A1A2), ctx.pairing(A2_A1B), ctx.pairing(A1_A2B)
    from .library import CX, I2, I4, KET0, KET1, H, X, Z

    bell = (t23.apply(KET0, KET0) + t23.apply(KET1, KET1)) / np.sqrt(2)
    phi1 = p_a1.apply(bell, a * KET0 + b * KET1)
    cx_in_t12 = t12.twist @ CX @ dagger(t12.twist)
    gates = (
        local_gate(p_b, cx_in_t12, I2, "CX"),
        local_gate(p_a1, I4, H, "H"),
        local_measurement(p_a1, I4, Z, "M_A1"),
        local_measurement(p_a2, I4, Z, "M_A2"),
        local_gate(p_b, I4, X, "X_B", condition=("M_A2", -1.0)),
        local_gate(p_b, I4, Z, "Z_B", condition=("M_A1", -1.0)),
    )
    return Circuit(ctx, gates, phi1, "teleportation")


def bob_state(state, c: Circuit) -> np.ndarray | None:
    """B's state when the global state is a product across the ``B(A1A2)`` pairing."""
    split = factorize_state(state, c.context.pairing(B_A1A2).op)
    if split is None:
        return None
    y = split[1]
    return y / np.linalg.norm(y)
