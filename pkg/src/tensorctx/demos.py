"""The worked examples as runnable checks.

Each ``demo_*`` function returns a :class:`DemoReport`: a list of named
quantities plus a list of ``(check, passed, detail)`` expectations.  The CLI
prints them; the acceptance suite asserts on them.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import library as lib
from .analysis import conjugate, factorize_operator, factorize_state, schmidt
from .circuit import (
    Circuit,
    bob_state,
    build_teleportation,
    enumerate_branches,
    local_gate,
    simulate,
    split_bridge_state,
    swap_bridge,
    unitary_gate,
)
from .measurement import measure, observable_from
from .numerics import approx_eq_phase, eig_hermitian, max_abs
from .tensor_op import TensorProductOperator, relating_unitary


@dataclass
class DemoReport:
    name: str
    values: list[tuple[str, object]] = field(default_factory=list)
    checks: list[tuple[str, bool, str]] = field(default_factory=list)

    def value(self, key: str, val) -> None:
        self.values.append((key, val))

    def check(self, key: str, ok: bool, detail: str = "") -> None:
        self.checks.append((key, bool(ok), detail))

    @property
    def passed(self) -> bool:
        return all(ok for _, ok, _ in self.checks)


def bell_circuit(t: TensorProductOperator, with_cx: bool = True, name: str = "") -> Circuit:
    """H on the first qubit, then (optionally) CX, starting from ``t(|0>, |0>)``."""
    gates = [local_gate(t, lib.H, lib.I2, "H")]
    if with_cx:
        gates.append(unitary_gate(t.twist @ lib.CX @ t.twist.conj().T, t.label, "CX"))
    return Circuit(t, tuple(gates), t.apply(lib.KET0, lib.KET0), name or ("ct0a" if with_cx else "ct0b"))


def demo_example1(tol: float = 1e-12) -> DemoReport:
    rep = DemoReport("example1")
    t1, t2 = lib.tensor1(), lib.tensor2()
    bell1 = (t1(lib.KET0, lib.KET0) + t1(lib.KET1, lib.KET1)) / np.sqrt(2)
    bell2 = (t2(lib.KET0, lib.KET0) + t2(lib.KET1, lib.KET1)) / np.sqrt(2)
    rep.value("relating_unitary(tensor1,tensor2)", relating_unitary(t1, t2))
    for name, state, own, other in (("bell00[tensor1]", bell1, t1, t2), ("bell00[tensor2]", bell2, t2, t1)):
        rep.value(f"{name}.schmidt[{own.label}]", schmidt(state, own).coefficients)
        rep.value(f"{name}.schmidt[{other.label}]", schmidt(state, other).coefficients)
        split = factorize_state(state, other)
        rep.check(f"{name} entangled under {own.label}", factorize_state(state, own) is None)
        if split is None:
            rep.check(f"{name} separable under {other.label}", False, "rank > 1")
            continue
        x, y = split
        rep.value(f"{name}.factor[{other.label}].x", x)
        rep.value(f"{name}.factor[{other.label}].y", y)
        res = float(np.linalg.norm(other(x, y) - state))
        ok = approx_eq_phase(x, lib.PLUS, tol) and approx_eq_phase(y, lib.KET0, tol) and res < tol
        rep.check(f"{name} = |+> (x)_{other.label} |0>", ok, f"residual={res:.3e}")
    return rep


def demo_coordination(tol: float = 1e-12) -> DemoReport:
    rep = DemoReport("coordination")
    t1, t2, t3 = lib.tensor1(), lib.tensor2(), lib.tensor3()
    a_trace = simulate(bell_circuit(t1, True))
    b_trace = simulate(bell_circuit(t2, False))
    bell1 = lib.BELL00
    rep.value("ct0a.final", a_trace.final)
    rep.value("ct0b.final", b_trace.final)
    rep.check("ct0a ends in bell00[tensor1]", approx_eq_phase(a_trace.final, bell1, tol))
    rep.check("ct0b ends in bell00[tensor1]", approx_eq_phase(b_trace.final, bell1, tol))

    m1 = observable_from(t1.lift(lib.I2, lib.Z))
    m2 = observable_from(t2.lift(lib.I2, lib.Z))
    rep.check("I (x)_2 Z = Z (x)_1 Z", max_abs(m2.matrix - t1.lift(lib.Z, lib.Z)) < tol)
    r1, r2 = measure(bell1, m1), measure(bell1, m2)
    rep.value("P(outcome) with I (x)_1 Z", [(r.outcome, r.probability) for r in r1])
    rep.value("P(outcome) with I (x)_2 Z", [(r.outcome, r.probability) for r in r2])
    rep.check("I (x)_1 Z gives 1/2, 1/2", all(abs(r.probability - 0.5) < tol for r in r1))
    rep.check(
        "I (x)_2 Z gives +1 with certainty",
        abs(r2[0].outcome - 1) < tol and abs(r2[0].probability - 1) < tol and r2[1].post_state is None,
    )

    S = lib.S_MATRIX
    rep.value("eigenvalues(S)", [lam for lam, _ in eig_hermitian(S)])
    rep.check("S has eigenvalues 1,1,-1,-1", np.allclose([lam for lam, _ in eig_hermitian(S)], [1, 1, -1, -1], atol=1e-10))
    rep.check("S is local under tensor2", factorize_operator(S, t2) is not None)
    s_prime = conjugate(S, lib.CX)
    rep.value("S' = CX S CX", s_prime)
    matched = []
    for t in (t1, t2, t3):
        f = factorize_operator(s_prime, t)
        if f is not None:
            matched.append(t.label)
            rep.value(f"S'.factor[{t.label}].left", f.left)
            rep.value(f"S'.factor[{t.label}].right", f.right)
            rep.value(f"S'.factor[{t.label}].residual", f.residual)
    rep.value("S' local under", matched)
    rep.check("S' is local under at least one candidate", bool(matched))
    printed = np.outer(lib.MINUS, lib.KET0) - np.outer(lib.PLUS, lib.KET1)
    rep.check("S' = (|-><0| - |+><1|) (x)_1 I", max_abs(t1.lift(printed, lib.I2) - s_prime) < tol)
    return rep


def demo_teleportation(seed: int = 0, a: complex = 0.6, b: complex = 0.8j, tol: float = 1e-10) -> DemoReport:
    rep = DemoReport("teleportation")
    t1, t2, t3 = lib.tensor1(), lib.tensor2(), lib.tensor3()
    c = build_teleportation(t3, t2, t1, a, b)
    expected = teleportation_reference(a, b)
    trace = simulate(c, seed)
    for lab, key in (("initial", "phi1"), ("CX", "phi2"), ("H", "phi3")):
        v = trace.state(lab)
        rep.value(key, v)
        rep.check(f"{key} matches the closed form", max_abs(v - expected[key]) < tol)
    branches = enumerate_branches(c)
    rep.check("four branches", len(branches) == 4)
    for br in branches:
        bob = bob_state(br.final, c)
        ok = bob is not None and approx_eq_phase(bob, a * lib.KET0 + b * lib.KET1, tol)
        tag = ",".join(f"{k}={v:+g}" for k, v in br.outcomes.items())
        rep.check(f"branch {tag}: p=1/4 and B holds a|0>+b|1>", ok and abs(br.probability - 0.25) < tol)
    rep.value("sampled outcomes", trace.outcomes)
    bob = bob_state(trace.final, c)
    rep.value("corrected B state", bob)
    rep.check("sampled run teleports", bob is not None and approx_eq_phase(bob, a * lib.KET0 + b * lib.KET1, tol))
    return rep


def teleportation_reference(a: complex, b: complex) -> dict[str, np.ndarray]:
    """phi1..phi3 as closed-form coefficient lists on b_000 .. b_111."""
    r = 1 / np.sqrt(2)
    phi1 = np.zeros(8, dtype=complex)
    phi1[[0b000, 0b011]] = a * r
    phi1[[0b100, 0b111]] = b * r
    phi2 = np.zeros(8, dtype=complex)
    phi2[[0b000, 0b011]] = a * r
    phi2[[0b110, 0b101]] = b * r
    phi3 = np.zeros(8, dtype=complex)
    phi3[[0b000, 0b100, 0b011, 0b111]] = a / 2
    phi3[[0b010, 0b001]] = b / 2
    phi3[[0b110, 0b101]] = -b / 2
    return {"phi1": phi1, "phi2": phi2, "phi3": phi3}


def demo_swapbridge(tol: float = 1e-12) -> DemoReport:
    rep = DemoReport("swapbridge")
    t1, t2 = lib.tensor1(), lib.tensor2()
    c = swap_bridge(bell_circuit(t1, True), t2, t1)
    final = simulate(c).final
    rep.value("final", final)
    split = split_bridge_state(final, c)
    rep.check("originals separable from shadows", split is not None)
    if split is None:
        return rep
    orig, shadow = split
    rep.value("shadow pair vector", shadow)
    sh = factorize_state(shadow / np.linalg.norm(shadow), t2)
    og = factorize_state(orig, t1)
    rep.check("shadow = |+> (x)_2 |0>", sh is not None and approx_eq_phase(sh[0], lib.PLUS, tol) and approx_eq_phase(sh[1], lib.KET0, tol))
    rep.check("originals = |0> (x)_1 |0>", og is not None and approx_eq_phase(og[0], lib.KET0, tol) and approx_eq_phase(og[1], lib.KET0, tol))
    return rep


DEMOS = {
    "example1": demo_example1,
    "coordination": demo_coordination,
    "teleportation": demo_teleportation,
    "swapbridge": demo_swapbridge,
}
