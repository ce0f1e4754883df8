from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from tensorctx import library as lib
from tensorctx.analysis import factorize_state, schmidt
from tensorctx.circuit import (
    MAIN,
    Circuit,
    bob_state,
    build_teleportation,
    enumerate_branches,
    local_gate,
    local_measurement,
    measurement_gate,
    simulate,
    split_bridge_state,
    swap_bridge,
    transform_circuit,
    unitary_gate,
)
from tensorctx.demos import bell_circuit, teleportation_reference
from tensorctx.errors import NotNormalized, TypeMismatch
from tensorctx.numerics import approx_eq_phase
from tensorctx.tensor_op import TensorProductOperator, TensorType, relating_unitary

from conftest import random_hermitian, random_state, random_unitary

seeds = st.integers(0, 2**32 - 1)
QUBIT = TensorType(2, 2)


def random_op(rng, label):
    return TensorProductOperator(QUBIT, random_unitary(rng, 4), label)


def random_circuit(rng, t, n_gates):
    gates = []
    for k in range(n_gates):
        kind = rng.integers(3)
        if kind == 0:
            gates.append(unitary_gate(random_unitary(rng, 4), t.label, f"U{k}"))
        elif kind == 1:
            gates.append(local_gate(t, random_unitary(rng, 2), random_unitary(rng, 2), f"L{k}"))
        else:
            # a degenerate local observable keeps some branches two-dimensional
            gates.append(local_measurement(t, random_hermitian(rng, 2), np.eye(2), f"M{k}"))
    return Circuit(t, tuple(gates), random_state(rng, 4), "random")


@given(seeds, st.integers(1, 5))
def test_transform_gives_w_times_trace(seed, n):
    rng = np.random.default_rng(seed)
    a, b = random_op(rng, "a"), random_op(rng, "b")
    c = random_circuit(rng, a, n)
    w = relating_unitary(a, b)
    moved = transform_circuit(c, b)
    assert moved.context is b
    run_a, run_b = simulate(c, seed), simulate(moved, seed)
    assert run_a.outcomes.keys() == run_b.outcomes.keys()
    for (la, va), (lb, vb) in zip(run_a.checkpoints, run_b.checkpoints):
        assert la == lb
        np.testing.assert_allclose(vb, w @ va, atol=1e-9)
    for lab in run_a.outcomes:
        assert abs(run_a.outcomes[lab] - run_b.outcomes[lab]) < 1e-8


@given(seeds, st.integers(1, 5))
def test_transform_preserves_branch_distribution(seed, n):
    rng = np.random.default_rng(seed)
    a, b = random_op(rng, "a"), random_op(rng, "b")
    c = random_circuit(rng, a, n)
    w = relating_unitary(a, b)
    ba, bb = enumerate_branches(c), enumerate_branches(transform_circuit(c, b))
    assert len(ba) == len(bb)
    assert abs(sum(t.probability for t in ba) - 1) < 1e-9
    for ta, tb in zip(ba, bb):
        assert abs(ta.probability - tb.probability) < 1e-9
        np.testing.assert_allclose(tb.final, w @ ta.final, atol=1e-9)


@given(seeds)
def test_transform_with_mapping_and_back(seed):
    rng = np.random.default_rng(seed)
    a, b = random_op(rng, "a"), random_op(rng, "b")
    c = random_circuit(rng, a, 3)
    there = transform_circuit(c, {("Q1", "Q2"): b})
    back = transform_circuit(there, a)
    np.testing.assert_allclose(back.initial_state, c.initial_state, atol=1e-9)
    for g1, g2 in zip(back.gates, c.gates):
        np.testing.assert_allclose(g1.matrix, g2.matrix, atol=1e-9)


@given(seeds, st.integers(1, 5))
def test_checkpoints_have_unit_norm(seed, n):
    rng = np.random.default_rng(seed)
    c = random_circuit(rng, random_op(rng, "a"), n)
    for _, v in simulate(c, seed).checkpoints:
        assert abs(np.linalg.norm(v) - 1) < 1e-9


def test_bell_circuits_agree():
    a = simulate(bell_circuit(lib.tensor1(), True))
    b = simulate(bell_circuit(lib.tensor2(), False))
    np.testing.assert_allclose(a.final, lib.BELL00, atol=1e-12)
    np.testing.assert_allclose(b.final, lib.BELL00, atol=1e-12)


def test_teleportation_checkpoints_match_closed_form():
    rng = np.random.default_rng(11)
    t1, t2, t3 = lib.tensor1(), lib.tensor2(), lib.tensor3()
    for _ in range(50):
        a, b = random_state(rng, 2)
        c = build_teleportation(t3, t2, t1, a, b)
        ref = teleportation_reference(a, b)
        tr = simulate(c, int(rng.integers(1 << 31)))
        for lab, key in (("initial", "phi1"), ("CX", "phi2"), ("H", "phi3")):
            np.testing.assert_allclose(tr.state(lab), ref[key], atol=1e-10)


@given(seeds)
def test_teleportation_works_for_any_operator_triple(seed):
    rng = np.random.default_rng(seed)
    ops = [random_op(rng, n) for n in ("t12", "t13", "t23")]
    a, b = random_state(rng, 2)
    c = build_teleportation(*ops, a, b)
    branches = enumerate_branches(c)
    assert len(branches) == 4
    for br in branches:
        assert abs(br.probability - 0.25) < 1e-9
        bob = bob_state(br.final, c)
        assert bob is not None and approx_eq_phase(bob, np.array([a, b]), 1e-9)


def test_teleportation_rejects_unnormalized_input():
    t = lib.tensor1()
    with pytest.raises(NotNormalized):
        build_teleportation(t, t, t, 1.0, 1.0)


def test_swap_bridge_moves_pair_onto_shadows():
    t1, t2 = lib.tensor1(), lib.tensor2()
    c = swap_bridge(bell_circuit(t1, True), t2, t1)
    tr = simulate(c)
    for _, v in tr.checkpoints:
        assert abs(np.linalg.norm(v) - 1) < 1e-12
    assert schmidt(tr.final, c.context.pairing(MAIN).op).rank == 1
    orig, shadow = split_bridge_state(tr.final, c)
    x, y = factorize_state(shadow / np.linalg.norm(shadow), t2)
    assert approx_eq_phase(x, lib.PLUS, 1e-12) and approx_eq_phase(y, lib.KET0, 1e-12)
    x, y = factorize_state(orig, t1)
    assert approx_eq_phase(x, lib.KET0, 1e-12) and approx_eq_phase(y, lib.KET0, 1e-12)


@given(seeds)
def test_swap_bridge_transfers_any_pair_state(seed):
    rng = np.random.default_rng(seed)
    t, partner, bridge = (random_op(rng, n) for n in ("t", "p", "b"))
    psi = random_state(rng, 4)
    c = swap_bridge(Circuit(t, (), psi, "id"), partner, bridge)
    orig, shadow = split_bridge_state(simulate(c).final, c)
    np.testing.assert_allclose(np.kron(orig, shadow), np.kron(partner(lib.KET0, lib.KET0), psi), atol=1e-9)


def test_validation():
    t = lib.tensor1()
    psi = lib.ket("00")
    with pytest.raises(NotNormalized):
        Circuit(t, (), 2 * psi)
    with pytest.raises(ValueError):
        # the condition names a measurement that has not happened yet
        Circuit(t, (local_gate(t, lib.X, lib.I2, "X", condition=("M", -1.0)), measurement_gate(lib.CZ, "", "M")), psi)
    with pytest.raises(ValueError):
        unitary_gate(2 * np.eye(4))
    ctx_circuit = build_teleportation(t, t, t, 1.0, 0.0)
    with pytest.raises(TypeMismatch):
        transform_circuit(ctx_circuit, t)


def test_conditioned_gate_skips_when_outcome_differs():
    t = lib.tensor1()
    gates = (
        local_measurement(t, lib.Z, lib.I2, "M"),
        local_gate(t, lib.I2, lib.X, "fix", condition=("M", -1.0)),
    )
    c = Circuit(t, gates, lib.ket("00"))
    tr = simulate(c, 3)
    assert tr.outcomes == {"M": 1.0}
    np.testing.assert_allclose(tr.final, lib.ket("00"))
    np.testing.assert_allclose(tr.state("fix"), tr.state("M"))


def test_simulate_is_reproducible():
    rng = np.random.default_rng(5)
    c = random_circuit(rng, random_op(rng, "a"), 5)
    r1, r2 = simulate(c, 99), simulate(c, 99)
    assert r1.outcomes == r2.outcomes
    for (_, v1), (_, v2) in zip(r1.checkpoints, r2.checkpoints):
        np.testing.assert_array_equal(v1, v2)
