from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from tensorctx import library as lib
from tensorctx.composition import (
    A1_A2B,
    A2_A1B,
    B_A1A2,
    Part,
    make_pairing,
    pair_apply,
    pair_lift,
    rebase,
    standard_context_3q,
)
from tensorctx.errors import ContextMismatch, TypeMismatch
from tensorctx.tensor_op import TensorProductOperator, TensorType, verify_axioms

from conftest import crandn, random_state, random_unitary

seeds = st.integers(0, 2**32 - 1)
QUBIT = TensorType(2, 2)


def random_context(rng):
    ops = [TensorProductOperator(QUBIT, random_unitary(rng, 4), lab) for lab in ("t12", "t13", "t23")]
    return standard_context_3q(*ops), ops


def e(k):
    return np.eye(2)[k]


@given(seeds)
def test_pairings_are_tensor_operators(seed):
    ctx, _ = random_context(np.random.default_rng(seed))
    for p in ctx.pairings.values():
        assert verify_axioms(p.op, trials=20, seed=seed % 1000).passed


def test_basis_consistency_exhaustive(rng):
    ctx, (t12, t13, t23) = random_context(rng)
    pb, pa2, pa1 = ctx.pairing(B_A1A2), ctx.pairing(A2_A1B), ctx.pairing(A1_A2B)
    for i in range(2):
        for j in range(2):
            for k in range(2):
                b = np.zeros(8)
                b[4 * i + 2 * j + k] = 1
                assert ctx.global_index(A1=i, A2=j, B=k) == 4 * i + 2 * j + k
                np.testing.assert_allclose(pair_apply(pb, t12(e(i), e(j)), e(k)), b, atol=1e-12)
                np.testing.assert_allclose(pair_apply(pa2, t13(e(i), e(k)), e(j)), b, atol=1e-12)
                np.testing.assert_allclose(pair_apply(pa1, t23(e(j), e(k)), e(i)), b, atol=1e-12)


@given(seeds)
def test_lift_is_a_homomorphism(seed):
    rng = np.random.default_rng(seed)
    ctx, _ = random_context(rng)
    for p in ctx.pairings.values():
        a, c = crandn(rng, 4, 4), crandn(rng, 4, 4)
        b, d = crandn(rng, 2, 2), crandn(rng, 2, 2)
        np.testing.assert_allclose(pair_lift(p, a, b) @ pair_lift(p, c, d), pair_lift(p, a @ c, b @ d), atol=1e-9)
        np.testing.assert_allclose(pair_lift(p, np.eye(4), np.eye(2)), np.eye(8), atol=1e-12)


@given(seeds)
def test_lift_acts_on_applied_states(seed):
    rng = np.random.default_rng(seed)
    ctx, _ = random_context(rng)
    p = ctx.pairing(A1_A2B)
    u, v = crandn(rng, 4, 4), crandn(rng, 2, 2)
    x, y = random_state(rng, 4), random_state(rng, 2)
    np.testing.assert_allclose(p.lift(u, v) @ p.apply(x, y), p.apply(u @ x, v @ y), atol=1e-9)


@given(seeds)
def test_applied_unit_states_have_unit_norm(seed):
    rng = np.random.default_rng(seed)
    ctx, _ = random_context(rng)
    for p in ctx.pairings.values():
        phi = p.apply(random_state(rng, 4), random_state(rng, 2))
        assert abs(np.linalg.norm(phi) - 1) < 1e-12


def test_canonical_pairings_are_permutations():
    t = lib.tensor1()
    ctx = standard_context_3q(t, t, t)
    # with canonical pairwise operators every twist is a permutation matrix
    for p in ctx.pairings.values():
        tw = p.op.twist
        assert set(np.round(np.abs(tw).ravel(), 12)) <= {0.0, 1.0}
    np.testing.assert_array_equal(ctx.pairing(B_A1A2).op.twist, np.eye(8))


def test_rebase_examples(rng):
    ctx, _ = random_context(rng)
    src, dst = ctx.pairing(B_A1A2), ctx.pairing(A1_A2B)
    # product-basis index q = left*2 + right; B(A1A2) slot (A1 A2) then B
    # pair q=0b011 in src (A1A2=01, B=1) is global b_011; in dst (A2B=11, A1=0) it is q=0b110
    c = np.zeros(8)
    c[0b011] = 1
    out = rebase(c, src, dst)
    assert np.argmax(np.abs(out)) == 0b110
    for _ in range(5):
        v = crandn(rng, 8)
        np.testing.assert_allclose(dst.from_coefficients(rebase(v, src, dst)), src.from_coefficients(v), atol=1e-12)
        np.testing.assert_allclose(rebase(rebase(v, src, dst), dst, src), v, atol=1e-12)
    m = crandn(rng, 8, 8)
    lhs = dst.permutation() @ rebase(m, src, dst) @ dst.permutation().conj().T
    rhs = src.permutation() @ m @ src.permutation().conj().T
    np.testing.assert_allclose(lhs, rhs, atol=1e-12)


def test_rebase_rejects_foreign_pairing(rng):
    ctx, _ = random_context(rng)
    other = make_pairing("x", (Part("A1"), Part("A2"), Part("C")), ("A1", "A2"), ("C",))
    with pytest.raises(ContextMismatch):
        rebase(np.ones(8), ctx.pairing(B_A1A2), other)


def test_type_checks():
    t23 = TensorProductOperator(TensorType(2, 3), np.eye(6))
    with pytest.raises(TypeMismatch):
        standard_context_3q(lib.tensor1(), lib.tensor1(), t23)
    parts = (Part("A"), Part("B"), Part("C", 3))
    with pytest.raises(TypeMismatch):
        make_pairing("p", parts, ("B", "C"), ("A",), lib.tensor1())
    with pytest.raises(ValueError):
        make_pairing("p", parts, ("A",), ("B",))


def test_mixed_dimensions():
    parts = (Part("A"), Part("B"), Part("C", 3))
    p = make_pairing("p", parts, ("A", "C"), ("B",))
    assert p.global_dim == 12 and p.slot_dims == (6, 2)
    # (a, c) x b lands on the lexicographic index of (a, b, c)
    for a in range(2):
        for b in range(2):
            for c in range(3):
                v = p.apply(np.eye(6)[a * 3 + c], np.eye(2)[b])
                assert np.argmax(np.abs(v)) == a * 6 + b * 3 + c
