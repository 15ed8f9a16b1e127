from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bjortho.bj import (
    State,
    bj_orthogonal_criterion,
    bj_orthogonal_minimize,
    minimize_along,
    norm_attain_set,
    rank_one_perp,
)
from bjortho.errors import ShapeMismatch, ZeroMatrix, ZeroVector
from bjortho.linalg import complex_gaussian, random_unitary

E11 = np.array([[1, 0], [0, 0]], dtype=complex)
E12 = np.array([[0, 1], [0, 0]], dtype=complex)
E22 = np.array([[0, 0], [0, 1]], dtype=complex)
I2 = np.eye(2, dtype=complex)


def test_norm_attain_examples():
    s = norm_attain_set(E11)
    assert s.dim == 1 and np.isclose(abs(s.basis[0, 0]), 1)
    assert norm_attain_set(I2).dim == 2
    A = np.array([[0, 1], [1, 1]], dtype=complex)
    s = norm_attain_set(A)
    assert s.dim == 1
    assert np.isclose(s.norm_value**2, (3 + np.sqrt(5)) / 2)
    x = s.basis[:, 0]
    assert np.allclose(A.conj().T @ A @ x, (3 + np.sqrt(5)) / 2 * x)


def test_norm_attain_zero():
    with pytest.raises(ZeroMatrix):
        norm_attain_set(np.zeros((2, 2)))


def test_criterion_examples():
    v = bj_orthogonal_criterion(E11, E12)
    assert v.state is State.ORTHOGONAL
    assert np.isclose(abs(v.witness[0]), 1)
    v = bj_orthogonal_criterion(I2, np.diag([1.0, -1.0]))
    assert v.state is State.ORTHOGONAL
    assert np.allclose(np.abs(v.witness), 1 / np.sqrt(2))
    assert bj_orthogonal_criterion(E11, E11).state is State.NOT_ORTHOGONAL


def test_criterion_zero_conventions():
    assert bj_orthogonal_criterion(np.zeros((2, 2)), E11).orthogonal
    assert bj_orthogonal_criterion(E11, np.zeros((2, 2))).orthogonal
    with pytest.raises(ShapeMismatch):
        bj_orthogonal_criterion(E11, np.eye(3))


def test_minimize_examples():
    assert bj_orthogonal_minimize(E11, E22).state is State.ORTHOGONAL
    lam, f, f0 = minimize_along(E11, E11, polish=True)
    assert f <= 1e-8 and np.isclose(lam, -1, atol=1e-8)
    assert bj_orthogonal_minimize(E11, E11).state is State.NOT_ORTHOGONAL
    _, f, _ = minimize_along(np.diag([1, 0.5]), E22, polish=True)
    assert np.isclose(f, 1.0, atol=1e-12)
    assert bj_orthogonal_minimize(np.diag([1, 0.5]), E22).state is State.ORTHOGONAL
    with pytest.raises(ShapeMismatch):
        bj_orthogonal_minimize(E11, np.eye(3))


def test_rank_one_examples():
    e1, e2 = np.array([1, 0]), np.array([0, 1])
    assert rank_one_perp(e1, e1, E22).state is State.ORTHOGONAL
    assert rank_one_perp(e1, e2, E12).state is State.NOT_ORTHOGONAL
    x = np.array([1, 1]) / np.sqrt(2)
    X = np.array([[1, 0], [-1, 0]])
    assert rank_one_perp(x, e1, X).state is State.ORTHOGONAL
    assert bj_orthogonal_criterion(np.outer(x, e1), X).state is State.ORTHOGONAL
    with pytest.raises(ZeroVector):
        rank_one_perp(np.zeros(2), e1, X)


@pytest.mark.parametrize("n", [2, 3, 4])
def test_witness_invariant(n, rng):
    for _ in range(40):
        A = complex_gaussian((n, n), rng)
        A[:, 0] = 0  # give B a chance to be orthogonal
        B = complex_gaussian((n, n), rng)
        v = bj_orthogonal_criterion(A, B)
        if v.state is State.ORTHOGONAL and v.witness is not None:
            x = v.witness
            nA, nB = np.linalg.norm(A, 2), np.linalg.norm(B, 2)
            assert np.isclose(np.linalg.norm(A @ x), nA, rtol=1e-8)
            assert abs(np.vdot(A @ x, B @ x)) <= 1e-7 * nA * nB


def test_self_orthogonality(rng):
    for n in (2, 3, 4):
        A = complex_gaussian((n, n), rng)
        assert bj_orthogonal_criterion(A, A).state is State.NOT_ORTHOGONAL
    assert bj_orthogonal_criterion(np.zeros((3, 3)), np.zeros((3, 3))).orthogonal


@settings(max_examples=60, deadline=None)
@given(
    st.integers(0, 2**32 - 1),
    st.integers(2, 4),
    st.complex_numbers(min_magnitude=0.05, max_magnitude=20, allow_nan=False, allow_infinity=False),
    st.complex_numbers(min_magnitude=0.05, max_magnitude=20, allow_nan=False, allow_infinity=False),
)
def test_homogeneity(seed, n, alpha, beta):
    rng = np.random.default_rng(seed)
    A = complex_gaussian((n, n), rng)
    B = complex_gaussian((n, n), rng)
    # project B onto the orthogonal set at a random norming vector half the time
    if seed % 2:
        x = norm_attain_set(A).basis[:, 0]
        G = np.outer(A @ x, x.conj())
        B = B - G * (np.vdot(G, B) / np.vdot(G, G))
    a = bj_orthogonal_criterion(A, B)
    b = bj_orthogonal_criterion(alpha * A, beta * B)
    if State.BORDERLINE not in (a.state, b.state):
        assert a.state == b.state


@pytest.mark.parametrize("n", [2, 3, 4])
def test_unitary_and_adjoint_invariance(n, rng):
    for t in range(40):
        A = complex_gaussian((n, n), rng)
        B = complex_gaussian((n, n), rng)
        if t % 2:
            x = norm_attain_set(A).basis[:, 0]
            G = np.outer(A @ x, x.conj())
            B = B - G * (np.vdot(G, B) / np.vdot(G, G))
        U, V = random_unitary(n, rng), random_unitary(n, rng)
        ref = bj_orthogonal_criterion(A, B).state
        for A2, B2 in ((U @ A @ V.conj().T, U @ B @ V.conj().T), (A.conj().T, B.conj().T)):
            s = bj_orthogonal_criterion(A2, B2).state
            if State.BORDERLINE not in (ref, s):
                assert s == ref


@pytest.mark.parametrize("n", [2, 3, 4])
def test_rank_one_consistency(n, rng):
    for t in range(60):
        x, y = complex_gaussian(n, rng), complex_gaussian(n, rng)
        X = complex_gaussian((n, n), rng)
        if t % 2:
            G = np.outer(x, y.conj())
            X = X - G * (np.vdot(G, X) / np.vdot(G, G))
        a = rank_one_perp(x, y, X).state
        b = bj_orthogonal_criterion(np.outer(x, y.conj()), X).state
        assert a == b


@pytest.mark.parametrize("n", [2, 3])
def test_oracles_agree_small_sample(n, rng):
    for t in range(40):
        A = complex_gaussian((n, n), rng)
        B = complex_gaussian((n, n), rng)
        if t % 2:
            x = norm_attain_set(A).basis[:, 0]
            G = np.outer(A @ x, x.conj())
            B = B - G * (np.vdot(G, B) / np.vdot(G, G))
        c, m = bj_orthogonal_criterion(A, B), bj_orthogonal_minimize(A, B)
        if State.BORDERLINE not in (c.state, m.state):
            assert c.state == m.state
