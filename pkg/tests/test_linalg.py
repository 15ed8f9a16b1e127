from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bjortho.errors import NonFinite, NonHermitian, NonSquare
from bjortho.linalg import (
    complex_gaussian,
    herm_eig,
    numrange_boundary,
    random_unitary,
    spectral_norm,
    support_function,
    svd,
    zero_in_numrange,
)

GOLDEN_HI = (3 + np.sqrt(5)) / 2
GOLDEN_LO = (3 - np.sqrt(5)) / 2


def brute_zero_in_hull(M, rng, samples=10_000):
    """0 in the convex hull of sampled ``x^* M x`` iff no angular gap reaches pi."""
    n = M.shape[0]
    X = complex_gaussian((samples, n), rng)
    X /= np.linalg.norm(X, axis=1, keepdims=True)
    z = np.einsum("ki,ij,kj->k", X.conj(), M, X)
    ang = np.sort(np.angle(z))
    gaps = np.diff(np.concatenate([ang, ang[:1] + 2 * np.pi]))
    return gaps.max() < np.pi


# herm_eig


def test_herm_eig_diagonal():
    e = herm_eig(np.diag([2.0, 1.0]))
    assert np.allclose(e.eigenvalues, [1, 2])
    assert np.isclose(abs(e.eigenvectors[1, 0]), 1)
    assert np.isclose(abs(e.eigenvectors[0, 1]), 1)


def test_herm_eig_swap():
    assert np.allclose(herm_eig(np.array([[0, 1], [1, 0]])).eigenvalues, [-1, 1])


def test_herm_eig_gram():
    B = np.array([[0, 1], [1, 1]], dtype=complex)
    assert np.allclose(herm_eig(B.conj().T @ B).eigenvalues, [GOLDEN_LO, GOLDEN_HI], atol=1e-14)


def test_herm_eig_errors():
    with pytest.raises(NonHermitian):
        herm_eig(np.array([[0, 1], [0, 0]]))
    with pytest.raises(NonFinite):
        herm_eig(np.array([[np.nan, 0], [0, 1]]))
    with pytest.raises(NonSquare):
        herm_eig(np.ones((2, 3)))


@pytest.mark.parametrize("n", [1, 2, 5, 16])
def test_herm_eig_reconstruction(n, rng):
    for _ in range(20):
        G = complex_gaussian((n, n), rng)
        H = G + G.conj().T
        e = herm_eig(H)
        Q, w = e.eigenvectors, e.eigenvalues
        assert np.all(np.diff(w) >= 0)
        assert np.linalg.norm(H - (Q * w) @ Q.conj().T) <= 1e-10 * np.linalg.norm(H, 2)
        assert np.allclose(Q.conj().T @ Q, np.eye(n), atol=1e-12)


# svd


def test_svd_matrix_unit():
    s = svd(np.array([[1, 0], [0, 0]]))
    assert np.allclose(s.singular_values, [1, 0])
    assert np.isclose(abs(s.left_vectors[0, 0]), 1)
    assert np.allclose(s.right_vectors[:, 0], [1, 0])


def test_svd_golden():
    s = svd(np.array([[0, 1], [1, 1]]))
    assert np.allclose(s.singular_values**2, [GOLDEN_HI, GOLDEN_LO], atol=1e-14)
    assert s.singular_values[0] > s.singular_values[1]


def test_svd_unitary(rng):
    assert np.allclose(svd(random_unitary(2, rng)).singular_values, [1, 1], atol=1e-14)


def test_svd_nonfinite():
    with pytest.raises(NonFinite):
        svd(np.array([[np.inf, 0], [0, 1]]))


@pytest.mark.parametrize("shape", [(3, 3), (4, 2), (2, 5)])
def test_svd_invariants(shape, rng):
    for _ in range(20):
        A = complex_gaussian(shape, rng)
        s = svd(A)
        assert np.all(np.diff(s.singular_values) <= 0)
        assert np.linalg.norm(A - s.reconstruct()) <= 1e-10 * s.singular_values[0]
        V = s.right_vectors
        lead = V[np.argmax(np.abs(V) > 1e-12, axis=0), np.arange(V.shape[1])]
        assert np.allclose(lead.imag, 0, atol=1e-15) and np.all(lead.real >= 0)
        top = np.linalg.eigvalsh(A.conj().T @ A)[-1]
        assert abs(spectral_norm(A) - np.sqrt(top)) <= 1e-10 * np.sqrt(top)


# numerical range


def test_zero_in_numrange_examples():
    v = zero_in_numrange(np.diag([1.0, -1.0]))
    assert v.contains_zero is True
    assert abs(v.value) <= 1e-10
    v = zero_in_numrange(np.eye(2))
    assert v.contains_zero is False and np.isclose(v.margin, 1.0, atol=1e-10)
    v = zero_in_numrange(np.array([[0, 1], [0, 0]]))
    assert v.contains_zero is True


def test_zero_in_numrange_errors():
    with pytest.raises(NonSquare):
        zero_in_numrange(np.ones((2, 3)))
    with pytest.raises(ValueError):
        zero_in_numrange(np.eye(2), grid=8)


def test_nilpotent_disc():
    # W(E12) is the disc of radius 1/2 about 0
    h = support_function(np.array([[0, 1], [0, 0]]), np.linspace(0, 2 * np.pi, 50))
    assert np.allclose(h, 0.5, atol=1e-14)


@pytest.mark.parametrize("n", [2, 3, 4])
def test_support_periodic(n, rng):
    for _ in range(10):
        M = complex_gaussian((n, n), rng)
        h0, h1 = support_function(M, [0.0, 2 * np.pi])
        assert abs(h0 - h1) <= 1e-12 * spectral_norm(M)


@pytest.mark.parametrize("n", [2, 3])
def test_zero_in_numrange_matches_brute_force(n, rng):
    checked = 0
    for _ in range(60):
        M = complex_gaussian((n, n), rng) + complex_gaussian(1, rng)[0] * 1.5 * np.eye(n)
        v = zero_in_numrange(M)
        if abs(v.margin) <= 1e-6:
            continue
        checked += 1
        assert v.contains_zero == brute_zero_in_hull(M, rng), v
    assert checked >= 50


def test_witness_is_certified(rng):
    for _ in range(50):
        M = complex_gaussian((3, 3), rng)
        v = zero_in_numrange(M)
        if v.contains_zero and v.point is not None:
            assert np.isclose(np.linalg.norm(v.point), 1)
            assert abs(np.vdot(v.point, M @ v.point)) <= 1e-10


def test_boundary_points_on_range():
    thetas, pts = numrange_boundary(np.diag([1.0, -1.0]), 90)
    assert len(thetas) == len(pts) == 90
    assert np.allclose(pts.imag, 0, atol=1e-14)
    assert np.all(np.abs(pts.real) <= 1 + 1e-14)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32 - 1), st.floats(0.1, 10), st.floats(0, 2 * np.pi))
def test_numrange_rotation_and_scaling(seed, scale, phi):
    M = complex_gaussian((3, 3), np.random.default_rng(seed))
    a = zero_in_numrange(M)
    b = zero_in_numrange(scale * np.exp(1j * phi) * M)
    if abs(a.margin) > 1e-6 * spectral_norm(M):
        assert a.contains_zero == b.contains_zero
        assert np.isclose(b.margin, scale * a.margin, rtol=1e-8, atol=1e-12)
