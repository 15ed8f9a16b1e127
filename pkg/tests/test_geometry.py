from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bjortho.bj import State, bj_orthogonal_criterion
from bjortho.errors import DegenerateParams, NotInForm, NotMember, ShapeMismatch, ZeroMatrix, ZeroVector
from bjortho.geometry import (
    OutgoingSpaceSpec,
    bpm_pairing_closed_form,
    certifies_non_left_symmetry,
    construct_Bpm,
    ellipse_hausdorff,
    lastrow_svd_check,
    left_symmetric_falsify,
    line_angle,
    locally_dependent_equiv,
    random_lastrow_matrix,
    rank_one_ellipse,
    reduced_frame_matrix,
    right_symmetric_check,
    scalar_fit_residual,
)
from bjortho.linalg import complex_gaussian, random_unitary, svd


def unit(n, k):
    e = np.zeros(n, dtype=complex)
    e[k] = 1
    return e


def E(n, i, j):
    return np.outer(unit(n, i), unit(n, j))


def unit_pair(rng):
    v = complex_gaussian(2, rng)
    v /= np.linalg.norm(v)
    return v[0], v[1]


# outgoing spaces and left-symmetry falsification


def test_outgoing_space_membership():
    V = OutgoingSpaceSpec.first_row_zeros(3, 1)
    assert V.k == 2
    assert V.contains(E(3, 0, 0)) and not V.contains(E(3, 0, 2))
    X = np.ones((3, 3), dtype=complex)
    assert V.contains(V.project(X))
    with pytest.raises(ValueError):
        OutgoingSpaceSpec(3, ((np.zeros(3), unit(3, 0)),))


def test_falsify_examples():
    rep = left_symmetric_falsify(E(3, 0, 0), OutgoingSpaceSpec.first_row_zeros(3, 1), trials=2000, seed=1)
    assert not rep.falsified
    A = E(3, 0, 0) + 0.5 * E(3, 1, 1)
    rep = left_symmetric_falsify(A, OutgoingSpaceSpec.first_row_zeros(3, 2), trials=2000, seed=1)
    assert rep.falsified
    assert certifies_non_left_symmetry(A, rep.counterexample, OutgoingSpaceSpec.first_row_zeros(3, 2))
    rep = left_symmetric_falsify(np.eye(2), OutgoingSpaceSpec(2), trials=200, seed=1)
    assert rep.falsified


def test_falsify_counterexample_is_genuine(rng):
    V = OutgoingSpaceSpec.first_row_zeros(4, 2)
    for _ in range(5):
        A = V.project(complex_gaussian((4, 4), rng))
        rep = left_symmetric_falsify(A, V, trials=500, seed=rng)
        assert rep.falsified
        B = rep.counterexample
        assert V.contains(B)
        assert bj_orthogonal_criterion(A, B).state is State.ORTHOGONAL
        assert bj_orthogonal_criterion(B, A).state is State.NOT_ORTHOGONAL


def test_falsify_requires_membership():
    with pytest.raises(NotMember):
        left_symmetric_falsify(E(3, 0, 1), OutgoingSpaceSpec.first_row_zeros(3, 1))


def test_falsify_transport_invariance(rng):
    V = OutgoingSpaceSpec.first_row_zeros(3, 2)
    for k in range(6):
        A = V.project(complex_gaussian((3, 3), rng)) if k % 2 else 2.0 * E(3, 0, 0)
        V0 = V if k % 2 else OutgoingSpaceSpec.first_row_zeros(3, 1)
        U, W = random_unitary(3, rng), random_unitary(3, rng)
        a = left_symmetric_falsify(A, V0, trials=300, seed=k)
        b = left_symmetric_falsify(U @ A @ W.conj().T, V0.transport(U, W), trials=300, seed=k)
        assert a.falsified == b.falsified


def test_n2_empirical(rng):
    # the three lines C E11, C E21, C E22 are never refuted inside V_2 of M_2
    V = OutgoingSpaceSpec.first_row_zeros(2, 1)
    for i, j in ((0, 0), (1, 0), (1, 1)):
        z = complex_gaussian(1, rng)[0]
        assert not left_symmetric_falsify(z * E(2, i, j), V, trials=300, seed=rng).falsified
    assert left_symmetric_falsify(E(2, 0, 0) + E(2, 1, 1), V, trials=300, seed=rng).falsified


# explicit rank-two construction


def test_bpm_norm_and_reconstruction():
    r = 1 / np.sqrt(2)
    con = construct_Bpm(r, r, 3, 1)
    assert np.isclose(np.linalg.norm(con.matrix, 2), np.sqrt(1 + r))
    assert np.abs(con.terms.reconstruct() - con.matrix).max() <= 1e-12
    assert np.allclose(con.image, con.matrix @ con.b)
    with pytest.raises(DegenerateParams):
        construct_Bpm(1, 0, 3, 1)


def test_bpm_pairing_matches_direct(rng):
    for _ in range(50):
        n = int(rng.integers(3, 6))
        c, s = unit_pair(rng)
        cy, sy = unit_pair(rng)
        sigma2 = float(rng.uniform(0.05, 0.95))
        A = reduced_frame_matrix(c, s, cy, sy, sigma2, n)
        for sign in (1, -1):
            con = construct_Bpm(c, s, n, sign)
            direct = np.vdot(A @ con.b, con.matrix @ con.b)
            assert abs(direct - bpm_pairing_closed_form(c, s, sy, sigma2, sign)) <= 1e-12
            assert bj_orthogonal_criterion(A, con.matrix).state is State.ORTHOGONAL


def test_bpm_exactly_one():
    r = 1 / np.sqrt(2)
    A = reduced_frame_matrix(r, r, r, -r, 0.5, 3)
    plus, minus = (construct_Bpm(r, r, 3, sign).matrix for sign in (1, -1))
    assert bj_orthogonal_criterion(plus, A).state is State.ORTHOGONAL
    assert bj_orthogonal_criterion(minus, A).state is State.NOT_ORTHOGONAL


# last-row matrices


def test_lastrow_examples():
    assert lastrow_svd_check(np.array([[0, 1], [1, 1]]))
    assert lastrow_svd_check(np.array([[0, 0, 1], [0, 0, 0], [1, 0, 1]]))
    with pytest.raises(NotInForm):
        lastrow_svd_check(np.array([[0, 1], [1, 0]]))
    with pytest.raises(NotInForm):
        lastrow_svd_check(np.ones((3, 3)))


@pytest.mark.parametrize("n", [2, 3, 4, 5])
def test_lastrow_random(n, rng):
    for _ in range(50):
        B = random_lastrow_matrix(n, rng)
        assert lastrow_svd_check(B)
        s = svd(B).singular_values
        assert s[0] - s[1] > 1e-7 * s[0]


# local dependence, right symmetry, angles


def test_local_dependence_examples(rng):
    A = complex_gaussian((3, 3), rng)
    assert locally_dependent_equiv(A, 3j * A)
    assert not locally_dependent_equiv(E(2, 0, 0), E(2, 0, 0) + E(2, 1, 1))
    e1, e2 = unit(2, 0), unit(2, 1)
    assert not locally_dependent_equiv(np.outer(e1, (e1 + e2).conj()), np.outer(e1, e1))
    with pytest.raises(ShapeMismatch):
        locally_dependent_equiv(np.eye(2), np.eye(3))


@pytest.mark.parametrize("rank", [1, 2, 3])
def test_local_dependence_vs_fit(rank, rng):
    for t in range(20):
        X = complex_gaussian((3, rank), rng) @ complex_gaussian((rank, 3), rng)
        Y = complex_gaussian(1, rng)[0] * X if t % 2 else complex_gaussian((3, rank), rng) @ complex_gaussian((rank, 3), rng)
        _, res = scalar_fit_residual(X, Y)
        assert locally_dependent_equiv(X, Y) == (res <= 1e-8)


def test_right_symmetric_examples(rng):
    assert right_symmetric_check(np.eye(2))
    assert not right_symmetric_check(np.diag([1, 0.5]))
    assert right_symmetric_check(np.array([[1, 1], [1, -1]]) / np.sqrt(2))
    assert right_symmetric_check(3j * random_unitary(4, rng))
    with pytest.raises(ZeroMatrix):
        right_symmetric_check(np.zeros((2, 2)))


def test_line_angle_examples():
    e1, e2 = unit(2, 0), unit(2, 1)
    assert line_angle(e1, e1) == 0
    assert np.isclose(line_angle(e1, e2), np.pi / 2)
    assert np.isclose(line_angle(e1, (e1 + e2) / np.sqrt(2)), np.pi / 4)
    with pytest.raises(ZeroVector):
        line_angle(e1, np.zeros(2))


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(2, 5), st.floats(0, 2 * np.pi))
def test_line_angle_projective(seed, n, phi):
    rng = np.random.default_rng(seed)
    x, y = complex_gaussian(n, rng), complex_gaussian(n, rng)
    a = line_angle(x, y)
    assert 0 <= a <= np.pi / 2
    assert np.isclose(line_angle(np.exp(1j * phi) * 2.5 * x, y), a, atol=1e-12)


# rank-one ellipse


def test_ellipse_examples():
    e1, e2 = unit(2, 0), unit(2, 1)
    E1 = rank_one_ellipse(e1, e1)
    assert E1.focus1 == 0 and np.isclose(E1.focus2, 1) and np.isclose(E1.minor_axis, 0)
    E2 = rank_one_ellipse(e1, e2)
    assert np.isclose(E2.focus2, 0) and np.isclose(E2.minor_axis, 1)
    x, y = np.array([3, 4]) / 5, np.array([5, 12]) / 13
    E3 = rank_one_ellipse(x, y)
    assert np.isclose(E3.focus2, 63 / 65)
    assert np.isclose(E3.minor_axis, np.sqrt(1 - (63 / 65) ** 2))
    with pytest.raises(ZeroVector):
        rank_one_ellipse(np.zeros(2), e1)


def test_ellipse_hausdorff_random(rng):
    for _ in range(30):
        n = int(rng.integers(2, 6))
        x, y = complex_gaussian(n, rng), complex_gaussian(n, rng)
        assert ellipse_hausdorff(x, y) <= 1e-6 * np.linalg.norm(x) * np.linalg.norm(y)


def test_ellipse_boundary_focal_sum(rng):
    x, y = complex_gaussian(3, rng), complex_gaussian(3, rng)
    Ell = rank_one_ellipse(x, y)
    pts = Ell.boundary(64)
    sums = np.abs(pts - Ell.focus1) + np.abs(pts - Ell.focus2)
    assert np.allclose(sums, Ell.major_axis, rtol=1e-12)
