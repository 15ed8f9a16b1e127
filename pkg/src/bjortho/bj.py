"""Birkhoff-James orthogonality oracles for square complex matrices.

``A`` is BJ-orthogonal to ``B`` when ``||A + lam B|| >= ||A||`` for every
complex ``lam``. Two independent routes decide this:

* the criterion route: ``A _|_ B`` iff some unit ``x`` in the norm-attainment
  subspace ``M0(A)`` has ``<Ax, Bx> = 0``, i.e. iff 0 lies in the numerical
  range of the compression ``P^*(B^*A)P``;
* the minimisation route: minimise the convex function ``||A + lam B||``
  directly.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from . import tolerances as tol
from .errors import ShapeMismatch, ZeroMatrix, ZeroVector
from .linalg import (
    _golden_min,
    as_matrix,
    as_square,
    as_vector,
    herm_eig,
    spectral_norm,
    zero_in_numrange,
)


class State(str, Enum):
    ORTHOGONAL = "Orthogonal"
    NOT_ORTHOGONAL = "NotOrthogonal"
    BORDERLINE = "Borderline"

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True)
class BJVerdict:
    """Tri-state answer to ``A _|_ B``.

    The meaning of ``margin`` depends on ``method``:

    * ``criterion``: signed distance from 0 to ``W(P^*(B^*A)P)`` after scaling
      by ``||A|| ||B||``; negative or zero means orthogonal.
    * ``minimize``: ``(min ||A + lam B|| - ||A||) / ||A||``; negative means a
      descent direction exists.
    * ``rank-one``: ``|x^*Xy| / (||x|| ||y|| ||X||)``.

    ``witness`` is a unit vector ``x`` in ``M0(A)`` with ``<Ax, Bx>`` close to
    zero, present for certified orthogonal criterion verdicts.
    """

    state: State
    margin: float
    witness: np.ndarray | None = None
    method: str = "criterion"
    lam: complex | None = None
    extra: dict = field(default_factory=dict, compare=False)

    @property
    def orthogonal(self) -> bool:
        return self.state is State.ORTHOGONAL

    def __str__(self) -> str:
        return f"{self.state.value} margin={self.margin:.6g}"


@dataclass(frozen=True)
class NormingSubspace:
    """Orthonormal basis of ``M0(A) = ker(||A||^2 I - A^*A)``.

    ``tags[j]`` records the block index each basis column belongs to when the
    subspace is assembled across several summands.
    """

    ambient_dim: int
    basis: np.ndarray
    norm_value: float
    tags: tuple[int, ...] = ()

    @property
    def dim(self) -> int:
        return self.basis.shape[1]


def norm_attain_set(A, eps_rank: float = tol.EPS_RANK) -> NormingSubspace:
    """Top eigenspace of ``A^*A`` (eigenvalues within ``eps_rank`` of ``||A||^2``)."""
    A = as_matrix(A, "A")
    G = A.conj().T @ A
    eig = herm_eig(G)
    top = eig.eigenvalues[-1] if eig.eigenvalues.size else 0.0
    if top <= tol.DELTA_ZERO**2 or np.sqrt(max(top, 0.0)) <= tol.DELTA_ZERO:
        raise ZeroMatrix("matrix is zero")
    keep = eig.eigenvalues >= top * (1.0 - eps_rank)
    basis = eig.eigenvectors[:, keep]
    return NormingSubspace(A.shape[1], basis, float(np.sqrt(top)), (0,) * basis.shape[1])


def _pair(A, B) -> tuple[np.ndarray, np.ndarray]:
    A = as_square(A, "A")
    B = as_square(B, "B")
    if A.shape != B.shape:
        raise ShapeMismatch(f"shapes differ: {A.shape} vs {B.shape}")
    return A, B


def _unit(n: int) -> np.ndarray:
    e = np.zeros(n, dtype=complex)
    e[0] = 1.0
    return e


def verdict_from_subspace(
    A: np.ndarray, B: np.ndarray, sub: NormingSubspace, normB: float
) -> BJVerdict:
    """Criterion verdict given a precomputed ``M0(A)`` basis."""
    P = sub.basis
    C = (P.conj().T @ (B.conj().T @ (A @ P))) / (sub.norm_value * normB)
    nr = zero_in_numrange(C)
    extra = {"dim_m0": sub.dim}
    if nr.contains_zero is False:
        return BJVerdict(State.NOT_ORTHOGONAL, nr.margin, None, "criterion", extra=extra)
    witness = None
    if nr.point is not None and abs(nr.value) <= tol.DELTA_MARGIN:
        witness = P @ nr.point
        witness = witness / np.linalg.norm(witness)
    state = State.ORTHOGONAL if nr.contains_zero else State.BORDERLINE
    return BJVerdict(state, nr.margin, witness, "criterion", extra=extra)


def bj_orthogonal_criterion(A, B) -> BJVerdict:
    """Decide ``A _|_ B`` through the numerical range of ``P^*(B^*A)P``."""
    A, B = _pair(A, B)
    n = A.shape[0]
    normB = spectral_norm(B)
    try:
        sub = norm_attain_set(A)
    except ZeroMatrix:
        return BJVerdict(State.ORTHOGONAL, 0.0, _unit(n), "criterion")
    if normB <= tol.DELTA_ZERO:
        return BJVerdict(State.ORTHOGONAL, 0.0, sub.basis[:, 0].copy(), "criterion")
    return verdict_from_subspace(A, B, sub, normB)


def _gram_terms(A, B):
    AA = A.conj().T @ A
    AB = A.conj().T @ B
    BB = B.conj().T @ B
    return AA, AB, BB


def _norms_at(terms, lams: np.ndarray) -> np.ndarray:
    """``||A + lam B||`` for each ``lam`` via ``(A+lam B)^*(A+lam B)``."""
    AA, AB, BB = terms
    lam = lams[:, None, None]
    G = AA + lam * AB + np.conj(lam) * AB.conj().T + (np.abs(lam) ** 2) * BB
    top = np.linalg.eigvalsh(G)[:, -1]
    return np.sqrt(np.maximum(top, 0.0))


_GOLDEN_ANGLE = np.pi * (3.0 - np.sqrt(5.0))


def _pattern_search(terms, lam0, f0, step, min_step, ndir=16, max_iter=4000, stop_below=-np.inf):
    base = np.exp(2j * np.pi * np.arange(ndir) / ndir)
    rot = 1.0
    lam, f = lam0, f0
    it = 0
    while step > min_step and it < max_iter and f >= stop_below:
        it += 1
        trial = lam + step * rot * base
        vals = _norms_at(terms, trial)
        k = int(np.argmin(vals))
        if vals[k] < f:
            lam, f = trial[k], float(vals[k])
        else:
            step *= 0.5
        rot *= np.exp(1j * _GOLDEN_ANGLE)
    return lam, f


def _scan(terms, center, half_width, points, R):
    axis = np.linspace(-half_width, half_width, points)
    lams = center + (axis[:, None] + 1j * axis[None, :]).ravel()
    lams = lams[np.abs(lams) <= R]
    vals = _norms_at(terms, lams)
    k = int(np.argmin(vals))
    return lams[k], float(vals[k]), axis[1] - axis[0]


def _polish(terms, lam, f, half_width, rel_tol=1e-10):
    """Nested golden-section search on the square around ``lam``.

    Minimising a convex function over one coordinate leaves a convex
    function of the other, so this converges even where ``f`` has kinks
    that stall the pattern search.
    """
    f1 = lambda z: float(_norms_at(terms, np.array([z]))[0])  # noqa: E731

    xtol = rel_tol * half_width

    def inner(re):
        return _golden_min(lambda im: f1(re + 1j * im), lam.imag - half_width, lam.imag + half_width, xtol)

    re, _ = _golden_min(lambda r: inner(r)[1], lam.real - half_width, lam.real + half_width, xtol)
    im, val = inner(re)
    return (complex(re, im), val) if val < f else (lam, f)


def _line_min(terms, direction, t_max, rounds=12, points=33):
    """Batched zoom for ``min_t f(t * direction)`` on ``[0, t_max]`` (convex in ``t``)."""
    lo, hi = 0.0, t_max
    best_t, best = 0.0, np.inf
    for _ in range(rounds):
        ts = np.linspace(lo, hi, points)
        v = _norms_at(terms, ts * direction)
        j = int(np.argmin(v))
        if v[j] < best:
            best_t, best = float(ts[j]), float(v[j])
        step = ts[1] - ts[0]
        lo, hi = max(best_t - step, 0.0), best_t + step
    return best_t * direction, best


def _wedge_search(terms, f0, R, radii=(1e-4, 1e-6, 1e-7), samples=64, rounds=10, points=17):
    """Look for a narrow cone of descent directions at ``lam = 0``.

    Near orthogonality the set of descent directions can be an arc far
    thinner than any fixed set of search directions, so small circles
    around 0 are scanned densely (all radii in one batch) and each best
    angle is zoomed in on before a line search along the steepest one.
    """
    r = np.asarray(radii) * R
    phis = np.arange(samples) * (2 * np.pi / samples)
    vals = _norms_at(terms, (r[:, None] * np.exp(1j * phis)[None, :]).ravel()).reshape(len(r), samples)
    k = np.argmin(vals, axis=1)
    phi, best = phis[k], vals[np.arange(len(r)), k]
    width = phis[1] - phis[0]
    offsets = np.linspace(-1.0, 1.0, points)
    for _ in range(rounds):
        ts = phi[:, None] + width * offsets[None, :]
        v = _norms_at(terms, (r[:, None] * np.exp(1j * ts)).ravel()).reshape(len(r), points)
        j = np.argmin(v, axis=1)
        vj = v[np.arange(len(r)), j]
        better = vj < best
        phi = np.where(better, ts[np.arange(len(r)), j], phi)
        best = np.where(better, vj, best)
        width *= 2.0 / (points - 1)
    slopes = (best - f0) / r
    i = int(np.argmin(slopes))
    if not slopes[i] < 0:
        return 0j, f0
    return _line_min(terms, np.exp(1j * phi[i]), R)


def minimize_along(
    A, B, grid: int = 64, polish: bool = False, decide_only: bool = False
) -> tuple[complex, float, float]:
    """Minimise ``f(lam) = ||A + lam B||`` over ``|lam| <= 2||A||/||B||``.

    Returns ``(lam, min f, f(0))``. The disk is scanned at ``grid // 4``
    points per axis, then the best cell is rescanned at 4x finer spacing,
    which matches the resolution of a ``grid x grid`` scan near the
    minimiser. If that improves on ``f(0)``, a pattern search with rotating
    directions halves its step on failure down to ``1e-9`` of the disk
    radius. When the result is within ``DELTA_MARGIN`` of ``f(0)``, a dense
    search for thin descent cones at 0 follows. ``polish`` adds a nested golden-section search, for
    callers that need the minimum value itself to high accuracy rather than
    just its sign. ``decide_only`` stops the descent as soon as the value
    is below ``f(0)`` by ten times ``DELTA_MARGIN``, so the returned value
    is then only an upper bound on the minimum.
    """
    A, B = _pair(A, B)
    terms = _gram_terms(A, B)
    f0 = float(_norms_at(terms, np.zeros(1, dtype=complex))[0])
    normB = spectral_norm(B)
    if normB <= tol.DELTA_ZERO or f0 <= tol.DELTA_ZERO:
        return 0j, f0, f0
    R = 2.0 * f0 / normB
    coarse = max(grid // 4, 4)
    lam, f, h = _scan(terms, 0j, R, coarse, R)
    lam, f, h = _scan(terms, lam, h, coarse, R)
    min_step = 1e-9 * R
    stop = f0 * (1.0 - 10 * tol.DELTA_MARGIN) if decide_only and not polish else -np.inf
    if f < f0:
        lam, f = _pattern_search(terms, lam, f, h, min_step, stop_below=stop)
    else:
        lam, f = 0j, f0
    if f >= f0 * (1.0 - tol.DELTA_MARGIN):
        lam2, f2 = _wedge_search(terms, f0, R)
        if f2 < f:
            lam, f = _pattern_search(
                terms, lam2, f2, max(abs(lam2), min_step) / 4, min_step * 1e-3, stop_below=stop
            )
    if polish:
        lam, f = _polish(terms, complex(lam), f, 2 * h)
    return complex(lam), float(f), f0


def bj_orthogonal_minimize(A, B, grid: int = 64) -> BJVerdict:
    """Decide ``A _|_ B`` by minimising ``||A + lam B||`` (see ``minimize_along``).

    Because the deficit ``||A|| - min f`` is quadratic in the distance from
    orthogonality, deficits below ``EPS_RES`` count as orthogonal, those
    above ``DELTA_MARGIN`` as not orthogonal, and the band in between as
    borderline. Descent stops once the verdict is settled, so a negative
    margin reports a deficit that is certainly reached, not the largest one.
    """
    A, B = _pair(A, B)
    if spectral_norm(B) <= tol.DELTA_ZERO or spectral_norm(A) <= tol.DELTA_ZERO:
        return BJVerdict(State.ORTHOGONAL, 0.0, None, "minimize", lam=0j)
    lam, f, f0 = minimize_along(A, B, grid, decide_only=True)
    margin = (f - f0) / f0
    if margin < -tol.DELTA_MARGIN:
        state = State.NOT_ORTHOGONAL
    elif margin >= -tol.EPS_RES:
        state = State.ORTHOGONAL
    else:
        state = State.BORDERLINE
    return BJVerdict(state, float(margin), None, "minimize", lam=complex(lam))


def rank_one_perp(x, y, X) -> BJVerdict:
    """Orthogonality of the rank-one ``x y^*`` to ``X``: holds iff ``x^* X y = 0``."""
    x = as_vector(x, "x")
    y = as_vector(y, "y")
    X = as_matrix(X, "X")
    if X.shape != (x.size, y.size):
        raise ShapeMismatch(f"X has shape {X.shape}, expected {(x.size, y.size)}")
    nx, ny = np.linalg.norm(x), np.linalg.norm(y)
    if nx <= tol.DELTA_ZERO or ny <= tol.DELTA_ZERO:
        raise ZeroVector("x and y must be nonzero")
    nX = spectral_norm(X)
    w = y / ny
    if nX <= tol.DELTA_ZERO:
        return BJVerdict(State.ORTHOGONAL, 0.0, w, "rank-one")
    margin = float(abs(x.conj() @ X @ y) / (nx * ny * nX))
    if margin <= tol.DELTA_MARGIN:
        return BJVerdict(State.ORTHOGONAL, margin, w, "rank-one")
    return BJVerdict(State.NOT_ORTHOGONAL, margin, None, "rank-one")
