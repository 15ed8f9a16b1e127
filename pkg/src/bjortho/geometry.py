"""Geometry of BJ orthogonality in ``M_n``.

Relative left-symmetry falsification on spaces cut out by bilinear
constraints ``v_i^* X u_i = 0``, explicit rank-two constructions, local
linear dependence, right-symmetry, line angles and the numerical range of
rank-one matrices.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from . import tolerances as tol
from .bj import State, bj_orthogonal_criterion, norm_attain_set
from .errors import (
    AmbiguousFit,
    ConstructionError,
    DegenerateParams,
    NotInForm,
    NotMember,
    ShapeMismatch,
    ZeroMatrix,
    ZeroVector,
)
from .linalg import (
    SVDResult,
    as_square,
    as_vector,
    complex_gaussian,
    spectral_norm,
    support_function,
    svd,
)

# ---------------------------------------------------------------------------
# constraint spaces


@dataclass(frozen=True)
class OutgoingSpaceSpec:
    """The subspace ``{X in M_n : v_i^* X u_i = 0 for all i}``.

    ``constraints`` holds the pairs ``(v_i, u_i)``.
    """

    n: int
    constraints: tuple = ()

    def __post_init__(self):
        cons = []
        for v, u in self.constraints:
            v, u = as_vector(v, "v"), as_vector(u, "u")
            if v.size != self.n or u.size != self.n:
                raise ShapeMismatch("constraint vectors must have the ambient dimension")
            if np.linalg.norm(v) == 0 or np.linalg.norm(u) == 0:
                raise ZeroVector("constraint vectors must be nonzero")
            cons.append((v, u))
        object.__setattr__(self, "constraints", tuple(cons))

    @classmethod
    def first_row_zeros(cls, n: int, first_col: int) -> OutgoingSpaceSpec:
        """Matrices whose first row vanishes from column ``first_col`` on (0-based)."""
        e = np.eye(n, dtype=complex)
        return cls(n, tuple((e[0], e[j]) for j in range(first_col, n)))

    @property
    def k(self) -> int:
        return len(self.constraints)

    def functionals(self) -> np.ndarray:
        """Stack of ``G_i = v_i u_i^*`` so that ``<X, G_i>_F = v_i^* X u_i``."""
        if not self.constraints:
            return np.zeros((0, self.n, self.n), dtype=complex)
        return np.stack([np.outer(v, u.conj()) for v, u in self.constraints])

    def residuals(self, X) -> np.ndarray:
        X = as_square(X, "X")
        nX = max(spectral_norm(X), tol.DELTA_ZERO)
        return np.array(
            [abs(v.conj() @ X @ u) / (np.linalg.norm(v) * np.linalg.norm(u) * nX) for v, u in self.constraints]
        )

    def contains(self, X, delta: float = tol.DELTA_MARGIN) -> bool:
        return bool(np.all(self.residuals(X) <= delta))

    def project(self, X, extra=()) -> np.ndarray:
        """Frobenius-orthogonal projection onto the space, optionally with extra functionals."""
        X = as_square(X, "X")
        G = list(self.functionals()) + [np.asarray(g, dtype=complex) for g in extra]
        if not G:
            return X.copy()
        Gm = np.stack([g.ravel() for g in G])
        coef, *_ = np.linalg.lstsq(Gm @ Gm.conj().T, Gm.conj() @ X.ravel(), rcond=None)
        return X - (coef @ Gm).reshape(X.shape)

    def transport(self, U, V) -> OutgoingSpaceSpec:
        """Image of the space under ``X -> U X V^*`` for unitary ``U, V``."""
        U, V = as_square(U, "U"), as_square(V, "V")
        return OutgoingSpaceSpec(self.n, tuple((U @ v, V @ u) for v, u in self.constraints))

    def adjoint(self) -> OutgoingSpaceSpec:
        """Image of the space under ``X -> X^*``."""
        return OutgoingSpaceSpec(self.n, tuple((u, v) for v, u in self.constraints))


class Falsification(str, Enum):
    FALSIFIED = "Falsified"
    NOT_FALSIFIED = "NotFalsified"


@dataclass(frozen=True)
class LeftSymmetryReport:
    """Outcome of a left-symmetry search.

    When falsified, ``counterexample`` is ``B`` in the space with ``A _|_ B``
    but not ``B _|_ A``; ``source`` names the construction that produced it.
    ``trials`` counts random candidates examined.
    """

    verdict: Falsification
    counterexample: np.ndarray | None
    trials: int
    source: str = ""

    @property
    def falsified(self) -> bool:
        return self.verdict is Falsification.FALSIFIED


def certifies_non_left_symmetry(A, B, V: OutgoingSpaceSpec) -> bool:
    """True iff ``B`` is in ``V``, ``A _|_ B`` (to tolerance) and ``B`` is not orthogonal to ``A``."""
    if spectral_norm(B) <= tol.DELTA_ZERO or not V.contains(B):
        return False
    if bj_orthogonal_criterion(A, B).state is State.NOT_ORTHOGONAL:
        return False
    return bj_orthogonal_criterion(B, A).state is State.NOT_ORTHOGONAL


def _complement(vectors, w):
    """Component of ``w`` orthogonal to span(vectors)."""
    if not vectors:
        return w
    Q, _ = np.linalg.qr(np.stack(vectors, axis=1))
    return w - Q @ (Q.conj().T @ w)


def _deterministic_candidates(A, V: OutgoingSpaceSpec):
    s = svd(A)
    sig, X, Y = s.singular_values, s.left_vectors, s.right_vectors
    vs = [v for v, _ in V.constraints]
    us = [u for _, u in V.constraints]
    r = int(np.sum(sig > 1e-12 * sig[0]))
    for i in range(1, r):
        x = _complement(vs, X[:, i])
        if np.linalg.norm(x) > 1e-8:
            yield "left-complement", np.outer(x, Y[:, i].conj())
        y = _complement(us, Y[:, i])
        if np.linalg.norm(y) > 1e-8:
            yield "right-complement", np.outer(X[:, i], y.conj())
        yield "lower-term", sig[i] * np.outer(X[:, i], Y[:, i].conj())
    yield "top-removed", A - sig[0] * np.outer(X[:, 0], Y[:, 0].conj())


def left_symmetric_falsify(A, V: OutgoingSpaceSpec, trials: int = 2000, seed=0) -> LeftSymmetryReport:
    """Search ``V`` for ``B`` with ``A _|_ B`` and not ``B _|_ A``.

    Deterministic rank-one and truncation candidates derived from the SVD of
    ``A`` are tried first; then up to ``trials`` random ``B`` drawn from
    ``V`` intersected with ``{B : <Bx, Ax> = 0}`` for a random unit ``x`` in
    ``M0(A)``. A negative result is evidence, not proof.
    """
    A = as_square(A, "A")
    if A.shape[0] != V.n:
        raise ShapeMismatch("matrix and constraint space have different sizes")
    if not V.contains(A):
        raise NotMember("A does not satisfy the constraints")
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    if spectral_norm(A) <= tol.DELTA_ZERO:
        return LeftSymmetryReport(Falsification.NOT_FALSIFIED, None, 0, "zero")
    for name, B in _deterministic_candidates(A, V):
        if certifies_non_left_symmetry(A, B, V):
            return LeftSymmetryReport(Falsification.FALSIFIED, B, 0, name)
    P = norm_attain_set(A).basis
    n = V.n
    for t in range(1, trials + 1):
        x = P @ complex_gaussian(P.shape[1], rng)
        x /= np.linalg.norm(x)
        G = np.outer(A @ x, x.conj())
        B = V.project(complex_gaussian((n, n), rng), extra=[G])
        if certifies_non_left_symmetry(A, B, V):
            return LeftSymmetryReport(Falsification.FALSIFIED, B, t, "random")
    return LeftSymmetryReport(Falsification.NOT_FALSIFIED, None, trials, "")


# ---------------------------------------------------------------------------
# explicit constructions


@dataclass(frozen=True)
class BpmConstruction:
    """``B = conj(c) E_{1n} - conj(s) E_{n-1,n} +/- conj(s) E_{n1} + conj(c) E_{nn}``.

    ``terms`` is the two-term SVD written in closed form; ``b`` is the unit
    vector where ``B`` attains its norm and ``image = B b``.
    """

    matrix: np.ndarray
    terms: SVDResult
    b: np.ndarray
    image: np.ndarray
    sign: int


def construct_Bpm(c: complex, s: complex, n: int, sign: int) -> BpmConstruction:
    """Build the rank-two matrix above and its closed-form SVD (0-based internally)."""
    c, s = complex(c), complex(s)
    if n < 3:
        raise ValueError("n must be at least 3")
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    if abs(c) <= 1e-15 or abs(s) <= 1e-15:
        raise DegenerateParams("c and s must both be nonzero")
    if abs(abs(c) ** 2 + abs(s) ** 2 - 1) > 1e-12:
        raise ValueError("|c|^2 + |s|^2 must equal 1")
    cb, sb, ac = c.conjugate(), s.conjugate(), abs(c)
    e = np.eye(n, dtype=complex)
    first, penult, last = e[0], e[n - 2], e[n - 1]
    B = np.zeros((n, n), dtype=complex)
    B[0, n - 1] = cb
    B[n - 2, n - 1] = -sb
    B[n - 1, 0] = sign * sb
    B[n - 1, n - 1] = cb
    l1 = (cb * ac * first - ac * sb * penult + cb * last) / (cb * np.sqrt(2))
    r1 = (sign * cb * s * first + (ac**2 + ac) * last) / (cb * np.sqrt(2 * (1 + ac)))
    l2 = (-cb * ac * first + ac * sb * penult + cb * last) / (cb * np.sqrt(2))
    r2 = (sign * cb * s * first + (ac**2 - ac) * last) / (cb * np.sqrt(2 * (1 - ac)))
    terms = SVDResult(
        np.array([np.sqrt(1 + ac), np.sqrt(1 - ac)]),
        np.stack([l1, l2], axis=1),
        np.stack([r1, r2], axis=1),
    )
    err = np.abs(terms.reconstruct() - B).max()
    if err > 1e-10:
        raise ConstructionError(f"closed-form SVD reconstructs with error {err:.3g}")
    return BpmConstruction(B, terms, r1, B @ r1, sign)


def reduced_frame_matrix(c, s, cy, sy, sigma2: float, n: int) -> np.ndarray:
    """``sigma2 E_11 + x1 y1^*`` with ``x1 = c e_{n-1} + s e_n``, ``y1 = cy e_{n-1} + sy e_n``."""
    e = np.eye(n, dtype=complex)
    x1 = c * e[n - 2] + s * e[n - 1]
    y1 = cy * e[n - 2] + sy * e[n - 1]
    return sigma2 * np.outer(e[0], e[0]) + np.outer(x1, y1.conj())


def bpm_pairing_closed_form(c, s, sy, sigma2: float, sign: int) -> complex:
    """Closed form of ``<B b, A b> = (A b)^* (B b)`` for the construction above."""
    c, s, sy = complex(c), complex(s), complex(sy)
    return c.conjugate() * s.conjugate() * (sign * sigma2 * c + abs(s) ** 2 * sy) / (2 * abs(c))


def _lastrow_form(B) -> np.ndarray:
    B = as_square(B, "B")
    n = B.shape[0]
    if n < 2:
        raise NotInForm("need n >= 2")
    scale = np.abs(B).max(initial=0.0)
    inner = B[: n - 1, : n - 1]
    if scale == 0 or np.abs(inner).max(initial=0.0) > 1e-12 * scale:
        raise NotInForm("entries outside the last row and column must vanish")
    for i, j in ((0, n - 1), (n - 1, 0), (n - 1, n - 1)):
        if abs(B[i, j]) <= 1e-12 * scale:
            raise NotInForm(f"entry ({i}, {j}) must be nonzero")
    return B


def lastrow_svd_check(B) -> bool:
    """For ``B = x e_n^* + e_n y^*`` with nonzero corner entries: simple top singular
    value and both leading SVD terms with a nonzero (1,1) entry."""
    B = _lastrow_form(B)
    s = svd(B)
    sig, U, V = s.singular_values, s.left_vectors, s.right_vectors
    d = tol.DELTA_MARGIN * sig[0]
    if not sig[0] > sig[1] + d:
        return False
    return all(abs(sig[i] * U[0, i] * np.conj(V[0, i])) > d for i in (0, 1))


def random_lastrow_matrix(n: int, rng) -> np.ndarray:
    """Random ``x e_n^* + e_n y^*`` with nonzero (1,n), (n,1), (n,n) entries."""
    B = np.zeros((n, n), dtype=complex)
    B[:, n - 1] = complex_gaussian(n, rng)
    B[n - 1, :] = complex_gaussian(n, rng)
    return B


# ---------------------------------------------------------------------------
# local linear dependence, right symmetry, angles


def _parallel(a, b, scale, delta) -> bool:
    na, nb = np.linalg.norm(a), np.linalg.norm(b)
    za, zb = na <= delta * scale, nb <= delta * scale
    if za or zb:
        return za and zb
    # sine of the angle between the lines
    r = a - b * (np.vdot(b, a) / nb**2)
    return np.linalg.norm(r) <= delta * na


def scalar_fit_residual(A, B) -> tuple[complex, float]:
    """Least-squares ``mu`` with ``A ~ mu B`` and the relative residual ``||A - mu B|| / ||A||``."""
    nB2 = np.vdot(B, B).real
    mu = np.vdot(B, A) / nB2 if nB2 > 0 else 0j
    nA = np.linalg.norm(A)
    return complex(mu), float(np.linalg.norm(A - mu * B) / nA) if nA > 0 else 0.0


def _kernel(A, rel=1e-10):
    s = svd(A)
    sig = s.singular_values
    keep = sig <= rel * max(sig[0], tol.DELTA_ZERO)
    return list(s.right_vectors[:, keep].T)


def locally_dependent_equiv(A, B, trials: int = 32, seed=0, delta: float = tol.DELTA_MARGIN) -> bool:
    """True iff ``Ay`` and ``By`` span the same line (or both vanish) for every probe ``y``.

    Probes are random vectors, the standard basis and the kernels of ``A``
    and ``B``. The answer is cross-checked against ``A in C B``, which is
    equivalent; a disagreement raises ``AmbiguousFit``.
    """
    A, B = as_square(A, "A"), as_square(B, "B")
    if A.shape != B.shape:
        raise ShapeMismatch("shapes differ")
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    n = A.shape[0]
    probes = list(np.eye(n, dtype=complex)) + list(complex_gaussian((trials, n), rng))
    nA, nB = np.linalg.norm(A), np.linalg.norm(B)
    if nA > 0:
        probes += _kernel(A)
    if nB > 0:
        probes += _kernel(B)
    scale = max(spectral_norm(A), spectral_norm(B), tol.DELTA_ZERO)
    probe_ok = all(_parallel(A @ y, B @ y, scale * np.linalg.norm(y), delta) for y in probes)
    if (nA == 0) != (nB == 0):
        fit_ok = False
    elif nA == 0:
        fit_ok = True
    else:
        fit_ok = scalar_fit_residual(A, B)[1] <= delta
    if probe_ok != fit_ok:
        raise AmbiguousFit(f"probe test says {probe_ok}, scalar fit says {fit_ok}")
    return probe_ok


def right_symmetric_check(A, delta: float = tol.DELTA_MARGIN) -> bool:
    """True iff ``A`` is a scalar multiple of a unitary."""
    A = as_square(A, "A")
    s1 = spectral_norm(A)
    if s1 <= tol.DELTA_ZERO:
        raise ZeroMatrix("matrix is zero")
    D = A.conj().T @ A / s1**2 - np.eye(A.shape[0])
    return spectral_norm(D) <= delta


def line_angle(x, y) -> float:
    """Angle in ``[0, pi/2]`` between the lines spanned by ``x`` and ``y``."""
    x, y = as_vector(x, "x"), as_vector(y, "y")
    nx, ny = np.linalg.norm(x), np.linalg.norm(y)
    if nx == 0 or ny == 0:
        raise ZeroVector("vectors must be nonzero")
    return float(np.arccos(np.clip(abs(np.vdot(x, y)) / (nx * ny), 0.0, 1.0)))


# ---------------------------------------------------------------------------
# numerical range of rank-one matrices


@dataclass(frozen=True)
class RankOneEllipse:
    """Elliptic disc ``W(x y^*)``: foci ``0`` and ``y^* x``, full axes ``major``, ``minor``."""

    focus1: complex
    focus2: complex
    minor_axis: float
    major_axis: float
    extra: dict = field(default_factory=dict, compare=False)

    @property
    def center(self) -> complex:
        return (self.focus1 + self.focus2) / 2

    def support(self, thetas) -> np.ndarray:
        """Support function ``max Re(e^{-i theta} z)`` over the disc."""
        t = np.asarray(thetas, dtype=float)
        d = self.focus2 - self.focus1
        phi = np.angle(d) if abs(d) > 0 else 0.0
        a, b = self.major_axis / 2, self.minor_axis / 2
        rot = t - phi
        return np.real(np.exp(-1j * t) * self.center) + np.sqrt(
            (a * np.cos(rot)) ** 2 + (b * np.sin(rot)) ** 2
        )

    def boundary(self, samples: int = 360) -> np.ndarray:
        d = self.focus2 - self.focus1
        u = d / abs(d) if abs(d) > 0 else 1.0
        t = np.arange(samples) * (2 * np.pi / samples)
        return self.center + u * (self.major_axis / 2 * np.cos(t) + 1j * self.minor_axis / 2 * np.sin(t))


def ellipse_hausdorff(x, y, samples: int = 720) -> float:
    """Hausdorff distance between ``W(x y^*)`` and the analytic ellipse.

    For compact convex sets this equals ``sup |h_1 - h_2|`` over directions;
    the supremum is taken over ``samples`` equally spaced angles.
    """
    x, y = as_vector(x, "x"), as_vector(y, "y")
    E = rank_one_ellipse(x, y, validate=False)
    t = np.arange(samples) * (2 * np.pi / samples)
    hW = support_function(np.outer(x, y.conj()), t)
    return float(np.max(np.abs(hW - E.support(t))))


def rank_one_ellipse(x, y, validate: bool = True) -> RankOneEllipse:
    """Analytic description of ``W(x y^*)``, optionally checked on 64 directions."""
    x, y = as_vector(x, "x"), as_vector(y, "y")
    if x.size != y.size:
        raise ShapeMismatch("x and y must have the same length")
    nx, ny = np.linalg.norm(x), np.linalg.norm(y)
    if nx == 0 or ny == 0:
        raise ZeroVector("vectors must be nonzero")
    f2 = complex(np.vdot(y, x))
    minor = float(np.sqrt(max((nx * ny) ** 2 - abs(f2) ** 2, 0.0)))
    E = RankOneEllipse(0j, f2, minor, float(nx * ny))
    if validate:
        d = ellipse_hausdorff(x, y, samples=64)
        if d > 1e-6 * nx * ny:
            raise ConstructionError(f"ellipse deviates from the numerical range by {d:.3g}")
        E.extra["hausdorff64"] = d
    return E
