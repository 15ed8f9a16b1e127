"""Dense complex linear algebra primitives.

Hermitian eigendecomposition, SVD with a deterministic phase convention,
spectral norms, and the numerical-range support function together with a
certified test for ``0 in W(M)``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import tolerances as tol
from .errors import NonFinite, NonHermitian, NonSquare

_TINY = np.finfo(float).tiny


def as_matrix(M, name: str = "matrix") -> np.ndarray:
    """Return ``M`` as a finite 2-d complex array."""
    a = np.asarray(M, dtype=complex)
    if a.ndim != 2:
        raise ValueError(f"{name} must be 2-dimensional, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise NonFinite(f"{name} has non-finite entries")
    return a


def as_vector(x, name: str = "vector") -> np.ndarray:
    a = np.asarray(x, dtype=complex)
    if a.ndim == 2 and 1 in a.shape:
        a = a.reshape(-1)
    if a.ndim != 1:
        raise ValueError(f"{name} must be 1-dimensional, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise NonFinite(f"{name} has non-finite entries")
    return a


def as_square(M, name: str = "matrix") -> np.ndarray:
    a = as_matrix(M, name)
    if a.shape[0] != a.shape[1]:
        raise NonSquare(f"{name} must be square, got shape {a.shape}")
    return a


def adjoint(M: np.ndarray) -> np.ndarray:
    return np.conj(np.swapaxes(M, -1, -2))


@dataclass(frozen=True)
class HermEigen:
    """Eigenvalues in ascending order with orthonormal eigenvector columns."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray


@dataclass(frozen=True)
class SVDResult:
    """Thin SVD ``A = sum_i s_i u_i v_i^*``.

    Each right vector has its first nonzero entry real and non-negative.
    """

    singular_values: np.ndarray
    left_vectors: np.ndarray
    right_vectors: np.ndarray

    def reconstruct(self) -> np.ndarray:
        U, s, V = self.left_vectors, self.singular_values, self.right_vectors
        return (U * s) @ adjoint(V)

    @property
    def norm(self) -> float:
        return float(self.singular_values[0]) if self.singular_values.size else 0.0


def herm_eig(H) -> HermEigen:
    """Eigendecomposition of a Hermitian matrix (LAPACK ``heevd``)."""
    H = as_square(H, "H")
    scale = np.linalg.norm(H)
    if np.linalg.norm(H - H.conj().T) > tol.EPS_HERM * scale:
        raise NonHermitian("matrix is not Hermitian within tolerance")
    w, V = np.linalg.eigh(0.5 * (H + H.conj().T))
    return HermEigen(w, V)


def _first_nonzero_phase(V: np.ndarray, thresh: float = 1e-12) -> np.ndarray:
    """Unimodular phase of the first entry of each column exceeding ``thresh``."""
    mags = np.abs(V)
    big = mags > thresh * np.maximum(mags.max(axis=0, keepdims=True), _TINY)
    idx = np.argmax(big, axis=0)
    lead = V[idx, np.arange(V.shape[1])]
    ph = np.ones(V.shape[1], dtype=complex)
    nz = np.abs(lead) > 0
    ph[nz] = lead[nz] / np.abs(lead[nz])
    return ph


def svd(A) -> SVDResult:
    """Thin SVD with singular values descending and a fixed phase convention."""
    A = as_matrix(A, "A")
    U, s, Vh = np.linalg.svd(A, full_matrices=False)
    V = Vh.conj().T
    ph = _first_nonzero_phase(V).conj()
    return SVDResult(s, U * ph, V * ph)


def spectral_norm(A) -> float:
    A = np.asarray(A, dtype=complex)
    if A.size == 0:
        return 0.0
    return float(np.linalg.norm(A, 2))


def spectral_norms(stack: np.ndarray) -> np.ndarray:
    """Spectral norms of a stack ``(..., m, n)`` via the top eigenvalue of the Gram matrix."""
    G = adjoint(stack) @ stack
    top = np.linalg.eigvalsh(G)[..., -1]
    return np.sqrt(np.maximum(top, 0.0))


# ---------------------------------------------------------------------------
# numerical range


def _rotated_hermitian_parts(M: np.ndarray, thetas: np.ndarray) -> np.ndarray:
    ph = np.exp(-1j * np.asarray(thetas))[:, None, None]
    return 0.5 * (ph * M + np.conj(ph) * M.conj().T)


def support_function(M, thetas) -> np.ndarray:
    """``h(theta) = lambda_max(Re(e^{-i theta} M))`` evaluated at each angle."""
    M = as_square(M, "M")
    thetas = np.atleast_1d(np.asarray(thetas, dtype=float))
    return np.linalg.eigvalsh(_rotated_hermitian_parts(M, thetas))[:, -1]


def support_points(M, thetas) -> tuple[np.ndarray, np.ndarray]:
    """Boundary points of ``W(M)`` attaining the support value at each angle.

    Returns ``(points, vectors)`` with ``vectors[k]`` a unit top eigenvector of
    the rotated Hermitian part and ``points[k] = v^* M v``.
    """
    M = as_square(M, "M")
    thetas = np.atleast_1d(np.asarray(thetas, dtype=float))
    _, V = np.linalg.eigh(_rotated_hermitian_parts(M, thetas))
    vecs = V[:, :, -1]
    pts = np.einsum("ki,ij,kj->k", vecs.conj(), M, vecs)
    return pts, vecs


@dataclass(frozen=True)
class NumRangeVerdict:
    """Outcome of the ``0 in W(M)`` test.

    ``contains_zero`` is True, False, or None for an undecided (borderline)
    case. ``margin = -min_theta h(theta)`` is the signed distance from 0 to
    ``W(M)``: positive when 0 lies outside, negative when inside. When the
    answer is True a unit vector ``point`` with ``point^* M point = value``
    close to zero is usually attached.
    """

    contains_zero: bool | None
    margin: float
    theta_min: float
    point: np.ndarray | None = None
    value: complex | None = None

    @property
    def borderline(self) -> bool:
        return self.contains_zero is None


_GOLD = (np.sqrt(5.0) - 1.0) / 2.0


def _golden_min(f, a: float, b: float, xtol: float) -> tuple[float, float]:
    c = b - _GOLD * (b - a)
    d = a + _GOLD * (b - a)
    fc, fd = f(c), f(d)
    while b - a > xtol:
        if fc <= fd:
            b, d, fd = d, c, fc
            c = b - _GOLD * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + _GOLD * (b - a)
            fd = f(d)
    return (c, fc) if fc <= fd else (d, fd)


def _refine_minimum(M, thetas, h, refine_tol, lipschitz, max_starts=6, points=33):
    """Zoom into the smallest local minima of the sampled support function.

    Each round samples ``points`` angles across the current bracket of every
    start in one batched eigen call, then shrinks the bracket 16-fold around
    the best sample, until the bracket is below ``refine_tol``.
    """
    step = thetas[1] - thetas[0]
    k0 = int(np.argmin(h))
    best_t, best_h = float(thetas[k0]), float(h[k0])
    left, right = np.roll(h, 1), np.roll(h, -1)
    local = np.flatnonzero((h <= left) & (h <= right) & (h <= best_h + lipschitz * step))
    local = local[np.argsort(h[local])][:max_starts]
    centers = thetas[local]
    offsets = np.linspace(-1.0, 1.0, points)
    width = step
    while len(centers) and width > refine_tol:
        ts = (centers[:, None] + width * offsets[None, :]).ravel()
        vals = np.linalg.eigvalsh(_rotated_hermitian_parts(M, ts))[:, -1].reshape(len(centers), points)
        j = np.argmin(vals, axis=1)
        centers = ts.reshape(len(centers), points)[np.arange(len(centers)), j]
        k = int(np.argmin(vals[np.arange(len(centers)), j]))
        if vals[k, j[k]] < best_h:
            best_t, best_h = float(centers[k]), float(vals[k, j[k]])
        width *= 2.0 / (points - 1)
    return best_h, float(np.mod(best_t, 2 * np.pi))


def _zero_point_2x2(K: np.ndarray) -> np.ndarray:
    """Unit ``w`` in C^2 with ``w^* K w = 0``, assuming 0 lies in ``W(K)``."""
    Hh = 0.5 * (K + K.conj().T)
    S = (K - K.conj().T) / 2j
    mu, Us = np.linalg.eigh(S)
    scale = max(np.linalg.norm(K), _TINY)
    if mu[1] - mu[0] <= 1e-14 * scale:
        nu, G = np.linalg.eigh(Hh)
        if nu[0] > 0 or nu[1] < 0 or nu[1] - nu[0] <= 0:
            return G[:, int(np.argmin(np.abs(nu)))]
        d = nu[1] - nu[0]
        return np.sqrt(nu[1] / d) * G[:, 0] + np.sqrt(-nu[0] / d) * G[:, 1]
    if mu[0] >= 0:
        return Us[:, 0]
    if mu[1] <= 0:
        return Us[:, 1]
    u1, u2 = Us[:, 0], Us[:, 1]
    t = np.sqrt(-mu[0] / mu[1])
    h11 = np.real(u1.conj() @ Hh @ u1)
    h22 = np.real(u2.conj() @ Hh @ u2)
    h12 = u1.conj() @ Hh @ u2
    rho = abs(h12)
    if rho <= _TINY:
        return (u1 + t * u2) / np.sqrt(1 + t * t)
    c = np.clip(-(h11 + t * t * h22) / (2 * t * rho), -1.0, 1.0)
    phi = np.arccos(c) - np.angle(h12)
    return (u1 + t * np.exp(1j * phi) * u2) / np.sqrt(1 + t * t)


def steer(M: np.ndarray, x: np.ndarray, y: np.ndarray, p: complex) -> np.ndarray:
    """Unit ``z`` in span{x, y} with ``z^* M z = p``.

    Requires ``p`` to lie in the numerical range of the compression of ``M``
    to span{x, y}, e.g. on the segment between ``x^*Mx`` and ``y^*My``.
    """
    Q, R = np.linalg.qr(np.stack([x, y], axis=1))
    if abs(R[1, 1]) <= 1e-14 * max(abs(R[0, 0]), _TINY):
        return x / np.linalg.norm(x)
    K = Q.conj().T @ M @ Q - p * np.eye(2)
    z = Q @ _zero_point_2x2(K)
    return z / np.linalg.norm(z)


def _quad(M, z):
    return complex(z.conj() @ M @ z)


def _polygon_zero_point(M, pts, vecs):
    """Try to write 0 as a point of the polygon spanned by ``pts`` and lift it."""
    m = len(pts)
    a = int(np.argmax(np.abs(pts)))
    A = pts[a]
    scale = max(float(np.abs(pts).max()), _TINY)
    cands = []
    order = np.r_[a:m, 0:a]
    B, C = pts[order[1:-1]], pts[order[2:]]
    if len(B):
        e1, e2 = B - A, C - A
        det = e1.real * e2.imag - e1.imag * e2.real
        ok = np.abs(det) > 1e-13 * scale * scale
        with np.errstate(divide="ignore", invalid="ignore"):
            beta = (-A.real * e2.imag + A.imag * e2.real) / det
            gamma = (-e1.real * A.imag + e1.imag * A.real) / det
            slack = np.minimum(np.minimum(beta, gamma), 1 - beta - gamma)
        slack = np.where(ok, slack, -np.inf)
        j = int(np.argmax(slack))
        if slack[j] >= -1e-12:
            b, c = order[1 + j], order[2 + j]
            bg = beta[j] + gamma[j]
            if bg <= 1e-15:
                cands.append(vecs[a])
            else:
                p = (beta[j] * pts[b] + gamma[j] * pts[c]) / bg
                z1 = steer(M, vecs[b], vecs[c], p)
                cands.append(steer(M, vecs[a], z1, 0.0))
    # degenerate ranges: 0 on a segment between two support points
    cross = A.real * pts.imag - A.imag * pts.real
    dot = (np.conj(A) * pts).real
    seg = (np.abs(cross) <= 1e-12 * scale * scale) & (dot < 0)
    if np.any(seg):
        j = int(np.argmin(np.where(seg, dot, np.inf)))
        cands.append(steer(M, vecs[a], vecs[j], 0.0))
    return cands


def _find_zero_point(M, thetas, pts, vecs, theta_min, step, cert_tol, rounds=6):
    """Search for a unit ``z`` with ``|z^* M z| <= cert_tol``."""
    best, best_val = None, np.inf

    def consider(z):
        nonlocal best, best_val
        v = abs(_quad(M, z))
        if v < best_val:
            best, best_val = z, v
        return v <= cert_tol

    k = int(np.argmin(np.abs(pts)))
    if consider(vecs[k]):
        return best
    width = step
    for _ in range(rounds):
        for z in _polygon_zero_point(M, pts, vecs):
            if consider(z):
                return best
        extra = theta_min + np.linspace(-width, width, 33)
        p2, v2 = support_points(M, extra)
        allt = np.concatenate([thetas, extra])
        order = np.argsort(np.mod(allt, 2 * np.pi), kind="stable")
        thetas = np.mod(allt, 2 * np.pi)[order]
        pts = np.concatenate([pts, p2])[order]
        vecs = np.concatenate([vecs, v2])[order]
        width /= 16
    return best


def zero_in_numrange(
    M,
    grid: int = 360,
    refine_tol: float = 1e-10,
    delta: float = tol.DELTA_MARGIN,
    cert_tol: float = tol.EPS_CERT,
) -> NumRangeVerdict:
    """Decide whether 0 lies in the numerical range ``W(M)``.

    The support function is sampled on a uniform angle grid and refined by
    a batched zoom around its smallest local minima. With
    ``margin = -min h``:

    * ``margin >= delta``: 0 is outside (False);
    * a unit vector with ``|z^* M z| <= cert_tol`` is found: True;
    * ``margin <= -delta``: True;
    * otherwise undecided (None).

    Degenerate ranges (segments or points through 0) have ``min h = 0``
    exactly, so they are decided by the explicit witness.
    """
    M = as_square(M, "M")
    if grid < 16:
        raise ValueError("grid must be at least 16")
    n = M.shape[0]
    if n == 0:
        raise NonSquare("empty matrix")
    if n == 1:
        c = complex(M[0, 0])
        r = abs(c)
        theta = float(np.mod(np.angle(c) + np.pi, 2 * np.pi))
        one = np.ones(1, dtype=complex)
        if r <= cert_tol:
            return NumRangeVerdict(True, r, theta, one, c)
        return NumRangeVerdict(None if r < delta else False, r, theta)

    thetas = np.arange(grid) * (2 * np.pi / grid)
    h = np.linalg.eigvalsh(_rotated_hermitian_parts(M, thetas))[:, -1]
    lip = spectral_norm(M)
    hmin, tmin = _refine_minimum(M, thetas, h, refine_tol, lip)
    margin = -hmin
    if margin >= delta:
        return NumRangeVerdict(False, margin, tmin)
    # witness polygon on a coarser subset, densified near theta_min on demand
    coarse = thetas[:: max(grid // 90, 1)]
    pts, vecs = support_points(M, coarse)
    z = _find_zero_point(M, coarse, pts, vecs, tmin, coarse[1] - coarse[0], cert_tol)
    val = _quad(M, z) if z is not None else None
    if val is not None and abs(val) <= cert_tol:
        return NumRangeVerdict(True, margin, tmin, z, val)
    if margin <= -delta:
        return NumRangeVerdict(True, margin, tmin, z, val)
    return NumRangeVerdict(None, margin, tmin, z, val)


def numrange_boundary(M, samples: int = 360) -> tuple[np.ndarray, np.ndarray]:
    """Angles and support-attaining boundary points of ``W(M)``."""
    thetas = np.arange(samples) * (2 * np.pi / samples)
    pts, _ = support_points(M, thetas)
    return thetas, pts


def random_unitary(n: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-distributed unitary via QR of a complex Gaussian matrix."""
    Z = (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / np.sqrt(2)
    Q, R = np.linalg.qr(Z)
    d = np.diag(R)
    return Q * (d / np.abs(d))


def complex_gaussian(shape, rng: np.random.Generator) -> np.ndarray:
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2)
