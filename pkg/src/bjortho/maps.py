"""Maps that preserve BJ orthogonality in both directions, and tools to test them.

* canonical isometries: block permutations with ``X -> U f(X) V^*`` per
  block, where ``f`` is the identity, adjoint, conjugate or transpose;
* maps of the form ``X -> Psi(gamma(X) P(X) X)`` with an isometry ``Psi``,
  a unimodular scalar ``gamma(X)`` and a positive central ``P(X)`` that
  keeps the set of norming blocks;
* two maps that preserve orthogonality without being of the simple
  "isometry times scalar function" form;
* a randomized strong-preservation tester and recovery of the row/column
  structure of a rank-one preserving map on ``M_n``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Callable

import numpy as np

from . import tolerances as tol
from .bj import State, minimize_along
from .cstar import (
    AlgebraElement,
    AlgebraShape,
    CentralElement,
    alg_norm_and_norming_blocks,
    as_shape,
    bj_orthogonal_alg,
    central_gauge_check,
)
from .errors import (
    AmbiguousFit,
    GaugeViolation,
    InvalidShape,
    NonPositiveGauge,
    NotRankOnePreserving,
    ShapeMismatch,
    SizeViolation,
)
from .linalg import as_square, complex_gaussian, random_unitary, svd
from .sampling import engineered_partner, random_element


class Flavor(str, Enum):
    ID = "id"
    ADJOINT = "adjoint"
    CONJUGATE = "conjugate"
    TRANSPOSE = "transpose"

    @property
    def linear(self) -> bool:
        return self in (Flavor.ID, Flavor.TRANSPOSE)

    @property
    def row_preserving(self) -> bool:
        return self in (Flavor.ID, Flavor.CONJUGATE)

    def __call__(self, X: np.ndarray) -> np.ndarray:
        if self is Flavor.ID:
            return X
        if self is Flavor.ADJOINT:
            return X.conj().T
        if self is Flavor.CONJUGATE:
            return X.conj()
        return X.T


@dataclass(frozen=True)
class BlockIsometry:
    U: np.ndarray
    V: np.ndarray
    flavor: Flavor = Flavor.ID

    def __post_init__(self):
        U, V = as_square(self.U, "U"), as_square(self.V, "V")
        if U.shape != V.shape:
            raise ShapeMismatch("U and V must have the same size")
        eye = np.eye(U.shape[0])
        for name, W in (("U", U), ("V", V)):
            if np.abs(W.conj().T @ W - eye).max() > 1e-10:
                raise ValueError(f"{name} is not unitary")
        object.__setattr__(self, "U", U)
        object.__setattr__(self, "V", V)
        object.__setattr__(self, "flavor", Flavor(self.flavor))

    def __call__(self, X: np.ndarray) -> np.ndarray:
        return self.U @ self.flavor(X) @ self.V.conj().T

    def inverse(self) -> BlockIsometry:
        U, V, f = self.U, self.V, self.flavor
        if f is Flavor.ID:
            return BlockIsometry(U.conj().T, V.conj().T, f)
        if f is Flavor.ADJOINT:
            return BlockIsometry(V.conj().T, U.conj().T, f)
        if f is Flavor.CONJUGATE:
            return BlockIsometry(U.T, V.T, f)
        return BlockIsometry(V.T, U.T, f)


@dataclass(frozen=True)
class IsometrySpec:
    """Block isometries followed by a permutation of equal-size blocks.

    Output block ``k`` is ``U_j f_j(X_j) V_j^*`` with ``j = perm[k]``.
    """

    shape: AlgebraShape
    perm: tuple[int, ...]
    blocks: tuple[BlockIsometry, ...]

    def __post_init__(self):
        shape = as_shape(self.shape)
        perm = tuple(int(p) for p in self.perm)
        object.__setattr__(self, "shape", shape)
        object.__setattr__(self, "perm", perm)
        object.__setattr__(self, "blocks", tuple(self.blocks))
        if sorted(perm) != list(range(len(shape))) or len(self.blocks) != len(shape):
            raise ShapeMismatch("permutation and block list must match the shape")
        for k, j in enumerate(perm):
            if shape[k] != shape[j]:
                raise SizeViolation(f"block {j} of size {shape[j]} cannot move to slot {k} of size {shape[k]}")
        for b, n in zip(self.blocks, shape):
            if b.U.shape != (n, n):
                raise ShapeMismatch("block isometry has the wrong size")

    @classmethod
    def identity(cls, shape) -> IsometrySpec:
        shape = as_shape(shape)
        return cls(shape, tuple(range(len(shape))), tuple(BlockIsometry(np.eye(n), np.eye(n)) for n in shape))

    @property
    def linearity(self) -> str:
        """``linear``, ``conjugate-linear`` or ``mixed``."""
        lin = {b.flavor.linear for b in self.blocks}
        if lin == {True}:
            return "linear"
        if lin == {False}:
            return "conjugate-linear"
        return "mixed"

    def inverse(self) -> IsometrySpec:
        inv = [0] * len(self.perm)
        for k, j in enumerate(self.perm):
            inv[j] = k
        # slot m of the image holds b_{perm[m]}(X[perm[m]]): undo it in place, then move it back
        blocks = tuple(self.blocks[j].inverse() for j in self.perm)
        return IsometrySpec(self.shape, tuple(inv), blocks)


def apply_isometry(spec: IsometrySpec, X: AlgebraElement) -> AlgebraElement:
    """Apply the flavor and ``U (.) V^*`` blockwise, then permute the blocks."""
    if X.shape != spec.shape:
        raise ShapeMismatch("element and isometry have different shapes")
    Y = [b(x) for b, x in zip(spec.blocks, X.blocks)]
    return AlgebraElement(spec.shape, [Y[j] for j in spec.perm])


def random_isometry_spec(shape, rng, linearity: str | None = None) -> IsometrySpec:
    """Random spec; ``linearity`` is ``linear``, ``conjugate-linear`` or ``mixed``."""
    shape = as_shape(shape)
    if linearity is None:
        linearity = ("linear", "conjugate-linear")[int(rng.integers(2))]
    pools = {
        "linear": (Flavor.ID, Flavor.TRANSPOSE),
        "conjugate-linear": (Flavor.CONJUGATE, Flavor.ADJOINT),
        "mixed": tuple(Flavor),
    }[linearity]
    perm = list(range(len(shape)))
    for n in set(shape):
        idx = [k for k in range(len(shape)) if shape[k] == n]
        shuffled = list(rng.permutation(idx))
        for k, j in zip(idx, shuffled):
            perm[k] = int(j)
    blocks = tuple(
        BlockIsometry(random_unitary(n, rng), random_unitary(n, rng), pools[int(rng.integers(len(pools)))])
        for n in shape
    )
    return IsometrySpec(shape, tuple(perm), blocks)


# ---------------------------------------------------------------------------
# maps


class MapKind(str, Enum):
    ISOMETRY = "Isometry"
    THEOREM_FORM = "TheoremForm"
    GAUGE_COUNTEREXAMPLE = "GaugeCounterexample"
    ABELIAN_COUNTEREXAMPLE = "AbelianCounterexample"
    CUSTOM = "Custom"


@dataclass(frozen=True)
class BJMap:
    """A map on an algebra with an optional explicit inverse.

    ``probes(rng)`` samples elements from the set where the map departs from
    its generic behaviour; the preservation tester pairs them with
    structured partners.
    """

    kind: MapKind
    shape: AlgebraShape
    forward: Callable[[AlgebraElement], AlgebraElement]
    inverse: Callable[[AlgebraElement], AlgebraElement] | None = None
    probes: Callable[[np.random.Generator], AlgebraElement] | None = None
    description: str = ""

    def __call__(self, X: AlgebraElement) -> AlgebraElement:
        return self.forward(X)


def isometry_map(spec: IsometrySpec) -> BJMap:
    inv = spec.inverse()
    return BJMap(
        MapKind.ISOMETRY,
        spec.shape,
        lambda X: apply_isometry(spec, X),
        lambda Y: apply_isometry(inv, Y),
        description=f"isometry ({spec.linearity})",
    )


def custom_map(shape, fn, inverse=None, description: str = "") -> BJMap:
    return BJMap(MapKind.CUSTOM, as_shape(shape), fn, inverse, description=description)


def compose(outer: BJMap, inner: BJMap) -> BJMap:
    """``outer o inner``; the kind is Isometry only when both are."""
    if outer.shape != inner.shape:
        raise ShapeMismatch("maps act on different shapes")
    kind = MapKind.ISOMETRY if outer.kind == inner.kind == MapKind.ISOMETRY else MapKind.CUSTOM
    inv = None
    if outer.inverse is not None and inner.inverse is not None:
        inv = lambda Y: inner.inverse(outer.inverse(Y))  # noqa: E731
    return BJMap(kind, outer.shape, lambda X: outer(inner(X)), inv, description="composition")


@dataclass(frozen=True)
class GaugeSpec:
    """Unimodular scalar ``gamma(X)`` and positive central ``P(X)``.

    ``solve`` optionally inverts ``X -> gamma(X) P(X) X``.
    """

    gamma: Callable[[AlgebraElement], complex]
    P: Callable[[AlgebraElement], CentralElement]
    solve: Callable[[AlgebraElement], AlgebraElement] | None = None

    @classmethod
    def trivial(cls, shape) -> GaugeSpec:
        shape = as_shape(shape)
        return cls(lambda X: 1.0 + 0j, lambda X: CentralElement.one(shape), lambda Y: Y)

    def apply(self, X: AlgebraElement) -> AlgebraElement:
        g = complex(self.gamma(X))
        if abs(abs(g) - 1) > 1e-12:
            raise GaugeViolation(f"gamma(X) = {g} is not unimodular")
        P = self.P(X)
        try:
            ok = central_gauge_check(X, P)
        except NonPositiveGauge as exc:
            raise GaugeViolation(str(exc)) from exc
        if not ok:
            raise GaugeViolation(f"P(X) = {P.scalars} changes the norming blocks")
        return P.apply(X) * g


def build_theorem_map(psi: IsometrySpec, gauge: GaugeSpec) -> BJMap:
    """``X -> Psi(gamma(X) P(X) X)``, with gauge invariants checked on every call."""
    inv_spec = psi.inverse()
    inverse = None
    if gauge.solve is not None:
        inverse = lambda Y: gauge.solve(apply_isometry(inv_spec, Y))  # noqa: E731
    return BJMap(
        MapKind.THEOREM_FORM,
        psi.shape,
        lambda X: apply_isometry(psi, gauge.apply(X)),
        inverse,
        description="isometry after central gauge",
    )


def _lead_phase(B: np.ndarray) -> complex:
    """Phase of the first entry whose modulus is (nearly) maximal."""
    flat = B.ravel()
    mag = np.abs(flat)
    k = int(np.argmax(mag >= (1 - 1e-9) * mag.max()))
    return flat[k] / mag[k]


def random_gauge(shape, rng) -> GaugeSpec:
    """Random invertible gauge built from scale and phase invariants of ``X``.

    ``gamma`` and the exponents below are functions of the norming set and
    of the phase-normalised first norming block, both unchanged by the
    gauge itself, so the map can be inverted. Off the norming set
    ``p_k = r_k^(a_k - 1)`` with ``r_k = ||X_k|| / ||X|| < 1`` and
    ``a_k in [0.5, 2]``, so the scaled ratio ``r_k^a_k`` stays below 1.
    """
    shape = as_shape(shape)
    l = len(shape)
    w_gamma = [complex_gaussian((n, n), rng) for n in shape]
    w_exp = [[complex_gaussian((n, n), rng) for n in shape] for _ in range(l)]
    freq = float(rng.uniform(1, 4))
    jump = float(rng.uniform(0.2, 1.5))
    zero_scale = rng.uniform(0.5, 2.0, l)

    def invariants(X: AlgebraElement):
        norm, N = alg_norm_and_norming_blocks(X)
        if not N:
            return norm, N, 0.0, np.ones(l)
        k0 = min(N)
        Z = X.blocks[k0] / (norm * _lead_phase(X.blocks[k0]))
        feat = float(np.real(np.vdot(w_gamma[k0], Z))) + 0.37 * len(N)
        expo = np.array([0.5 + 1.5 * (np.tanh(np.real(np.vdot(w_exp[k][k0], Z))) + 1) / 2 for k in range(l)])
        return norm, N, feat, expo

    def gamma(X):
        _, N, feat, _ = invariants(X)
        # a discontinuous piece: the gauge need not be continuous
        return np.exp(1j * (freq * feat + jump * np.floor(2 * feat)))

    def P(X):
        norm, N, _, expo = invariants(X)
        p = []
        for k in range(l):
            nk = np.linalg.norm(X.blocks[k], 2)
            if k in N:
                p.append(1.0)
            elif nk == 0:
                p.append(float(zero_scale[k]))
            else:
                p.append(float((nk / norm) ** (expo[k] - 1)))
        return CentralElement(shape, p)

    def solve(Y: AlgebraElement) -> AlgebraElement:
        norm, N, feat, expo = invariants(Y)
        if not N:
            return Y
        g = np.exp(1j * (freq * feat + jump * np.floor(2 * feat)))
        blocks = []
        for k in range(l):
            Yk = Y.blocks[k] / g
            nk = np.linalg.norm(Yk, 2)
            if k in N or nk == 0:
                blocks.append(Yk if k in N else Yk / zero_scale[k])
            else:
                r = (nk / norm) ** (1 / expo[k])
                blocks.append(Yk / r ** (expo[k] - 1))
        return AlgebraElement(shape, blocks)

    return GaugeSpec(gamma, P, solve)


def _bisect_inverse(f, y, lo=0.0, hi=1.0, iters=200):
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        if f(mid) < y:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def counterexample_gauge_map(shape=(2, 2), gamma=None, gamma_inv=None, atol: float = 1e-12) -> BJMap:
    """Map fixing everything except ``I + rI`` (0 < r < 1), sent to ``I + gamma(r) I``.

    ``gamma`` must be a bijection of (0, 1); the default is ``r -> r^2``.
    Without ``gamma_inv`` the inverse is found by bisection, which assumes
    ``gamma`` increasing.
    """
    shape = as_shape(shape)
    if len(shape) != 2 or min(shape) < 2:
        raise InvalidShape("needs exactly two blocks, each of size at least 2")
    if gamma is None:
        gamma, gamma_inv = (lambda r: r * r), np.sqrt
    for r in np.linspace(0.01, 0.99, 25):
        g = gamma(r)
        if not 0 < g < 1:
            raise ValueError(f"gamma({r}) = {g} leaves (0, 1)")
    if gamma_inv is None:
        gamma_inv = lambda y: _bisect_inverse(gamma, y)  # noqa: E731
    n1, n2 = shape

    def ratio(X: AlgebraElement):
        X1, X2 = X.blocks
        if np.abs(X1 - np.eye(n1)).max() > atol:
            return None
        r = X2[0, 0].real
        if np.abs(X2 - r * np.eye(n2)).max() > atol or not 0 < r < 1:
            return None
        return r

    def make(fn):
        def apply(X: AlgebraElement) -> AlgebraElement:
            if X.shape != shape:
                raise ShapeMismatch("wrong shape")
            r = ratio(X)
            if r is None:
                return X
            return AlgebraElement(shape, [np.eye(n1), fn(r) * np.eye(n2)])

        return apply

    def probes(rng):
        return AlgebraElement(shape, [np.eye(n1), float(rng.uniform(0.02, 0.98)) * np.eye(n2)])

    return BJMap(
        MapKind.GAUGE_COUNTEREXAMPLE,
        shape,
        make(gamma),
        make(gamma_inv),
        probes,
        "fixes all elements except I + rI, 0 < r < 1",
    )


def counterexample_abelian_map(variant: str = "homogeneous", atol: float = 1e-12) -> BJMap:
    """Map on ``C + C`` (shape (1, 1)) negating the second coordinate on an exceptional set.

    ``homogeneous``: the exceptional set is the cone ``lam (1, r i)``,
    ``lam != 0`` complex and ``r`` real; ``lam (1, ri) -> lam (1, -ri)``.
    ``literal``: only the line ``(1, ri)`` itself. This variant does not
    preserve orthogonality: ``(1, i)`` and ``(2, 2i)`` are not orthogonal,
    but ``(1, -i)`` is orthogonal to ``(2, 2i)``.
    """
    shape = AlgebraShape((1, 1))
    if variant not in ("homogeneous", "literal"):
        raise ValueError("variant must be 'homogeneous' or 'literal'")

    def exceptional(a: complex, b: complex) -> bool:
        if variant == "literal":
            return abs(a - 1) <= atol and abs(b.real) <= atol
        if abs(a) <= atol:
            return False
        return abs((b * a.conjugate()).real) <= atol * abs(a) * max(abs(b), abs(a))

    def apply(X: AlgebraElement) -> AlgebraElement:
        if X.shape != shape:
            raise ShapeMismatch("wrong shape")
        a, b = complex(X.blocks[0][0, 0]), complex(X.blocks[1][0, 0])
        if exceptional(a, b):
            return AlgebraElement(shape, [[[a]], [[-b]]])
        return X

    def probes(rng):
        r = float(rng.choice([1.0, -1.0, rng.uniform(-3, 3)]))
        lam = 1.0 if variant == "literal" else complex_gaussian((), rng) * 2
        return AlgebraElement(shape, [[[lam]], [[lam * 1j * r]]])

    desc = "negates the second coordinate on " + ("the cone C(1, iR)" if variant == "homogeneous" else "the line (1, iR)")
    return BJMap(MapKind.ABELIAN_COUNTEREXAMPLE, shape, apply, apply, probes, desc)


def best_scalar_fit(X: AlgebraElement, Y: AlgebraElement) -> tuple[complex, float]:
    """``min_c ||Y - c X||`` (spectral norm) and the minimising ``c``."""
    lam, f, _ = minimize_along(Y.embed(), X.embed(), polish=True)
    return -lam, f


# ---------------------------------------------------------------------------
# strong preservation testing


@dataclass
class PreservationReport:
    pairs: int = 0
    violations: int = 0
    borderline: int = 0
    orthogonal: int = 0
    by_category: dict = field(default_factory=dict)
    examples: list = field(default_factory=list)

    @property
    def evaluated(self) -> int:
        return self.pairs - self.borderline

    @property
    def borderline_rate(self) -> float:
        return self.borderline / self.pairs if self.pairs else 0.0

    @property
    def passed(self) -> bool:
        return self.violations == 0

    def record(self, category: str, before, after, pair) -> None:
        self.pairs += 1
        cat = self.by_category.setdefault(category, {"pairs": 0, "violations": 0, "borderline": 0, "orthogonal": 0})
        cat["pairs"] += 1
        if State.BORDERLINE in (before.state, after.state):
            self.borderline += 1
            cat["borderline"] += 1
            return
        if before.state is State.ORTHOGONAL:
            self.orthogonal += 1
            cat["orthogonal"] += 1
        if before.state != after.state:
            self.violations += 1
            cat["violations"] += 1
            if len(self.examples) < 5:
                self.examples.append((category, pair, before.state, after.state))

    def summary(self) -> str:
        return (
            f"pairs={self.pairs} violations={self.violations} borderline={self.borderline} "
            f"orthogonal={self.orthogonal}"
        )


def _aligned_partner(p: AlgebraElement, rng, orthogonal: bool) -> AlgebraElement:
    """``X`` with two tied rank-one norming blocks, phased so that ``X _|_ p`` (or not).

    With ``M0`` spanned by ``x_0, x_1`` in blocks 0 and 1, the relevant
    numerical range is the segment between ``c_k = <p x_k, X x_k>``;
    rotating block 1 makes ``c_1`` point opposite to ``c_0``.
    """
    shape = p.shape
    X = random_element(shape, rng, kind="rank-one")
    blocks = [np.array(b) for b in X.blocks]
    l = len(shape)
    if l < 2:
        return X
    k0, k1 = rng.choice(l, size=2, replace=False)
    top = X.norm()
    for k in range(l):
        nk = np.linalg.norm(blocks[k], 2)
        if k in (k0, k1):
            x, y = complex_gaussian(shape[k], rng), complex_gaussian(shape[k], rng)
            blocks[k] = top * np.outer(x / np.linalg.norm(x), (y / np.linalg.norm(y)).conj())
        elif nk >= top * 0.95:
            blocks[k] *= 0.5
    c = []
    for k in (k0, k1):
        s = svd(blocks[k])
        xk = s.right_vectors[:, 0]
        c.append(np.vdot(blocks[k] @ xk, p.blocks[k] @ xk))
    if abs(c[0]) > 0 and abs(c[1]) > 0:
        target = -c[0] / abs(c[0]) if orthogonal else np.exp(2j * np.pi * rng.random())
        # scaling block k1 by w multiplies c_1 by conj(w)
        w = np.conj(target / (c[1] / abs(c[1])))
        blocks[k1] = blocks[k1] * w
    return AlgebraElement(shape, blocks)


def _probe_pairs(phi: BJMap, p: AlgebraElement, rng):
    shape = p.shape
    mu = complex_gaussian((), rng) * 2
    if rng.random() < 0.3:
        mu = float(rng.choice([-1.0, 1.0])) * float(rng.uniform(0.2, 3))
    choice = int(rng.integers(10))
    if choice == 0:
        return "probe-random", (p, random_element(shape, rng))
    if choice == 1:
        return "probe-random", (random_element(shape, rng), p)
    if choice == 2:
        return "probe-engineered", (p, engineered_partner(p, rng, True))
    if choice == 3:
        return "probe-engineered", (p, engineered_partner(p, rng, False))
    if choice == 4:
        return "probe-aligned", (_aligned_partner(p, rng, True), p)
    if choice == 5:
        return "probe-aligned", (_aligned_partner(p, rng, False), p)
    if choice == 6:
        return "probe-multiple", (p, p * mu) if rng.random() < 0.5 else (p * mu, p)
    if choice == 7:
        q = phi(p) * mu
        return "probe-image", (p, q) if rng.random() < 0.5 else (q, p)
    if choice == 8:
        return "probe-probe", (p, phi.probes(rng))
    # orthogonal partner with p on the right
    B = engineered_partner(p, rng, orthogonal=True)
    return "probe-engineered", (B, p) if rng.random() < 0.5 else (p, B)


def strong_preservation_test(phi: BJMap, shape=None, n_pairs: int = 1000, seed=0) -> PreservationReport:
    """Count violations of ``A _|_ B <=> phi(A) _|_ phi(B)`` over sampled pairs.

    Pairs are drawn from uniform random elements, engineered orthogonal and
    non-orthogonal pairs, and (when the map provides probes) structured pairs
    around its exceptional set. Pairs with a borderline verdict on either
    side are skipped and counted separately.
    """
    shape = as_shape(shape) if shape is not None else phi.shape
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    report = PreservationReport()
    base = ("random", "engineered-orthogonal", "engineered-nonorthogonal")
    for _ in range(n_pairs):
        if phi.probes is not None and rng.random() < 0.4:
            cat, (A, B) = _probe_pairs(phi, phi.probes(rng), rng)
        else:
            cat = base[int(rng.integers(3))]
            A = random_element(shape, rng)
            if cat == "random":
                B = random_element(shape, rng)
            else:
                B = engineered_partner(A, rng, cat == "engineered-orthogonal")
            if rng.random() < 0.5:
                A, B = (B, A) if cat == "random" else (A, B)
        before = bj_orthogonal_alg(A, B)
        after = bj_orthogonal_alg(phi(A), phi(B))
        report.record(cat, before, after, (A, B))
    return report


# ---------------------------------------------------------------------------
# structure recovery on M_n


@dataclass(frozen=True)
class RecoveredStructure:
    """Row/column behaviour and unitaries of a rank-one preserving map on ``M_n``.

    The fitted model is ``X -> U f(X) V^*`` up to a scalar on each rank-one
    input; ``residual`` is the largest projective distance between the map
    and the model over the probes.
    """

    flavor: Flavor
    U: np.ndarray
    V: np.ndarray
    residual: float

    @property
    def row_preserving(self) -> bool:
        return self.flavor.row_preserving

    @property
    def conjugate_linear(self) -> bool:
        return not self.flavor.linear

    def spec(self) -> IsometrySpec:
        n = self.U.shape[0]
        return IsometrySpec((n,), (0,), (BlockIsometry(self.U, self.V, self.flavor),))


def phase_gauge_residual(W: np.ndarray, W_true: np.ndarray) -> float:
    """``min_D ||W - W_true D||_F`` over unimodular diagonal ``D``."""
    d = np.einsum("ij,ij->j", W_true.conj(), W)
    D = np.where(np.abs(d) > 0, d / np.maximum(np.abs(d), 1e-300), 1.0)
    return float(np.linalg.norm(W - W_true * D))


def _projective_distance(Y, M) -> float:
    """Sine of the angle between the lines through ``Y`` and ``M``."""
    ny, nm = np.linalg.norm(Y), np.linalg.norm(M)
    if ny == 0 or nm == 0:
        return 1.0
    r = Y - M * (np.vdot(M, Y) / nm**2)
    return float(np.linalg.norm(r) / ny)


def _factors(Y):
    s = svd(Y)
    return s.left_vectors[:, 0], s.right_vectors[:, 0], s.singular_values


def _parallel(a, b, eps=1e-6) -> bool:
    return abs(abs(np.vdot(a, b)) - 1) <= eps


def _fit_row_preserving(G, n):
    e = np.eye(n, dtype=complex)
    U_hat = np.stack([_factors(G(np.outer(e[i], e[0])))[0] for i in range(n)], axis=1)
    V_hat = np.stack([_factors(G(np.outer(e[0], e[j])))[1] for j in range(n)], axis=1)
    w_cols = [_factors(G(np.outer(e[0] + e[i], e[0])))[0] for i in range(1, n)]
    w_rows = [_factors(G(np.outer(e[0], e[0] + e[j])))[1] for j in range(1, n)]
    U, V = U_hat.copy(), V_hat.copy()
    for i, w in enumerate(w_cols, start=1):
        rho = (U_hat[:, i].conj() @ w) / (U_hat[:, 0].conj() @ w)
        U[:, i] *= rho / abs(rho)
    for j, w in enumerate(w_rows, start=1):
        rho = (V_hat[:, j].conj() @ w) / (V_hat[:, 0].conj() @ w)
        V[:, j] *= rho / abs(rho)
    # a complex probe separates linear from conjugate-linear behaviour
    a = _factors(G(np.outer(e[0] + 1j * e[1], e[0])))[0]
    c = U.conj().T @ a
    ratio = c[1] / c[0]
    if abs(ratio - 1j) <= 1e-6:
        flavor = Flavor.ID
    elif abs(ratio + 1j) <= 1e-6:
        flavor = Flavor.CONJUGATE
    else:
        raise AmbiguousFit(f"complex probe ratio {ratio:.6g} is neither i nor -i")
    return flavor, U, V


def recover_rank_one_structure(phi, n: int | None = None, n_probes: int = 16, seed=0) -> RecoveredStructure:
    """Recover ``(flavor, U, V)`` with ``phi(x y^*) ~ U f(x y^*) V^*`` on rank-ones.

    ``phi`` is a BJMap on shape ``(n,)`` or a callable on ``n x n`` arrays.
    Rows ``x (C^n)^*`` must go to rows (identity/conjugate flavors) or to
    columns (transpose/adjoint flavors).
    """
    if isinstance(phi, BJMap):
        if len(phi.shape) != 1:
            raise ShapeMismatch("structure recovery needs a single full matrix block")
        n = phi.shape[0]
        shape = phi.shape

        def F(X):
            return phi(AlgebraElement(shape, [X])).blocks[0]

    else:
        if n is None:
            raise ValueError("n is required for a plain callable")
        F = lambda X: as_square(phi(np.asarray(X, dtype=complex)))  # noqa: E731
    if n < 3:
        raise InvalidShape("structure recovery requires n >= 3")
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    e = np.eye(n, dtype=complex)
    probes = [np.outer(e[i], e[j]) for i in range(n) for j in range(n)]
    probes += [np.outer(complex_gaussian(n, rng), complex_gaussian(n, rng)) for _ in range(n_probes)]
    for X in probes:
        sig = svd(F(X)).singular_values
        if sig[0] <= tol.DELTA_ZERO or sig[1] > 1e-8 * sig[0]:
            raise NotRankOnePreserving("a rank-one input has an image that is not rank one")
    a00, b00, _ = _factors(F(probes[0]))
    a01, b01, _ = _factors(F(np.outer(e[0], e[1])))
    a10, b10, _ = _factors(F(np.outer(e[1], e[0])))
    if _parallel(a00, a01) and _parallel(b00, b10):
        flavor, U, V = _fit_row_preserving(F, n)
    elif _parallel(b00, b01) and _parallel(a00, a10):
        flavor, U, V = _fit_row_preserving(lambda X: F(X.T), n)
        flavor = Flavor.TRANSPOSE if flavor is Flavor.ID else Flavor.ADJOINT
    else:
        raise NotRankOnePreserving("rows are not mapped onto rows or columns")
    residual = max(_projective_distance(F(X), U @ flavor(X) @ V.conj().T) for X in probes)
    if residual > 1e-6:
        raise AmbiguousFit(f"model residual {residual:.3g} exceeds 1e-6")
    return RecoveredStructure(flavor, U, V, residual)
