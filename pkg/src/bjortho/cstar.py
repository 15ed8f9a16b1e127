"""Finite-dimensional C*-algebras ``M_{n_1} + ... + M_{n_l}`` (block-diagonal).

Elements are stored block by block. The spectral norm of an element is the
largest block norm, and BJ orthogonality only sees the blocks where that
maximum is attained (the norming blocks).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from . import tolerances as tol
from .bj import BJVerdict, NormingSubspace, State, norm_attain_set, verdict_from_subspace
from .errors import NonPositiveGauge, ShapeMismatch, ZeroElement, ZeroMatrix
from .linalg import as_square, spectral_norm


@dataclass(frozen=True)
class AlgebraShape:
    """Block sizes ``(n_1, ..., n_l)``; blocks are indexed from 0."""

    block_sizes: tuple[int, ...]

    def __init__(self, block_sizes: Iterable[int]):
        sizes = tuple(int(n) for n in block_sizes)
        if not sizes or any(n < 1 for n in sizes):
            raise ValueError(f"invalid block sizes {sizes}")
        object.__setattr__(self, "block_sizes", sizes)

    def __len__(self) -> int:
        return len(self.block_sizes)

    def __iter__(self):
        return iter(self.block_sizes)

    def __getitem__(self, k: int) -> int:
        return self.block_sizes[k]

    @property
    def total(self) -> int:
        return sum(self.block_sizes)

    @property
    def offsets(self) -> tuple[int, ...]:
        return tuple(int(o) for o in np.cumsum((0,) + self.block_sizes[:-1]))

    def __repr__(self) -> str:
        return f"AlgebraShape({self.block_sizes})"


def as_shape(shape) -> AlgebraShape:
    return shape if isinstance(shape, AlgebraShape) else AlgebraShape(shape)


def has_abelian_summand(shape) -> bool:
    """True iff some summand is a 1x1 block."""
    return any(n == 1 for n in as_shape(shape))


class AlgebraElement:
    """An element ``X_1 + ... + X_l`` with ``X_k`` of size ``n_k``."""

    __slots__ = ("shape", "blocks")

    def __init__(self, shape, blocks: Sequence):
        shape = as_shape(shape)
        if len(blocks) != len(shape):
            raise ShapeMismatch(f"expected {len(shape)} blocks, got {len(blocks)}")
        bs = []
        for k, (n, b) in enumerate(zip(shape, blocks)):
            a = as_square(np.atleast_2d(np.asarray(b, dtype=complex)), f"block {k}")
            if a.shape != (n, n):
                raise ShapeMismatch(f"block {k} has shape {a.shape}, expected {(n, n)}")
            a = a.copy()
            a.setflags(write=False)
            bs.append(a)
        object.__setattr__(self, "shape", shape)
        object.__setattr__(self, "blocks", tuple(bs))

    def __setattr__(self, name, value):
        raise AttributeError("AlgebraElement is immutable")

    @classmethod
    def zeros(cls, shape) -> AlgebraElement:
        shape = as_shape(shape)
        return cls(shape, [np.zeros((n, n)) for n in shape])

    @classmethod
    def identity(cls, shape) -> AlgebraElement:
        shape = as_shape(shape)
        return cls(shape, [np.eye(n) for n in shape])

    @classmethod
    def from_matrix(cls, M) -> AlgebraElement:
        M = as_square(M)
        return cls((M.shape[0],), [M])

    @classmethod
    def from_dense(cls, shape, M, atol: float = 1e-12) -> AlgebraElement:
        """Read the diagonal blocks of ``M``; off-block entries must vanish."""
        shape = as_shape(shape)
        M = as_square(M)
        if M.shape[0] != shape.total:
            raise ShapeMismatch(f"dense size {M.shape[0]} != {shape.total}")
        X = cls(shape, [M[o : o + n, o : o + n] for o, n in zip(shape.offsets, shape)])
        if np.abs(M - X.embed()).max(initial=0.0) > atol * max(np.abs(M).max(), 1.0):
            raise ShapeMismatch("matrix is not block diagonal for this shape")
        return X

    def embed(self) -> np.ndarray:
        """Block-diagonal ``N x N`` matrix."""
        N = self.shape.total
        M = np.zeros((N, N), dtype=complex)
        for o, b in zip(self.shape.offsets, self.blocks):
            M[o : o + b.shape[0], o : o + b.shape[0]] = b
        return M

    def block_norms(self) -> np.ndarray:
        return np.array([spectral_norm(b) for b in self.blocks])

    def norm(self) -> float:
        return float(self.block_norms().max())

    def adjoint(self) -> AlgebraElement:
        return AlgebraElement(self.shape, [b.conj().T for b in self.blocks])

    def map_blocks(self, fn) -> AlgebraElement:
        return AlgebraElement(self.shape, [fn(b) for b in self.blocks])

    def _check(self, other: AlgebraElement) -> None:
        if not isinstance(other, AlgebraElement) or other.shape != self.shape:
            raise ShapeMismatch("elements have different shapes")

    def __add__(self, other: AlgebraElement) -> AlgebraElement:
        self._check(other)
        return AlgebraElement(self.shape, [a + b for a, b in zip(self.blocks, other.blocks)])

    def __sub__(self, other: AlgebraElement) -> AlgebraElement:
        self._check(other)
        return AlgebraElement(self.shape, [a - b for a, b in zip(self.blocks, other.blocks)])

    def __neg__(self) -> AlgebraElement:
        return AlgebraElement(self.shape, [-b for b in self.blocks])

    def __mul__(self, c) -> AlgebraElement:
        c = complex(c)
        return AlgebraElement(self.shape, [c * b for b in self.blocks])

    __rmul__ = __mul__

    def inner(self, other: AlgebraElement) -> complex:
        """Frobenius inner product ``sum_k tr(other_k^* X_k)``."""
        self._check(other)
        return complex(sum(np.vdot(b, a) for a, b in zip(self.blocks, other.blocks)))

    def allclose(self, other: AlgebraElement, atol: float = 1e-12) -> bool:
        self._check(other)
        return all(np.allclose(a, b, rtol=0, atol=atol) for a, b in zip(self.blocks, other.blocks))

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, AlgebraElement)
            and other.shape == self.shape
            and all(np.array_equal(a, b) for a, b in zip(self.blocks, other.blocks))
        )

    __hash__ = None

    def __repr__(self) -> str:
        return f"AlgebraElement({self.shape.block_sizes}, norm={self.norm():.6g})"


@dataclass(frozen=True)
class CentralElement:
    """Central element ``c_1 I + ... + c_l I`` acting blockwise."""

    shape: AlgebraShape
    scalars: tuple[complex, ...]

    def __init__(self, shape, scalars):
        shape = as_shape(shape)
        sc = tuple(complex(c) for c in scalars)
        if len(sc) != len(shape):
            raise ShapeMismatch(f"expected {len(shape)} scalars, got {len(sc)}")
        object.__setattr__(self, "shape", shape)
        object.__setattr__(self, "scalars", sc)

    @classmethod
    def one(cls, shape) -> CentralElement:
        shape = as_shape(shape)
        return cls(shape, [1.0] * len(shape))

    def is_positive_definite(self) -> bool:
        return all(c.imag == 0 and c.real > 0 for c in self.scalars)

    def is_unimodular(self, atol: float = 1e-12) -> bool:
        return all(abs(abs(c) - 1) <= atol for c in self.scalars)

    def apply(self, X: AlgebraElement) -> AlgebraElement:
        if X.shape != self.shape:
            raise ShapeMismatch("central element and operand have different shapes")
        return AlgebraElement(self.shape, [c * b for c, b in zip(self.scalars, X.blocks)])

    def inverse(self) -> CentralElement:
        return CentralElement(self.shape, [1 / c for c in self.scalars])


def alg_norm_and_norming_blocks(A: AlgebraElement, eps_rank: float = tol.EPS_RANK):
    """Return ``(||A||, frozenset of norming block indices)``.

    A block is norming when its norm is within relative ``eps_rank`` of the
    maximum. The zero element has norm 0 and no norming blocks.
    """
    norms = A.block_norms()
    top = float(norms.max())
    if top <= tol.DELTA_ZERO:
        return 0.0, frozenset()
    return top, frozenset(int(k) for k in np.flatnonzero(norms >= top * (1 - eps_rank)))


def joint_norming_subspace(A: AlgebraElement, eps_rank: float = tol.EPS_RANK) -> NormingSubspace:
    """Union of the per-block ``M0`` bases over the norming blocks, padded into ``C^N``."""
    norm, blocks = alg_norm_and_norming_blocks(A, eps_rank)
    if not blocks:
        raise ZeroElement("element is zero")
    cols, tags = [], []
    for k in sorted(blocks):
        sub = norm_attain_set(A.blocks[k], eps_rank)
        o = A.shape.offsets[k]
        pad = np.zeros((A.shape.total, sub.dim), dtype=complex)
        pad[o : o + A.shape[k]] = sub.basis
        cols.append(pad)
        tags += [k] * sub.dim
    return NormingSubspace(A.shape.total, np.hstack(cols), norm, tuple(tags))


def bj_orthogonal_alg(A: AlgebraElement, B: AlgebraElement) -> BJVerdict:
    """Decide ``A _|_ B`` in the direct sum using only the norming blocks of ``A``.

    The witness, when present, lives in ambient ``C^N`` coordinates and is
    supported on the norming blocks; ``extra['witness_blocks']`` lists the
    blocks it touches.
    """
    if A.shape != B.shape:
        raise ShapeMismatch("elements have different shapes")
    N = A.shape.total
    try:
        sub = joint_norming_subspace(A)
    except ZeroElement:
        e = np.zeros(N, dtype=complex)
        e[0] = 1
        return BJVerdict(State.ORTHOGONAL, 0.0, e, "criterion")
    normB = B.norm()
    if normB <= tol.DELTA_ZERO:
        return BJVerdict(State.ORTHOGONAL, 0.0, sub.basis[:, 0].copy(), "criterion")
    v = verdict_from_subspace(A.embed(), B.embed(), sub, normB)
    if v.witness is not None:
        touched = sorted(
            {
                k
                for k, o, n in zip(range(len(A.shape)), A.shape.offsets, A.shape)
                if np.linalg.norm(v.witness[o : o + n]) > 1e-12
            }
        )
        v.extra["witness_blocks"] = touched
    v.extra["norming_blocks"] = sorted(set(sub.tags))
    return v


@dataclass(frozen=True)
class Smoothness:
    """Result of the smoothness test.

    When smooth, ``block`` is the unique norming block, ``vector`` spans its
    one-dimensional ``M0``, and ``representative`` is the rank-one element
    ``(A_j x_j) x_j^*`` placed in block ``j`` with the same outgoing
    orthogonality set as ``A``.
    """

    smooth: bool
    block: int | None = None
    vector: np.ndarray | None = None
    representative: AlgebraElement | None = None

    def __bool__(self) -> bool:
        return self.smooth


def is_smooth(A: AlgebraElement) -> Smoothness:
    """Smooth iff exactly one norming block whose ``M0`` is one-dimensional."""
    _, blocks = alg_norm_and_norming_blocks(A)
    if not blocks:
        raise ZeroElement("the zero element is not smooth")
    if len(blocks) != 1:
        return Smoothness(False)
    (j,) = blocks
    try:
        sub = norm_attain_set(A.blocks[j])
    except ZeroMatrix:  # pragma: no cover - norming block is nonzero
        return Smoothness(False)
    if sub.dim != 1:
        return Smoothness(False)
    x = sub.basis[:, 0]
    rep = [np.zeros((n, n), dtype=complex) for n in A.shape]
    rep[j] = np.outer(A.blocks[j] @ x, x.conj())
    return Smoothness(True, j, x, AlgebraElement(A.shape, rep))


def central_gauge_check(A: AlgebraElement, P: CentralElement) -> bool:
    """True iff ``A`` and ``P A`` have the same norming blocks."""
    if P.shape != A.shape:
        raise ShapeMismatch("gauge and element have different shapes")
    if not P.is_positive_definite():
        raise NonPositiveGauge(f"gauge {P.scalars} is not positive definite")
    return alg_norm_and_norming_blocks(A)[1] == alg_norm_and_norming_blocks(P.apply(A))[1]
