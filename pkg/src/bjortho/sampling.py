"""Random elements and engineered pairs for property testing.

Generic Gaussian pairs are almost never orthogonal, so the samplers below
also build elements with repeated top singular values, tied block norms and
zero blocks, and pairs made orthogonal (or not) by construction.
"""

from __future__ import annotations

import numpy as np

from .cstar import AlgebraElement, as_shape, joint_norming_subspace
from .linalg import complex_gaussian, random_unitary

ELEMENT_KINDS = ("generic", "flat", "rank-one", "sparse")


def _unit_phase(rng) -> complex:
    return complex(np.exp(2j * np.pi * rng.random()))


def flat_block(n: int, rng, top_dim: int | None = None) -> np.ndarray:
    """Unit-norm block with a ``top_dim``-fold top singular value."""
    d = int(rng.integers(1, n + 1)) if top_dim is None else top_dim
    s = np.sort(rng.uniform(0.05, 0.95, n))[::-1]
    s[:d] = 1.0
    U, V = random_unitary(n, rng), random_unitary(n, rng)
    return (U * s) @ V.conj().T


def random_element(shape, rng, kind: str | None = None) -> AlgebraElement:
    """Random element of one of the kinds in ``ELEMENT_KINDS``."""
    shape = as_shape(shape)
    kind = kind or ELEMENT_KINDS[int(rng.integers(len(ELEMENT_KINDS)))]
    if kind == "generic":
        blocks = [complex_gaussian((n, n), rng) for n in shape]
        return AlgebraElement(shape, blocks) * float(rng.uniform(0.2, 5.0))
    # structured kinds: unit-norm blocks with several tied at the top
    ties = rng.random(len(shape)) < 0.5
    ties[int(rng.integers(len(shape)))] = True
    blocks = []
    for k, n in enumerate(shape):
        if kind == "rank-one" and ties[k]:
            x, y = complex_gaussian(n, rng), complex_gaussian(n, rng)
            b = np.outer(x / np.linalg.norm(x), (y / np.linalg.norm(y)).conj())
        else:
            b = flat_block(n, rng)
        scale = 1.0 if ties[k] else float(rng.uniform(0.1, 0.9))
        if kind == "sparse" and not ties[k] and rng.random() < 0.6:
            scale = 0.0
        blocks.append(scale * _unit_phase(rng) * b)
    return AlgebraElement(shape, blocks) * float(rng.uniform(0.2, 5.0))


def witness_functional(A: AlgebraElement, x: np.ndarray) -> AlgebraElement:
    """Block-diagonal part of ``(Ax) x^*``; ``<B, G> = <Bx, Ax>`` for block-diagonal ``B``."""
    G = np.outer(A.embed() @ x, x.conj())
    return AlgebraElement.from_dense(A.shape, _block_part(A.shape, G))


def _block_part(shape, M):
    out = np.zeros_like(M)
    for o, n in zip(shape.offsets, shape):
        out[o : o + n, o : o + n] = M[o : o + n, o : o + n]
    return out


def random_norming_vector(A: AlgebraElement, rng) -> np.ndarray:
    P = joint_norming_subspace(A).basis
    x = P @ complex_gaussian(P.shape[1], rng)
    return x / np.linalg.norm(x)


def engineered_partner(A: AlgebraElement, rng, orthogonal: bool = True) -> AlgebraElement:
    """Random ``B`` with ``<Bx, Ax> = 0`` for a random unit ``x`` in ``M0(A)``.

    With ``orthogonal=False`` a multiple of the functional is added back so
    that ``<Bx, Ax> != 0``; this is a genuine non-orthogonal pair whenever
    ``M0(A)`` is one-dimensional.
    """
    x = random_norming_vector(A, rng)
    G = witness_functional(A, x)
    B = random_element(A.shape, rng)
    gg = G.inner(G).real
    B = B - G * (B.inner(G) / gg)
    if not orthogonal:
        t = float(rng.uniform(0.3, 2.0)) * _unit_phase(rng) * B.norm() / np.sqrt(gg)
        B = B + G * t
    return B


def random_pair(shape, rng, category: str | None = None):
    """A pair ``(A, B)`` and its category name."""
    cats = ("random", "engineered-orthogonal", "engineered-nonorthogonal")
    category = category or cats[int(rng.integers(len(cats)))]
    A = random_element(shape, rng)
    if category == "random":
        return A, random_element(shape, rng), category
    return A, engineered_partner(A, rng, category == "engineered-orthogonal"), category
