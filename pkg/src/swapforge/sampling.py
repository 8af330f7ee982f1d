"""Random states, elements, and POVMs for the verification suite and
property tests.  All generators take an explicit numpy Generator so runs
are reproducible from a seed.
"""

from __future__ import annotations

import numpy as np

from .states import Povm, PovmElement, PureState

__all__ = [
    "random_element",
    "random_povm",
    "random_product_rank1_element",
    "random_pure_state",
    "random_rank1_element",
    "random_separable_element",
    "random_unitary",
]


def _ginibre(rng: np.random.Generator, rows: int, cols: int) -> np.ndarray:
    return rng.normal(size=(rows, cols)) + 1j * rng.normal(size=(rows, cols))


def random_unitary(rng: np.random.Generator, n: int) -> np.ndarray:
    """Haar-distributed unitary via QR with phase-fixed diagonal."""
    q, r = np.linalg.qr(_ginibre(rng, n, n))
    phases = np.diag(r).copy()
    phases /= np.abs(phases)
    return q * phases


def random_pure_state(rng: np.random.Generator, dims) -> PureState:
    dims = tuple(int(d) for d in dims)
    v = _ginibre(rng, int(np.prod(dims)), 1)[:, 0]
    return PureState(v / np.linalg.norm(v), dims)


def random_element(rng: np.random.Generator, d: int = 2, rank: int | None = None) -> PovmElement:
    """Random PSD element on a d x d pair, scaled to maximum eigenvalue <= 1."""
    dim = d * d
    k = rank if rank is not None else dim
    g = _ginibre(rng, dim, k)
    m = g @ g.conj().T
    m /= np.linalg.eigvalsh(m)[-1]
    m *= rng.uniform(0.2, 1.0)
    return PovmElement(m)


def random_rank1_element(rng: np.random.Generator, d: int = 2) -> PovmElement:
    v = _ginibre(rng, d * d, 1)[:, 0]
    v /= np.linalg.norm(v)
    weight = rng.uniform(0.1, 1.0)
    return PovmElement(weight * np.outer(v, v.conj()))


def random_product_rank1_element(rng: np.random.Generator, d: int = 2) -> PovmElement:
    """Rank-one element of product form |u><u| x |v><v| (unentangled)."""
    u = _ginibre(rng, d, 1)[:, 0]
    u /= np.linalg.norm(u)
    v = _ginibre(rng, d, 1)[:, 0]
    v /= np.linalg.norm(v)
    weight = rng.uniform(0.1, 1.0)
    return PovmElement(weight * np.kron(np.outer(u, u.conj()), np.outer(v, v.conj())))


def random_separable_element(
    rng: np.random.Generator, d: int = 2, terms: int = 3
) -> PovmElement:
    """Random mixture of product PSD factors (separable, hence unentangled)."""
    dim = d * d
    m = np.zeros((dim, dim), dtype=complex)
    for _ in range(terms):
        ga = _ginibre(rng, d, d)
        gb = _ginibre(rng, d, d)
        m += rng.uniform(0.1, 1.0) * np.kron(ga @ ga.conj().T, gb @ gb.conj().T)
    m /= np.linalg.eigvalsh(m)[-1]
    return PovmElement(m)


def random_povm(rng: np.random.Generator, d: int = 2, n_elements: int = 3) -> Povm:
    """Random complete POVM: random PSD seeds conjugated by the inverse
    square root of their sum."""
    dim = d * d
    seeds = []
    for _ in range(n_elements):
        g = _ginibre(rng, dim, dim)
        seeds.append(g @ g.conj().T)
    total = sum(seeds)
    w, v = np.linalg.eigh(total)
    inv_root = (v / np.sqrt(w)) @ v.conj().T
    mats = [inv_root @ s @ inv_root for s in seeds]
    return Povm.from_matrices(mats, local_dim=d)
