"""Seeded random draws: unitaries, subspaces, states, SU(2) settings."""

from __future__ import annotations

import numpy as np

from .lattice import Subspace


def rng_from(seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def complex_gaussian(rng, *shape) -> np.ndarray:
    rng = rng_from(rng)
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2)


def random_unitary(d: int, rng=None) -> np.ndarray:
    """Haar-distributed unitary (QR of a Ginibre matrix with phase fix)."""
    q, r = np.linalg.qr(complex_gaussian(rng, d, d))
    phases = np.diag(r) / np.abs(np.diag(r))
    return q * phases


def random_subspace(d: int, k: int, rng=None) -> Subspace:
    if not 0 <= k <= d:
        raise ValueError(f"subspace dimension {k} not in [0, {d}]")
    if k == 0:
        return Subspace.zero(d)
    return Subspace(random_unitary(d, rng)[:, :k])


def random_pure_state(d: int, rng=None) -> np.ndarray:
    v = complex_gaussian(rng, d)
    return v / np.linalg.norm(v)


def random_density_matrix(d: int, rng=None, rank: int | None = None) -> np.ndarray:
    """Random mixed state ``G G^dagger / Tr`` with ``G`` a ``d x rank`` Ginibre matrix."""
    g = complex_gaussian(rng, d, rank or d)
    rho = g @ g.conj().T
    return rho / np.trace(rho).real
