"""The lattice of subspaces of ``C^d``: meet, join, orthocomplement, order,
the commutes relation, and Boolean subalgebras generated by orthonormal bases.

Subspaces are compared through their projectors, never their bases.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property, reduce
from itertools import combinations
from math import comb

import numpy as np

from .linalg import (
    Tolerance,
    as_cmatrix,
    frobenius_distance,
    get_tolerance,
    is_unitary,
    matrix_from_json,
    matrix_to_json,
    orthonormal_column_basis,
)

__all__ = [
    "Subspace",
    "BooleanAlgebra",
    "join",
    "meet",
    "orthocomplement",
    "leq",
    "orthogonal",
    "commutes",
    "boolean_algebra_from_basis",
    "transport_by_unitary",
    "join_all",
    "meet_all",
]

MATERIALIZE_LIMIT = 12


def _freeze(arr: np.ndarray) -> np.ndarray:
    arr = np.array(arr, dtype=np.complex128, copy=True)
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True, eq=False)
class Subspace:
    """A subspace of ``C^d`` held as a ``d x k`` orthonormal basis.

    Use :meth:`span`, :meth:`zero`, :meth:`full` or :meth:`from_projector`
    rather than the raw constructor unless the basis is already orthonormal.
    """

    basis: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "basis", _freeze(as_cmatrix(self.basis)))

    @classmethod
    def span(cls, vectors, tol: Tolerance | None = None) -> "Subspace":
        """Span of the columns of ``vectors`` (a single 1-D vector is allowed)."""
        return cls(orthonormal_column_basis(vectors, tol))

    @classmethod
    def zero(cls, d: int) -> "Subspace":
        return cls(np.zeros((d, 0), dtype=np.complex128))

    @classmethod
    def full(cls, d: int) -> "Subspace":
        return cls(np.eye(d, dtype=np.complex128))

    @classmethod
    def from_projector(cls, p, tol: Tolerance | None = None) -> "Subspace":
        tol = tol or get_tolerance()
        p = as_cmatrix(p)
        if np.linalg.norm(p @ p - p) > tol.zero_tol or np.linalg.norm(p - p.conj().T) > tol.zero_tol:
            raise ValueError("matrix is not an orthogonal projector")
        return cls.span(p, tol)

    @property
    def ambient_dim(self) -> int:
        return self.basis.shape[0]

    @property
    def dim(self) -> int:
        return self.basis.shape[1]

    @cached_property
    def projector(self) -> np.ndarray:
        b = self.basis
        return _freeze(b @ b.conj().T)

    def contains(self, v, tol: Tolerance | None = None) -> bool:
        tol = tol or get_tolerance()
        v = as_cmatrix(v)
        return float(np.linalg.norm(v - self.projector @ v)) <= tol.zero_tol * max(1.0, float(np.linalg.norm(v)))

    def same_as(self, other: "Subspace", tol: Tolerance | None = None) -> bool:
        tol = tol or get_tolerance()
        _check_dims(self, other)
        return frobenius_distance(self.projector, other.projector) <= tol.zero_tol

    def __eq__(self, other):
        if not isinstance(other, Subspace):
            return NotImplemented
        return self.ambient_dim == other.ambient_dim and self.same_as(other)

    __hash__ = None

    def __repr__(self):
        return f"Subspace(dim={self.dim}, ambient_dim={self.ambient_dim})"

    def to_json(self) -> dict:
        return {"ambient_dim": self.ambient_dim, "basis": matrix_to_json(self.basis)}

    @classmethod
    def from_json(cls, obj: dict, tol: Tolerance | None = None) -> "Subspace":
        d = int(obj["ambient_dim"])
        basis = matrix_from_json(obj["basis"])
        if basis.shape[0] != d:
            raise ValueError(f"basis has {basis.shape[0]} rows, ambient_dim is {d}")
        if basis.shape[1] == 0:
            return cls.zero(d)
        return cls.span(basis, tol)


def _check_dims(h1: Subspace, h2: Subspace) -> None:
    if h1.ambient_dim != h2.ambient_dim:
        raise ValueError(f"ambient dimension mismatch: {h1.ambient_dim} vs {h2.ambient_dim}")


def join(h1: Subspace, h2: Subspace, tol: Tolerance | None = None) -> Subspace:
    """Span of the union of ``h1`` and ``h2``."""
    _check_dims(h1, h2)
    return Subspace.span(np.hstack([h1.basis, h2.basis]), tol)


def orthocomplement(h: Subspace, tol: Tolerance | None = None) -> Subspace:
    d = h.ambient_dim
    if h.dim == 0:
        return Subspace.full(d)
    if h.dim == d:
        return Subspace.zero(d)
    # trailing left singular vectors of the basis span its complement exactly
    u, s, _ = np.linalg.svd(h.basis, full_matrices=True)
    tol = tol or get_tolerance()
    rank = int(np.count_nonzero(s > tol.rank_tol * s[0]))
    return Subspace(u[:, rank:])


def meet(h1: Subspace, h2: Subspace, tol: Tolerance | None = None) -> Subspace:
    """Intersection, computed as ``(h1^perp v h2^perp)^perp``."""
    _check_dims(h1, h2)
    return orthocomplement(join(orthocomplement(h1, tol), orthocomplement(h2, tol), tol), tol)


def join_all(subspaces, tol: Tolerance | None = None) -> Subspace:
    return reduce(lambda a, b: join(a, b, tol), subspaces)


def meet_all(subspaces, tol: Tolerance | None = None) -> Subspace:
    return reduce(lambda a, b: meet(a, b, tol), subspaces)


def leq(h1: Subspace, h2: Subspace, tol: Tolerance | None = None) -> bool:
    """Whether ``h1`` is a subspace of ``h2``."""
    tol = tol or get_tolerance()
    _check_dims(h1, h2)
    p1 = h1.projector
    return frobenius_distance(h2.projector @ p1, p1) <= tol.zero_tol


def orthogonal(h1: Subspace, h2: Subspace, tol: Tolerance | None = None) -> bool:
    tol = tol or get_tolerance()
    _check_dims(h1, h2)
    return float(np.linalg.norm(h1.projector @ h2.projector)) <= tol.zero_tol


def commutes(h1: Subspace, h2: Subspace, tol: Tolerance | None = None) -> bool:
    """Lattice-theoretic commutation: ``h1 == (h1 ^ h2) v (h1 ^ h2^perp)``."""
    _check_dims(h1, h2)
    rebuilt = join(meet(h1, h2, tol), meet(h1, orthocomplement(h2, tol), tol), tol)
    return h1.same_as(rebuilt, tol)


@dataclass(frozen=True, eq=False)
class BooleanAlgebra:
    """The ``2^d`` subspaces spanned by subsets of an orthonormal basis.

    Element ``mask`` is the span of the basis columns whose bit is set.
    Elements are materialized up front for ``d <= 12`` and built on demand
    otherwise.
    """

    generating_basis: np.ndarray
    _cache: dict = field(default_factory=dict, init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "generating_basis", _freeze(as_cmatrix(self.generating_basis)))
        if self.ambient_dim <= MATERIALIZE_LIMIT:
            for mask in range(self.size):
                self.element(mask)

    @property
    def ambient_dim(self) -> int:
        return self.generating_basis.shape[0]

    @property
    def size(self) -> int:
        return 1 << self.ambient_dim

    @property
    def full_mask(self) -> int:
        return self.size - 1

    def element(self, mask: int) -> Subspace:
        if not 0 <= mask < self.size:
            raise IndexError(f"mask {mask} out of range for d={self.ambient_dim}")
        sub = self._cache.get(mask)
        if sub is None:
            cols = [i for i in range(self.ambient_dim) if mask >> i & 1]
            sub = Subspace(self.generating_basis[:, cols])
            if self.ambient_dim <= MATERIALIZE_LIMIT:
                self._cache[mask] = sub
        return sub

    def __getitem__(self, mask: int) -> Subspace:
        return self.element(mask)

    def __len__(self) -> int:
        return self.size

    def __iter__(self):
        return (self.element(mask) for mask in range(self.size))

    def masks_of_dim(self, e: int) -> list[int]:
        return [sum(1 << i for i in c) for c in combinations(range(self.ambient_dim), e)]

    def count_by_dim(self) -> list[int]:
        counts = [0] * (self.ambient_dim + 1)
        for mask in range(self.size):
            counts[self.element(mask).dim] += 1
        return counts

    @staticmethod
    def expected_counts(d: int) -> list[int]:
        return [comb(d, e) for e in range(d + 1)]

    def index_of(self, h: Subspace, tol: Tolerance | None = None) -> int | None:
        """Bitmask of ``h`` in this algebra, or ``None`` if it is not an element."""
        tol = tol or get_tolerance()
        # overlap of each generator with h is 0 or 1 for members
        weights = np.real(np.einsum("ij,jk,ki->i", self.generating_basis.conj().T, h.projector, self.generating_basis))
        mask = 0
        for i, w in enumerate(weights):
            if abs(w - 1.0) <= tol.zero_tol:
                mask |= 1 << i
            elif abs(w) > tol.zero_tol:
                return None
        return mask if self.element(mask).same_as(h, tol) else None

    def __contains__(self, h: Subspace) -> bool:
        return self.index_of(h) is not None


def boolean_algebra_from_basis(vectors, tol: Tolerance | None = None) -> BooleanAlgebra:
    """Boolean algebra generated by ``d`` orthonormal columns of ``C^d``."""
    tol = tol or get_tolerance()
    v = as_cmatrix(vectors)
    d = v.shape[0]
    if v.shape != (d, d):
        raise ValueError(f"need {d} basis vectors of length {d}, got shape {v.shape}")
    if float(np.linalg.norm(v.conj().T @ v - np.eye(d))) > tol.zero_tol:
        raise ValueError("basis vectors are not orthonormal")
    return BooleanAlgebra(v)


def transport_by_unitary(b: BooleanAlgebra, u, tol: Tolerance | None = None) -> BooleanAlgebra:
    """Image of ``b`` under the unitary ``u`` (element masks are preserved)."""
    u = as_cmatrix(u)
    if u.shape != (b.ambient_dim, b.ambient_dim):
        raise ValueError(f"unitary has shape {u.shape}, algebra lives in C^{b.ambient_dim}")
    if not is_unitary(u, tol):
        raise ValueError("transformation is not unitary")
    return BooleanAlgebra(u @ b.generating_basis)
