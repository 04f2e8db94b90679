"""Dense complex linear algebra shared by every other module.

All matrices are plain ``numpy.ndarray`` objects of dtype ``complex128``.
The only state here is the session tolerance, which can be overridden with
the ``QLDS_TOL`` environment variable, :func:`set_tolerance` or the
:func:`tolerance` context manager.
"""

from __future__ import annotations

import contextlib
import os
from dataclasses import dataclass, replace

import numpy as np

__all__ = [
    "Tolerance",
    "get_tolerance",
    "set_tolerance",
    "tolerance",
    "as_cmatrix",
    "hermitian_eigen",
    "orthonormal_column_basis",
    "frobenius_distance",
    "commutator",
    "is_unitary",
    "matrix_to_json",
    "matrix_from_json",
]


@dataclass(frozen=True)
class Tolerance:
    """Numerical cutoffs.

    ``rank_tol`` is relative to the largest singular value, ``zero_tol`` is
    an absolute bound for scalars and Frobenius norms.
    """

    rank_tol: float = 1e-10
    zero_tol: float = 1e-9

    def __post_init__(self):
        for name in ("rank_tol", "zero_tol"):
            value = getattr(self, name)
            if not (np.isfinite(value) and value > 0):
                raise ValueError(f"{name} must be a positive finite number, got {value!r}")


def _initial_tolerance() -> Tolerance:
    env = os.environ.get("QLDS_TOL")
    if env is None:
        return Tolerance()
    return Tolerance(zero_tol=float(env))


_session_tol = _initial_tolerance()


def get_tolerance() -> Tolerance:
    return _session_tol


def set_tolerance(tol: Tolerance | None = None, **overrides) -> Tolerance:
    """Replace the session tolerance and return the previous one."""
    global _session_tol
    previous = _session_tol
    base = tol if tol is not None else _session_tol
    _session_tol = replace(base, **overrides) if overrides else base
    return previous


@contextlib.contextmanager
def tolerance(tol: Tolerance | None = None, **overrides):
    previous = set_tolerance(tol, **overrides)
    try:
        yield _session_tol
    finally:
        set_tolerance(previous)


def _tol(tol: Tolerance | None) -> Tolerance:
    return _session_tol if tol is None else tol


def as_cmatrix(m) -> np.ndarray:
    """Coerce to a finite 2-D complex array (1-D input becomes a column)."""
    arr = np.asarray(m, dtype=np.complex128)
    if arr.ndim == 1:
        arr = arr.reshape(-1, 1)
    if arr.ndim != 2:
        raise ValueError(f"expected a matrix, got array of shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError("matrix has non-finite entries")
    return arr


def hermitian_eigen(m, tol: Tolerance | None = None) -> tuple[np.ndarray, np.ndarray]:
    """Eigen-decomposition of a Hermitian matrix.

    Returns ``(eigenvalues, eigenvectors)`` with real eigenvalues in
    ascending order and eigenvectors as the columns of a unitary matrix.
    The input is symmetrized first; an input that is Hermitian only beyond
    ``zero_tol * (1 + ||m||_F)`` is rejected rather than silently fixed.
    """
    tol = _tol(tol)
    m = as_cmatrix(m)
    if m.shape[0] != m.shape[1]:
        raise ValueError(f"matrix must be square, got shape {m.shape}")
    skew = np.linalg.norm(m - m.conj().T)
    if skew > tol.zero_tol * (1.0 + np.linalg.norm(m)):
        raise ValueError(f"matrix is not Hermitian (||m - m^dagger||_F = {skew:.3e})")
    values, vectors = np.linalg.eigh(0.5 * (m + m.conj().T))
    return values, vectors


def orthonormal_column_basis(m, tol: Tolerance | None = None) -> np.ndarray:
    """Orthonormal basis of the column span of ``m`` as a ``d x k`` matrix.

    The rank counts singular values above ``rank_tol * sigma_max``; a zero
    matrix gives a ``d x 0`` result.
    """
    tol = _tol(tol)
    m = as_cmatrix(m)
    d = m.shape[0]
    if m.size == 0:
        return np.zeros((d, 0), dtype=np.complex128)
    u, s, _ = np.linalg.svd(m, full_matrices=False)
    if s.size == 0 or s[0] == 0.0:
        return np.zeros((d, 0), dtype=np.complex128)
    rank = int(np.count_nonzero(s > tol.rank_tol * s[0]))
    return np.ascontiguousarray(u[:, :rank])


def frobenius_distance(a, b) -> float:
    a = as_cmatrix(a)
    b = as_cmatrix(b)
    if a.shape != b.shape:
        raise ValueError(f"shape mismatch: {a.shape} vs {b.shape}")
    return float(np.linalg.norm(a - b))


def commutator(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return a @ b - b @ a


def is_unitary(u, tol: Tolerance | None = None) -> bool:
    tol = _tol(tol)
    u = as_cmatrix(u)
    if u.shape[0] != u.shape[1]:
        return False
    return float(np.linalg.norm(u.conj().T @ u - np.eye(u.shape[0]))) <= tol.zero_tol


def matrix_to_json(m) -> dict:
    """Encode as ``{"rows", "cols", "data": [[re, im], ...]}`` in row-major order."""
    m = as_cmatrix(m)
    rows, cols = m.shape
    data = [[float(z.real), float(z.imag)] for z in m.reshape(-1)]
    return {"rows": rows, "cols": cols, "data": data}


def matrix_from_json(obj: dict) -> np.ndarray:
    rows, cols = int(obj["rows"]), int(obj["cols"])
    data = obj["data"]
    if len(data) != rows * cols:
        raise ValueError(f"expected {rows * cols} entries, got {len(data)}")
    flat = np.array([complex(re, im) for re, im in data], dtype=np.complex128)
    return as_cmatrix(flat.reshape(rows, cols))
