"""Finite quantum systems with positions and momenta in Z(d), d odd.

Matrices are written in the position basis with row/column ``n`` standing
for ``|X;n>``. Coherent states are ``D(alpha, beta)|f>`` for a fiducial
vector ``f`` that is neither a position nor a momentum eigenstate.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .additivity import AdditivityOperator
from .lattice import Subspace
from .linalg import Tolerance, get_tolerance
from .sampling import complex_gaussian

__all__ = [
    "FiniteSystem",
    "CoherentFamily",
    "displacement",
    "coherent_overlap",
    "direct_overlap",
    "coherent_pair_D",
    "coherent_join_projector",
    "gram_schmidt_join_projector",
    "resolution_of_identity",
    "random_fiducial",
]


def _readonly(a: np.ndarray) -> np.ndarray:
    a.flags.writeable = False
    return a


@dataclass(frozen=True, eq=False)
class FiniteSystem:
    d: int

    def __post_init__(self):
        if not isinstance(self.d, (int, np.integer)) or self.d < 3 or self.d % 2 == 0:
            raise ValueError(f"dimension must be odd and at least 3, got {self.d}")

    @property
    def half(self) -> int:
        """The inverse of 2 in Z(d)."""
        return (self.d + 1) // 2

    def omega(self, k) -> complex:
        return np.exp(2j * np.pi * (np.asarray(k) % self.d) / self.d)

    def position_state(self, n: int) -> np.ndarray:
        v = np.zeros(self.d, dtype=np.complex128)
        v[n % self.d] = 1.0
        return v

    def momentum_state(self, m: int) -> np.ndarray:
        return self.fourier[:, m % self.d].copy()

    @cached_property
    def fourier(self) -> np.ndarray:
        """Columns are the momentum states ``|P;m> = d^-1/2 sum_n w(mn) |X;n>``."""
        n = np.arange(self.d)
        return _readonly(self.omega(np.outer(n, n)) / np.sqrt(self.d))

    @cached_property
    def Z(self) -> np.ndarray:
        return _readonly(np.diag(self.omega(np.arange(self.d))).astype(np.complex128))

    @cached_property
    def X(self) -> np.ndarray:
        """Shift ``|X;m> -> |X;m+1>``."""
        return _readonly(np.roll(np.eye(self.d, dtype=np.complex128), 1, axis=0))

    def displacement(self, alpha: int, beta: int) -> np.ndarray:
        return displacement(self, alpha, beta)


def displacement(sys: FiniteSystem, alpha: int, beta: int) -> np.ndarray:
    """``D(alpha, beta) = Z^alpha X^beta w(-2^-1 alpha beta)``."""
    d = sys.d
    alpha, beta = alpha % d, beta % d
    z = np.linalg.matrix_power(sys.Z, alpha)
    x = np.linalg.matrix_power(sys.X, beta)
    return z @ x * sys.omega(-sys.half * alpha * beta)


def random_fiducial(d: int, seed=None) -> np.ndarray:
    v = complex_gaussian(seed, d)
    return v / np.linalg.norm(v)


@dataclass(frozen=True, eq=False)
class CoherentFamily:
    system: FiniteSystem
    fiducial: np.ndarray
    seed: int | None = None
    tol: Tolerance | None = field(default=None, repr=False)

    def __post_init__(self):
        tol = self.tol or get_tolerance()
        f = np.asarray(self.fiducial, dtype=np.complex128).reshape(-1)
        if f.shape != (self.system.d,):
            raise ValueError(f"fiducial has length {f.size}, expected {self.system.d}")
        norm = np.linalg.norm(f)
        if norm <= tol.zero_tol:
            raise ValueError("fiducial vector is zero")
        f = f / norm
        in_position = np.count_nonzero(np.abs(f) > tol.zero_tol)
        in_momentum = np.count_nonzero(np.abs(self.system.fourier.conj().T @ f) > tol.zero_tol)
        if in_position < 2 or in_momentum < 2:
            raise ValueError("fiducial must not be a position or momentum state")
        object.__setattr__(self, "fiducial", _readonly(f))

    @classmethod
    def random(cls, d: int, seed: int | None = None) -> "CoherentFamily":
        return cls(FiniteSystem(d), random_fiducial(d, seed), seed=seed)

    @property
    def d(self) -> int:
        return self.system.d

    @cached_property
    def states(self) -> np.ndarray:
        """``states[alpha, beta]`` is the vector ``|C; alpha, beta>``."""
        d = self.d
        out = np.empty((d, d, d), dtype=np.complex128)
        for alpha in range(d):
            for beta in range(d):
                out[alpha, beta] = displacement(self.system, alpha, beta) @ self.fiducial
        return _readonly(out)

    def state(self, alpha: int, beta: int) -> np.ndarray:
        return self.states[alpha % self.d, beta % self.d]

    def projector(self, alpha: int, beta: int) -> np.ndarray:
        v = self.state(alpha, beta)
        return np.outer(v, v.conj())

    def subspace(self, alpha: int, beta: int) -> Subspace:
        return Subspace(self.state(alpha, beta).reshape(-1, 1))

    def index_pairs(self):
        return [(a, b) for a in range(self.d) for b in range(self.d)]


def direct_overlap(fam: CoherentFamily, p, q) -> complex:
    """``<C;p|C;q>`` by explicit inner product."""
    return complex(np.vdot(fam.state(*p), fam.state(*q)))


def coherent_overlap(fam: CoherentFamily, p, q) -> complex:
    """``<C;alpha,beta|C;gamma,delta>`` from the fiducial components alone:

        w[2^-1 (alpha beta + gamma delta) - alpha delta]
            * sum_n conj(f_{n + delta - beta}) f_n w[n (gamma - alpha)]
    """
    sys = fam.system
    d = sys.d
    alpha, beta = p
    gamma, delta = q
    n = np.arange(d)
    f = fam.fiducial
    total = np.sum(f[(n + delta - beta) % d].conj() * f * sys.omega(n * (gamma - alpha)))
    phase = sys.omega(sys.half * (alpha * beta + gamma * delta) - alpha * delta)
    return complex(phase * total)


def _pair_terms(fam: CoherentFamily, p, q, tol: Tolerance):
    if (p[0] - q[0]) % fam.d == 0 and (p[1] - q[1]) % fam.d == 0:
        raise ValueError("coherent indices coincide")
    lam = coherent_overlap(fam, p, q)
    gap = 1.0 - abs(lam) ** 2
    if gap <= tol.zero_tol:
        raise ValueError("coherent states are parallel (|lambda| = 1); their join is one-dimensional")
    return fam.projector(*p), fam.projector(*q), lam, gap


def coherent_join_projector(fam: CoherentFamily, p, q, tol: Tolerance | None = None) -> np.ndarray:
    """``P(H_p v H_q) = [P_p + P_q - P_p P_q - P_q P_p] / (1 - |lambda|^2)``."""
    pp, pq, _, gap = _pair_terms(fam, p, q, tol or get_tolerance())
    return (pp + pq - pp @ pq - pq @ pp) / gap


def gram_schmidt_join_projector(fam: CoherentFamily, p, q, tol: Tolerance | None = None) -> np.ndarray:
    """Same projector as ``|C;p><C;p| + |s><s|`` with ``s`` orthogonalized against ``C;p``."""
    _, _, lam, gap = _pair_terms(fam, p, q, tol or get_tolerance())
    cp, cq = fam.state(*p), fam.state(*q)
    s = (cq - lam * cp) / np.sqrt(gap)
    return np.outer(cp, cp.conj()) + np.outer(s, s.conj())


def coherent_pair_D(fam: CoherentFamily, p, q, tol: Tolerance | None = None) -> AdditivityOperator:
    """Additivity operator of two coherent lines in closed form.

        D = |l|^2/(1-|l|^2) (P_p + P_q) - 1/(1-|l|^2) (P_p P_q + P_q P_p)
    """
    tol = tol or get_tolerance()
    pp, pq, lam, gap = _pair_terms(fam, p, q, tol)
    m = (abs(lam) ** 2 * (pp + pq) - (pp @ pq + pq @ pp)) / gap
    return AdditivityOperator.from_matrix(m, tol)


def resolution_of_identity(fam: CoherentFamily) -> float:
    """``|| (1/d) sum |C><C| - 1 ||_F``."""
    v = fam.states.reshape(-1, fam.d)
    total = v.T @ v.conj() / fam.d
    return float(np.linalg.norm(total - np.eye(fam.d)))
