"""Generalized additivity operator, Gleason probabilities and the
lower/upper/Kolmogorov classification of a pair of quantum probabilities.

For subspaces ``H1, H2`` the additivity operator is

    D(H1, H2) = P(H1 v H2) + P(H1 ^ H2) - P(H1) - P(H2)

which vanishes exactly when the two projectors commute. Its expectation in a
state ``rho`` is the quantum analogue of ``q(A u B) + q(A n B) - q(A) - q(B)``.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from .lattice import Subspace, commutes, join, leq, meet, orthocomplement, orthogonal
from .linalg import Tolerance, as_cmatrix, commutator, get_tolerance, hermitian_eigen

__all__ = [
    "AdditivityOperator",
    "DensityMatrix",
    "Verdict",
    "PairClassification",
    "Proposition1Report",
    "additivity_operator",
    "gleason_probability",
    "d_scalar",
    "classify_pair",
    "verify_proposition1",
]


@dataclass(frozen=True, eq=False)
class AdditivityOperator:
    matrix: np.ndarray
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    @classmethod
    def from_matrix(cls, m, tol: Tolerance | None = None) -> "AdditivityOperator":
        m = as_cmatrix(m)
        values, vectors = hermitian_eigen(m, tol)
        return cls(m, values, vectors)

    @property
    def lambda_min(self) -> float:
        return float(self.eigenvalues[0])

    @property
    def lambda_max(self) -> float:
        return float(self.eigenvalues[-1])

    @property
    def trace(self) -> float:
        return float(np.trace(self.matrix).real)

    def norm(self) -> float:
        return float(np.linalg.norm(self.matrix))

    def is_zero(self, tol: Tolerance | None = None) -> bool:
        return self.norm() <= (tol or get_tolerance()).zero_tol

    def eigenstate(self, i: int) -> "DensityMatrix":
        """Pure state on the ``i``-th eigenvector (ascending eigenvalue order)."""
        return DensityMatrix.pure(self.eigenvectors[:, i])


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """Hermitian, positive semidefinite, unit-trace matrix.

    Eigenvalues down to ``-zero_tol`` are tolerated as round-off; anything
    more negative is rejected.
    """

    matrix: np.ndarray
    tol: Tolerance | None = field(default=None, repr=False)

    def __post_init__(self):
        tol = self.tol or get_tolerance()
        m = as_cmatrix(self.matrix)
        if m.shape[0] != m.shape[1]:
            raise ValueError(f"density matrix must be square, got {m.shape}")
        values, _ = hermitian_eigen(m, tol)
        if values[0] < -tol.zero_tol:
            raise ValueError(f"density matrix is not positive semidefinite (min eigenvalue {values[0]:.3e})")
        tr = np.trace(m)
        if abs(tr - 1.0) > tol.zero_tol:
            raise ValueError(f"density matrix trace is {tr.real:.12g}, expected 1")
        m = 0.5 * (m + m.conj().T)
        m.flags.writeable = False
        object.__setattr__(self, "matrix", m)

    @classmethod
    def pure(cls, vector) -> "DensityMatrix":
        v = np.asarray(vector, dtype=np.complex128).reshape(-1)
        v = v / np.linalg.norm(v)
        return cls(np.outer(v, v.conj()))

    @classmethod
    def maximally_mixed(cls, d: int) -> "DensityMatrix":
        return cls(np.eye(d, dtype=np.complex128) / d)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]


def _as_density(rho) -> DensityMatrix:
    return rho if isinstance(rho, DensityMatrix) else DensityMatrix(rho)


def _check_dims(*objs) -> None:
    dims = {o.ambient_dim if isinstance(o, Subspace) else o.dim for o in objs}
    if len(dims) != 1:
        raise ValueError(f"dimension mismatch: {sorted(dims)}")


def additivity_operator(h1: Subspace, h2: Subspace, tol: Tolerance | None = None) -> AdditivityOperator:
    _check_dims(h1, h2)
    m = join(h1, h2, tol).projector + meet(h1, h2, tol).projector - h1.projector - h2.projector
    return AdditivityOperator.from_matrix(m, tol)


def gleason_probability(h: Subspace, rho, tol: Tolerance | None = None) -> float:
    """``Tr[rho P(H)]``.

    Gleason's theorem only justifies this form for ``d > 2``; the number is
    still the Born-rule probability for qubits.
    """
    tol = tol or get_tolerance()
    rho = _as_density(rho)
    _check_dims(h, rho)
    p = float(np.real(np.trace(rho.matrix @ h.projector)))
    if p < -tol.zero_tol or p > 1.0 + tol.zero_tol:
        raise ValueError(f"probability {p} outside [0, 1] beyond tolerance")
    return min(1.0, max(0.0, p))


def d_scalar(h1: Subspace, h2: Subspace, rho, tol: Tolerance | None = None) -> float:
    """``Tr[rho D(H1, H2)]``."""
    rho = _as_density(rho)
    _check_dims(h1, h2, rho)
    op = additivity_operator(h1, h2, tol)
    return float(np.real(np.trace(rho.matrix @ op.matrix)))


class Verdict(str, enum.Enum):
    LOWER = "Lower"
    UPPER = "Upper"
    KOLMOGOROV = "Kolmogorov"

    def mirror(self) -> "Verdict":
        return {Verdict.LOWER: Verdict.UPPER, Verdict.UPPER: Verdict.LOWER}.get(self, self)


@dataclass(frozen=True)
class PairClassification:
    d_scalar: float
    verdict: Verdict
    epsilon: float
    lambda_min: float
    lambda_max: float
    operator_nonzero: bool

    def to_json(self) -> dict:
        return {
            "d_scalar": self.d_scalar,
            "verdict": self.verdict.value,
            "epsilon": self.epsilon,
            "lambda_min": self.lambda_min,
            "lambda_max": self.lambda_max,
            "operator_nonzero": self.operator_nonzero,
        }


def classify_pair(
    h1: Subspace,
    h2: Subspace,
    rho,
    epsilon: float | None = None,
    tol: Tolerance | None = None,
) -> PairClassification:
    """Read ``p(H1|rho), p(H2|rho)`` as lower, upper or Kolmogorov probabilities.

    ``d > epsilon`` gives Lower, ``d < -epsilon`` gives Upper, anything in
    between (boundary included) is Kolmogorov. The verdict is per state: a
    nonzero operator can still give ``d = 0`` for particular states, which
    ``operator_nonzero`` exposes.
    """
    tol = tol or get_tolerance()
    eps = tol.zero_tol if epsilon is None else float(epsilon)
    if eps < 0:
        raise ValueError("epsilon must be nonnegative")
    rho = _as_density(rho)
    _check_dims(h1, h2, rho)
    op = additivity_operator(h1, h2, tol)
    value = float(np.real(np.trace(rho.matrix @ op.matrix)))
    if value > eps:
        verdict = Verdict.LOWER
    elif value < -eps:
        verdict = Verdict.UPPER
    else:
        verdict = Verdict.KOLMOGOROV
    return PairClassification(value, verdict, eps, op.lambda_min, op.lambda_max, not op.is_zero(tol))


@dataclass(frozen=True)
class Proposition1Report:
    """Residual norms of the operator identities tying ``D`` to the commutator.

    ``equivalences`` holds the four booleans that must agree: ``D == 0``,
    ``[P1, P2] == 0``, ``P(H1 ^ H2) == P1 P2`` and lattice commutation.
    """

    residuals: dict
    equivalences: dict
    orthogonal_or_contained: bool
    tolerance: float
    commutator: np.ndarray = field(repr=False)
    operator: AdditivityOperator = field(repr=False)

    @property
    def loop_consistent(self) -> bool:
        return len(set(self.equivalences.values())) == 1

    @property
    def passed(self) -> bool:
        return self.loop_consistent and all(r <= self.tolerance for r in self.residuals.values())

    def to_json(self) -> dict:
        return {
            "passed": self.passed,
            "residuals": dict(self.residuals),
            "equivalences": dict(self.equivalences),
            "orthogonal_or_contained": self.orthogonal_or_contained,
            "tolerance": self.tolerance,
        }


def verify_proposition1(h1: Subspace, h2: Subspace, tol: Tolerance | None = None) -> Proposition1Report:
    tol = tol or get_tolerance()
    _check_dims(h1, h2)
    p1, p2 = h1.projector, h2.projector
    p_meet = meet(h1, h2, tol).projector
    op = additivity_operator(h1, h2, tol)
    dm = op.matrix
    comm = commutator(p1, p2)
    op_perp = additivity_operator(orthocomplement(h1, tol), orthocomplement(h2, tol), tol).matrix
    norm = np.linalg.norm

    residuals = {
        "trace": abs(np.trace(dm)),
        "meet_minus_product_left": norm(p_meet - p1 @ p2 - p1 @ dm),
        "meet_minus_product_right": norm(p1 @ dm - dm @ p2),
        "commutator_right": norm(comm - dm @ (p1 - p2)),
        "commutator_left": norm(comm + (p1 - p2) @ dm),
        "commutator_with_operator": norm(comm + commutator(p1, dm)),
        "complement_sign_flip": norm(op_perp + dm),
    }
    special = orthogonal(h1, h2, tol) or leq(h1, h2, tol) or leq(h2, h1, tol)
    residuals["vanishes_if_orthogonal_or_contained"] = norm(dm) if special else 0.0
    residuals = {k: float(v) for k, v in residuals.items()}

    equivalences = {
        "operator_zero": bool(norm(dm) <= tol.zero_tol),
        "projectors_commute": bool(norm(comm) <= tol.zero_tol),
        "meet_is_product": bool(norm(p_meet - p1 @ p2) <= tol.zero_tol),
        "lattice_commutes": commutes(h1, h2, tol),
    }
    return Proposition1Report(residuals, equivalences, special, tol.zero_tol, comm, op)
