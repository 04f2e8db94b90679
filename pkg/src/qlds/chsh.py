"""Two spin-1/2 particles: rotated S_x measurements, the four Boolean
algebras they generate, Bell-state probabilities and the CHSH/Boole checks.

Tensor products are ``np.kron(first_particle, second_particle)``, and the
single-spin basis is ``|up> = (1, 0)``, ``|down> = (0, 1)``.

Outcome labels per measurement ``i``: ``(1,1) <-> H_1i``, ``(1,0) <-> H_2i``,
``(0,1) <-> H_3i``, ``(0,0) <-> H_4i``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from itertools import product

import numpy as np

from .additivity import DensityMatrix, gleason_probability
from .lattice import (
    BooleanAlgebra,
    Subspace,
    boolean_algebra_from_basis,
    join,
    join_all,
    meet_all,
    orthocomplement,
    transport_by_unitary,
)
from .linalg import Tolerance, commutator, get_tolerance

__all__ = [
    "SX",
    "SY",
    "SZ",
    "PI_X1",
    "PI_X0",
    "BELL_STATE",
    "MEASUREMENTS",
    "TABLE4_OUTCOMES",
    "Su2Setting",
    "MeasurementSetup",
    "ProbabilityTable",
    "MeetZeroReport",
    "Proposition2Result",
    "BooleResult",
    "CommutatorWitness",
    "spin_projectors",
    "boolean_tables",
    "table_projectors",
    "probability_table",
    "closed_form_kappa_lambda",
    "chsh_lhs",
    "chsh_lhs_closed_form",
    "chsh_subspaces",
    "verify_meet_zero",
    "proposition2_bound",
    "boole_violation",
    "commutator_witness",
    "bell_state",
]

SX = 0.5 * np.array([[0, 1], [1, 0]], dtype=np.complex128)
SY = 0.5 * np.array([[0, -1j], [1j, 0]], dtype=np.complex128)
SZ = 0.5 * np.array([[1, 0], [0, -1]], dtype=np.complex128)
PI_X1 = 0.5 * np.array([[1, 1], [1, 1]], dtype=np.complex128)
PI_X0 = 0.5 * np.array([[1, -1], [-1, 1]], dtype=np.complex128)
I2 = np.eye(2, dtype=np.complex128)

BELL_STATE = np.array([1, 0, 0, 1], dtype=np.complex128) / np.sqrt(2)

MEASUREMENTS = ("A", "B", "C", "D")
# column order of the probability table
TABLE4_OUTCOMES = ((1, 1), (0, 1), (1, 0), (0, 0))
OUTCOME_INDEX = {(1, 1): 1, (1, 0): 2, (0, 1): 3, (0, 0): 4}

# bitmasks in an algebra generated by (H1, H2, H3, H4)
ELEMENT_MASKS = {
    "O": 0b0000,
    "H1": 0b0001,
    "H2": 0b0010,
    "H3": 0b0100,
    "H4": 0b1000,
    "H5": 0b0011,
    "H6": 0b0101,
    "H7": 0b1001,
}
for _k in ("H1", "H2", "H3", "H4", "H5", "H6", "H7"):
    ELEMENT_MASKS[_k + "_perp"] = 0b1111 ^ ELEMENT_MASKS[_k]
ELEMENT_MASKS["I"] = 0b1111
del _k


def bell_state() -> DensityMatrix:
    return DensityMatrix.pure(BELL_STATE)


@dataclass(frozen=True)
class Su2Setting:
    """``U(a, b) = [[a, b], [-b*, a*]]`` with ``|a|^2 + |b|^2 = 1``."""

    a: complex
    b: complex = 0.0

    def __post_init__(self):
        a, b = complex(self.a), complex(self.b)
        norm = abs(a) ** 2 + abs(b) ** 2
        if abs(norm - 1.0) > get_tolerance().zero_tol:
            raise ValueError(f"|a|^2 + |b|^2 = {norm}, expected 1")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)

    @classmethod
    def from_theta(cls, theta: float) -> "Su2Setting":
        """The one-parameter family ``a = exp(i theta)``, ``b = 0``."""
        return cls(complex(np.cos(theta), np.sin(theta)), 0.0)

    @classmethod
    def identity(cls) -> "Su2Setting":
        return cls(1.0, 0.0)

    @classmethod
    def random(cls, rng=None) -> "Su2Setting":
        rng = rng if isinstance(rng, np.random.Generator) else np.random.default_rng(rng)
        z = rng.standard_normal(4)
        z /= np.linalg.norm(z)
        return cls(complex(z[0], z[1]), complex(z[2], z[3]))

    @property
    def unitary(self) -> np.ndarray:
        a, b = self.a, self.b
        return np.array([[a, b], [-b.conjugate(), a.conjugate()]], dtype=np.complex128)

    def spin_operator(self) -> np.ndarray:
        u = self.unitary
        return u @ SX @ u.conj().T

    def to_json(self) -> dict:
        return {"a": [self.a.real, self.a.imag], "b": [self.b.real, self.b.imag]}


def spin_projectors(setting: Su2Setting) -> tuple[np.ndarray, np.ndarray]:
    """``(Pi(a,b;1), Pi(a,b;0))`` from their closed-form entries."""
    a, b = setting.a, setting.b
    ac, bc = a.conjugate(), b.conjugate()
    p1 = 0.5 * np.array([[abs(a + b) ** 2, a * a - b * b], [ac * ac - bc * bc, abs(a - b) ** 2]])
    p0 = 0.5 * np.array([[abs(a - b) ** 2, -a * a + b * b], [-ac * ac + bc * bc, abs(a + b) ** 2]])
    return p1.astype(np.complex128), p0.astype(np.complex128)


def _factor_projectors(setting: Su2Setting) -> dict:
    """Single-spin projector pairs ``(Pi_1, Pi_0)`` for each particle of each measurement."""
    x = (PI_X1, PI_X0)
    r = spin_projectors(setting)
    return {"A": (x, x), "B": (x, r), "C": (r, x), "D": (r, r)}


def table_projectors(setting: Su2Setting, which: str) -> dict:
    """Closed-form tensor-product projectors for every element of ``B_which``."""
    (f1, f0), (s1, s0) = _factor_projectors(setting)[which]
    k = np.kron
    out = {
        "H1": k(f1, s1),
        "H2": k(f1, s0),
        "H3": k(f0, s1),
        "H4": k(f0, s0),
        "H5": k(f1, I2),
        "H6": k(I2, s1),
        "H7": k(f1, s1) + k(f0, s0),
        "O": np.zeros((4, 4), dtype=np.complex128),
        "I": np.eye(4, dtype=np.complex128),
    }
    for name in ("H1", "H2", "H3", "H4", "H5", "H6", "H7"):
        out[name + "_perp"] = np.eye(4) - out[name]
    return out


def _table2_basis() -> np.ndarray:
    return 0.5 * np.array(
        [[1, 1, 1, 1], [1, -1, 1, -1], [1, 1, -1, -1], [1, -1, -1, 1]], dtype=np.complex128
    ).T


def boolean_tables(setting: Su2Setting, tol: Tolerance | None = None) -> dict[str, BooleanAlgebra]:
    """The algebras ``B_A`` and its images under ``1 x U``, ``U x 1`` and ``U x U``."""
    b_a = boolean_algebra_from_basis(_table2_basis(), tol)
    u = setting.unitary
    return {
        "A": b_a,
        "B": transport_by_unitary(b_a, np.kron(I2, u), tol),
        "C": transport_by_unitary(b_a, np.kron(u, I2), tol),
        "D": transport_by_unitary(b_a, np.kron(u, u), tol),
    }


@dataclass(frozen=True, eq=False)
class MeasurementSetup:
    setting: Su2Setting

    @cached_property
    def observables(self) -> dict:
        s = self.setting.spin_operator()
        return {"A": np.kron(SX, SX), "B": np.kron(SX, s), "C": np.kron(s, SX), "D": np.kron(s, s)}

    @cached_property
    def outcome_projectors(self) -> dict:
        """``outcome_projectors[i][k]`` is ``P(H_ki)`` for ``k`` in 1..4."""
        out = {}
        for name, ((f1, f0), (s1, s0)) in _factor_projectors(self.setting).items():
            out[name] = {1: np.kron(f1, s1), 2: np.kron(f1, s0), 3: np.kron(f0, s1), 4: np.kron(f0, s0)}
        return out

    def subspace(self, measurement: str, k: int) -> Subspace:
        return Subspace.span(self.outcome_projectors[measurement][k])

    def observable_residual(self, measurement: str) -> float:
        p = self.outcome_projectors[measurement]
        rebuilt = 0.25 * (p[1] + p[4]) - 0.25 * (p[2] + p[3])
        return float(np.linalg.norm(self.observables[measurement] - rebuilt))

    @property
    def degenerate(self) -> bool:
        """Whether the rotated spin measurement commutes with S_x (all four algebras coincide)."""
        p1, _ = spin_projectors(self.setting)
        return float(np.linalg.norm(commutator(p1, PI_X1))) <= get_tolerance().zero_tol


def closed_form_kappa_lambda(setting: Su2Setting) -> tuple[float, float]:
    """``kappa = (a_R^2 + b_I^2)/2`` and
    ``lambda = (|a+b|^4 + |a-b|^4 + (a^2-b^2)^2 + (a*^2-b*^2)^2) / 8``."""
    a, b = setting.a, setting.b
    kappa = 0.5 * (a.real**2 + b.imag**2)
    w = a * a - b * b
    lam = (abs(a + b) ** 4 + abs(a - b) ** 4 + w**2 + w.conjugate() ** 2) / 8
    return float(kappa), float(lam.real)


@dataclass(frozen=True)
class ProbabilityTable:
    """Bell-state outcome probabilities, rows ``A..D`` in ``TABLE4_OUTCOMES`` order."""

    rows: dict
    closed_form: dict
    kappa: float
    lambda_val: float

    @property
    def max_residual(self) -> float:
        return max(
            abs(self.rows[i][j] - self.closed_form[i][j]) for i in MEASUREMENTS for j in range(4)
        )

    def row_sums(self) -> dict:
        return {i: float(sum(self.rows[i])) for i in MEASUREMENTS}

    def cell(self, measurement: str, outcome: tuple[int, int]) -> float:
        return self.rows[measurement][TABLE4_OUTCOMES.index(tuple(outcome))]

    def to_json(self) -> list:
        return [
            {"measurement": i, **{f"p{x}{y}": self.rows[i][j] for j, (x, y) in enumerate(TABLE4_OUTCOMES)}}
            for i in MEASUREMENTS
        ]


def probability_table(setting: Su2Setting, tol: Tolerance | None = None) -> ProbabilityTable:
    """Bell-state table computed by direct expectation, with the closed form alongside."""
    tol = tol or get_tolerance()
    setup = MeasurementSetup(setting)
    s = BELL_STATE
    rows = {}
    for i in MEASUREMENTS:
        proj = setup.outcome_projectors[i]
        rows[i] = tuple(float(np.real(np.vdot(s, proj[OUTCOME_INDEX[o]] @ s))) for o in TABLE4_OUTCOMES)
    kappa, lam = closed_form_kappa_lambda(setting)
    closed = {
        "A": (0.5, 0.0, 0.0, 0.5),
        "B": (kappa, 0.5 - kappa, 0.5 - kappa, kappa),
        "C": (kappa, 0.5 - kappa, 0.5 - kappa, kappa),
        "D": (lam, 0.5 - lam, 0.5 - lam, lam),
    }
    table = ProbabilityTable(rows, closed, kappa, lam)
    if table.max_residual > tol.zero_tol:
        raise RuntimeError(f"direct and closed-form tables disagree by {table.max_residual:.3e}")
    return table


def chsh_subspaces(setting: Su2Setting, tol: Tolerance | None = None) -> list[Subspace]:
    """``[H1A v H4A, H1B v H4B, H1C v H4C, H2D v H3D]`` built by lattice joins."""
    setup = MeasurementSetup(setting)
    pairs = (("A", 1, 4), ("B", 1, 4), ("C", 1, 4), ("D", 2, 3))
    return [join(setup.subspace(i, k), setup.subspace(i, l), tol) for i, k, l in pairs]


def chsh_lhs(setting: Su2Setting, tol: Tolerance | None = None) -> float:
    """Sum of Bell-state probabilities of the four CHSH join subspaces."""
    rho = bell_state()
    return float(sum(gleason_probability(h, rho, tol) for h in chsh_subspaces(setting, tol)))


def chsh_lhs_closed_form(setting: Su2Setting) -> float:
    kappa, lam = closed_form_kappa_lambda(setting)
    return 1.0 + 4.0 * kappa + (1.0 - 2.0 * lam)


@dataclass(frozen=True)
class MeetZeroReport:
    term_norms: dict
    product_norm: float
    meet_dim: int
    degenerate: bool
    tolerance: float

    @property
    def products_vanish(self) -> bool:
        return all(v <= self.tolerance for v in self.term_norms.values())

    @property
    def meet_is_zero(self) -> bool:
        return self.meet_dim == 0

    def to_json(self) -> dict:
        return {
            "term_norms": {"*".join(k): v for k, v in self.term_norms.items()},
            "max_term_norm": max(self.term_norms.values()),
            "product_norm": self.product_norm,
            "products_vanish": self.products_vanish,
            "meet_dim": self.meet_dim,
            "meet_is_zero": self.meet_is_zero,
            "degenerate": self.degenerate,
        }


def verify_meet_zero(setting: Su2Setting, tol: Tolerance | None = None) -> MeetZeroReport:
    """Norms of the 16 terms of ``(P1A+P4A)(P1B+P4B)(P1C+P4C)(P2D+P3D)`` and
    the dimension of the lattice meet of the four join subspaces."""
    tol = tol or get_tolerance()
    setup = MeasurementSetup(setting)
    p = setup.outcome_projectors
    terms = {}
    for ka, kb, kc, kd in product((1, 4), (1, 4), (1, 4), (2, 3)):
        m = p["A"][ka] @ p["B"][kb] @ p["C"][kc] @ p["D"][kd]
        terms[(f"H{ka}A", f"H{kb}B", f"H{kc}C", f"H{kd}D")] = float(np.linalg.norm(m))
    factors = [p["A"][1] + p["A"][4], p["B"][1] + p["B"][4], p["C"][1] + p["C"][4], p["D"][2] + p["D"][3]]
    full = factors[0] @ factors[1] @ factors[2] @ factors[3]
    meet_dim = meet_all(chsh_subspaces(setting, tol), tol).dim
    return MeetZeroReport(terms, float(np.linalg.norm(full)), meet_dim, setup.degenerate, tol.zero_tol)


@dataclass(frozen=True)
class Proposition2Result:
    sum: float
    bound: int
    satisfied: bool
    tolerance: float = 0.0

    def to_json(self) -> dict:
        return {"sum": self.sum, "bound": self.bound, "satisfied": self.satisfied}


def proposition2_bound(subspaces, rho, tol: Tolerance | None = None) -> Proposition2Result:
    """Compare ``sum_i p(H_i|rho)`` against ``n - 1`` for subspaces whose meet is zero.

    The bound holds when the probabilities are Kolmogorov; ``satisfied``
    is allowed to come out false.
    """
    tol = tol or get_tolerance()
    subspaces = list(subspaces)
    if len(subspaces) < 1:
        raise ValueError("need at least one subspace")
    if meet_all(subspaces, tol).dim != 0:
        raise ValueError("the meet of the subspaces is not the zero subspace")
    total = float(sum(gleason_probability(h, rho, tol) for h in subspaces))
    bound = len(subspaces) - 1
    return Proposition2Result(total, bound, total <= bound + tol.zero_tol, tol.zero_tol)


@dataclass(frozen=True)
class BooleResult:
    lhs_sum: float
    joint: float
    closed_form: float
    violated: bool

    def to_json(self) -> dict:
        return {"lhs_sum": self.lhs_sum, "joint": self.joint, "violated": self.violated}


def boole_violation(setting: Su2Setting, tol: Tolerance | None = None) -> BooleResult:
    """Probabilities of the complements of the CHSH subspaces: their sum
    against the probability (always 1) of their join."""
    tol = tol or get_tolerance()
    rho = bell_state()
    complements = [orthocomplement(h, tol) for h in chsh_subspaces(setting, tol)]
    lhs = float(sum(gleason_probability(h, rho, tol) for h in complements))
    joint = gleason_probability(join_all(complements, tol), rho, tol)
    kappa, lam = closed_form_kappa_lambda(setting)
    return BooleResult(lhs, joint, 2.0 - 4.0 * kappa + 2.0 * lam, lhs < joint - tol.zero_tol)


@dataclass(frozen=True)
class CommutatorWitness:
    matrix: np.ndarray = field(repr=False)
    tensor_form: np.ndarray = field(repr=False)
    residual: float
    norm: float


def commutator_witness(setting: Su2Setting, tol: Tolerance | None = None) -> CommutatorWitness:
    """``[P(H1A v H4A), P(H1B v H4B)]`` by lattice joins, checked against
    ``Pi(x,1) x [Pi(x,1), Pi(a,b;1)] + Pi(x,0) x [Pi(x,0), Pi(a,b;0)]``."""
    h7a, h7b = chsh_subspaces(setting, tol)[:2]
    c = commutator(h7a.projector, h7b.projector)
    r1, r0 = spin_projectors(setting)
    tensor = np.kron(PI_X1, commutator(PI_X1, r1)) + np.kron(PI_X0, commutator(PI_X0, r0))
    return CommutatorWitness(c, tensor, float(np.linalg.norm(c - tensor)), float(np.linalg.norm(c)))
