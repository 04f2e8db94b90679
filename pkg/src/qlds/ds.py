"""Dempster-Shafer belief structures on small finite frames.

Subsets of a frame of size ``n`` are ``n``-bit integers. A mass function
stores only its focal elements.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import fsum
from typing import Callable

import numpy as np

from .linalg import Tolerance, get_tolerance

__all__ = [
    "Frame",
    "MassFunction",
    "belief",
    "plausibility",
    "delta",
    "combine",
    "employee_example",
    "random_mass_function",
    "Table1Row",
    "Table1Report",
    "check_table1",
]

MAX_FRAME = 24

AGE_BRACKETS = ("<25", "25-30", "30-35", "35-45", "45-50", ">50")


@dataclass(frozen=True)
class Frame:
    size: int

    def __post_init__(self):
        if not 1 <= self.size <= MAX_FRAME:
            raise ValueError(f"frame size must be in [1, {MAX_FRAME}], got {self.size}")

    @property
    def full(self) -> int:
        return (1 << self.size) - 1

    def complement(self, a: int) -> int:
        self.check(a)
        return self.full ^ a

    def check(self, a: int) -> int:
        if not 0 <= a <= self.full:
            raise ValueError(f"subset {a:#x} is outside a frame of size {self.size}")
        return a

    def subset(self, elements) -> int:
        mask = 0
        for e in elements:
            if not 0 <= e < self.size:
                raise ValueError(f"element {e} outside frame of size {self.size}")
            mask |= 1 << e
        return mask


@dataclass(frozen=True)
class MassFunction:
    """Normalized basic probability assignment (``m(empty) = 0``, total mass 1)."""

    frame: Frame
    masses: dict = field(default_factory=dict)

    def __post_init__(self):
        tol = get_tolerance()
        cleaned = {}
        for subset, w in self.masses.items():
            subset = self.frame.check(int(subset))
            w = float(w)
            if w < 0 or w > 1 + tol.zero_tol:
                raise ValueError(f"mass {w} on {subset:#x} outside [0, 1]")
            if subset == 0 and w > tol.zero_tol:
                raise ValueError("the empty set must carry zero mass")
            if w > 0 and subset:
                cleaned[subset] = cleaned.get(subset, 0.0) + w
        total = fsum(cleaned.values())
        if abs(total - 1.0) > tol.zero_tol:
            raise ValueError(f"masses sum to {total}, expected 1")
        object.__setattr__(self, "masses", dict(sorted(cleaned.items())))

    @classmethod
    def from_probabilities(cls, probs) -> "MassFunction":
        """Bayesian (Kolmogorov) mass function: all focal elements are singletons."""
        probs = list(probs)
        return cls(Frame(len(probs)), {1 << i: p for i, p in enumerate(probs) if p > 0})

    @property
    def is_kolmogorov(self) -> bool:
        return all(s & (s - 1) == 0 for s in self.masses)

    def belief(self, a: int) -> float:
        return belief(self, a)

    def plausibility(self, a: int) -> float:
        return plausibility(self, a)

    def belief_table(self) -> np.ndarray:
        """Belief of every subset, indexed by bitmask."""
        return _tables(self)[0]

    def plausibility_table(self) -> np.ndarray:
        return _tables(self)[1]

    def to_json(self) -> dict:
        return {
            "frame_size": self.frame.size,
            "masses": [{"subset": s, "weight": w} for s, w in self.masses.items()],
        }

    @classmethod
    def from_json(cls, obj: dict) -> "MassFunction":
        frame = Frame(int(obj["frame_size"]))
        masses = {}
        for entry in obj["masses"]:
            s = int(entry["subset"])
            masses[s] = masses.get(s, 0.0) + float(entry["weight"])
        return cls(frame, masses)


def _tables(m: MassFunction) -> tuple[np.ndarray, np.ndarray]:
    n = m.frame.size
    if n > 16:
        raise ValueError("dense tables are limited to frames of size <= 16")
    subsets = np.arange(1 << n)
    bel = np.zeros(1 << n)
    pl = np.zeros(1 << n)
    for focal, w in m.masses.items():
        bel[(subsets & focal) == focal] += w
        pl[(subsets & focal) != 0] += w
    return bel, pl


def belief(m: MassFunction, a: int) -> float:
    """Lower probability: total mass of focal elements inside ``a``."""
    a = m.frame.check(a)
    return fsum(w for s, w in m.masses.items() if s & ~a == 0)


def plausibility(m: MassFunction, a: int) -> float:
    """Upper probability: total mass of focal elements meeting ``a``."""
    a = m.frame.check(a)
    return fsum(w for s, w in m.masses.items() if s & a)


def delta(q: Callable[[int], float], a: int, b: int) -> float:
    """``q(A u B) - q(A) - q(B) + q(A n B)`` for any set function ``q``."""
    return q(a | b) - q(a) - q(b) + q(a & b)


def combine(m1: MassFunction, m2: MassFunction) -> MassFunction:
    """Dempster's rule of combination (normalized conjunctive rule)."""
    if m1.frame != m2.frame:
        raise ValueError("mass functions live on different frames")
    joint: dict[int, float] = {}
    for s1, w1 in m1.masses.items():
        for s2, w2 in m2.masses.items():
            joint[s1 & s2] = joint.get(s1 & s2, 0.0) + w1 * w2
    conflict = joint.pop(0, 0.0)
    if conflict >= 1.0 - get_tolerance().zero_tol:
        raise ValueError("total conflict: the combination is undefined")
    return MassFunction(m1.frame, {s: w / (1.0 - conflict) for s, w in joint.items()})


def employee_example(n1: int, n2: int, n3: int) -> tuple[MassFunction, int]:
    """The employee-age example and the event "under 35".

    The frame is six age brackets (``AGE_BRACKETS``). ``n1`` employees are
    known to be under 30, ``n2`` over 50 and ``n3`` somewhere between 25 and
    45. Returns the mass function and the bitmask of "under 35".
    """
    if min(n1, n2, n3) < 0 or n1 + n2 + n3 == 0:
        raise ValueError("employee counts must be nonnegative with a positive total")
    frame = Frame(len(AGE_BRACKETS))
    n = n1 + n2 + n3
    under_30 = frame.subset([0, 1])
    over_50 = frame.subset([5])
    between_25_45 = frame.subset([1, 2, 3])
    masses = {}
    for s, k in ((under_30, n1), (over_50, n2), (between_25_45, n3)):
        if k:
            masses[s] = k / n
    return MassFunction(frame, masses), frame.subset([0, 1, 2])


def random_mass_function(n: int, rng=None, focal: int | None = None) -> MassFunction:
    """Mass function with ``focal`` random nonempty focal elements and Dirichlet weights."""
    rng = np.random.default_rng(rng) if not isinstance(rng, np.random.Generator) else rng
    frame = Frame(n)
    k = focal if focal is not None else int(rng.integers(1, min(8, frame.full) + 1))
    k = min(k, frame.full)
    subsets = rng.choice(np.arange(1, frame.full + 1), size=k, replace=False)
    weights = rng.dirichlet(np.ones(k))
    return MassFunction(frame, {int(s): float(w) for s, w in zip(subsets, weights)})


@dataclass
class Table1Row:
    """One property of lower/upper probabilities.

    Rows of kind ``"may_fail"`` never fail; they record a witness when the
    property does fail, which is the interesting outcome for lower
    probabilities.
    """

    name: str
    column: str
    kind: str = "holds"
    passed: bool = True
    witness: tuple | None = None
    checked: int = 0

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "column": self.column,
            "kind": self.kind,
            "passed": self.passed,
            "witness": list(self.witness) if self.witness is not None else None,
            "checked": self.checked,
        }


@dataclass
class Table1Report:
    rows: list
    is_kolmogorov: bool
    exhaustive: bool

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.rows)

    def row(self, name: str, column: str) -> Table1Row:
        for r in self.rows:
            if r.name == name and r.column == column:
                return r
        raise KeyError((name, column))

    def to_json(self) -> dict:
        return {
            "passed": self.passed,
            "is_kolmogorov": self.is_kolmogorov,
            "exhaustive": self.exhaustive,
            "rows": [r.to_json() for r in self.rows],
        }


def _pairs(frame: Frame, trials: int | None, rng):
    if trials is None:
        if frame.size > 10:
            raise ValueError("exhaustive checks are limited to frames of size <= 10; pass trials")
        a, b = np.meshgrid(np.arange(frame.full + 1), np.arange(frame.full + 1), indexing="ij")
        return a.ravel(), b.ravel()
    rng = np.random.default_rng(rng) if not isinstance(rng, np.random.Generator) else rng
    hi = frame.full + 1
    a = rng.integers(0, hi, size=trials)
    b = rng.integers(0, hi, size=trials)
    # half the pairs are nested so the monotonicity rows get exercised
    nested = rng.random(trials) < 0.5
    b = np.where(nested, a | b, b)
    return a, b


def check_table1(
    m: MassFunction,
    trials: int | None = None,
    rng=None,
    tol: Tolerance | None = None,
) -> Table1Report:
    """Check every property of lower/upper (and, if additive, Kolmogorov) probabilities.

    With ``trials=None`` all ordered subset pairs are visited; otherwise
    ``trials`` random pairs are drawn.
    """
    tol = tol or get_tolerance()
    eps = tol.zero_tol
    frame = m.frame
    a, b = _pairs(frame, trials, rng)
    if frame.size <= 16:
        bel_t, pl_t = _tables(m)
        lo = lambda s: bel_t[s]  # noqa: E731
        up = lambda s: pl_t[s]  # noqa: E731
    else:
        lo = np.vectorize(lambda s: belief(m, int(s)), otypes=[float])
        up = np.vectorize(lambda s: plausibility(m, int(s)), otypes=[float])
    full = frame.full
    empty = np.zeros(1, dtype=np.int64)
    omega = np.full(1, full, dtype=np.int64)
    ab_union, ab_inter = a | b, a & b
    a_bar = full ^ a
    subset_ab = (a & ~b) == 0

    la, lb, lu, li, lbar = lo(a), lo(b), lo(ab_union), lo(ab_inter), lo(a_bar)
    ua, ub, uu, ui, ubar = up(a), up(b), up(ab_union), up(ab_inter), up(a_bar)

    rows: list[Table1Row] = []

    def add(name, column, ok, kind="holds"):
        ok = np.asarray(ok, dtype=bool)
        if ok.size == 1 and a.size != 1:
            ok = np.broadcast_to(ok, a.shape)
        row = Table1Row(name, column, kind=kind, checked=int(ok.size))
        bad = np.flatnonzero(~ok)
        if bad.size:
            i = int(bad[0])
            row.witness = (int(a[i]), int(b[i]))
            row.passed = kind == "may_fail"
        rows.append(row)

    add("monotone", "lower", ~subset_ab | (la <= lb + eps))
    add("monotone", "upper", ~subset_ab | (ua <= ub + eps))
    add("normalized", "lower", (abs(lo(empty)) <= eps) & (abs(lo(omega) - 1) <= eps))
    add("normalized", "upper", (abs(up(empty)) <= eps) & (abs(up(omega) - 1) <= eps))
    add("nonnegative_meet", "lower", li >= -eps)
    add("supermodular", "lower", lu - la - lb + li >= -eps)
    add("submodular", "upper", uu - ua - ub + ui <= eps)
    add("complement_sum", "lower", la + lbar <= 1 + eps)
    add("complement_sum", "upper", ua + ubar >= 1 - eps)
    add("boole", "lower", la + lb - lu >= -eps, kind="may_fail")
    add("boole", "upper", ua + ub - uu >= -eps)
    add("duality", "upper", abs(ua - (1 - lbar)) <= eps)

    if m.is_kolmogorov:
        q = lo
        add("monotone", "kolmogorov", ~subset_ab | (la <= lb + eps))
        add("normalized", "kolmogorov", (abs(q(empty)) <= eps) & (abs(q(omega) - 1) <= eps))
        add("additive", "kolmogorov", abs(lu - la - lb + li) <= eps)
        add("complement_sum", "kolmogorov", abs(la + lbar - 1) <= eps)
        add("boole", "kolmogorov", la + lb - lu >= -eps)
        add("lower_equals_upper", "kolmogorov", abs(la - ua) <= eps)

    return Table1Report(rows, m.is_kolmogorov, trials is None)
