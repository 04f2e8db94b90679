"""Subspace lattices, generalized additivity, Dempster-Shafer readings of
quantum probabilities, and the CHSH construction for two spins."""

from .additivity import (
    AdditivityOperator,
    DensityMatrix,
    PairClassification,
    Verdict,
    additivity_operator,
    classify_pair,
    d_scalar,
    gleason_probability,
    verify_proposition1,
)
from .lattice import (
    BooleanAlgebra,
    Subspace,
    boolean_algebra_from_basis,
    commutes,
    join,
    leq,
    meet,
    orthocomplement,
    transport_by_unitary,
)
from .linalg import Tolerance, get_tolerance, set_tolerance, tolerance

__version__ = "0.1.0"
