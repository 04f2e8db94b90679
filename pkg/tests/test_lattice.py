import numpy as np
import pytest
import sympy
from hypothesis import given
from hypothesis import strategies as st

from qlds.lattice import (
    Subspace,
    boolean_algebra_from_basis,
    commutes,
    join,
    leq,
    meet,
    orthocomplement,
    transport_by_unitary,
)
from qlds.sampling import random_subspace, random_unitary

ZERO_TOL = 1e-9

TABLE2_BASIS = 0.5 * np.array([[1, 1, 1, 1], [1, -1, 1, -1], [1, 1, -1, -1], [1, -1, -1, 1]]).T


@pytest.fixture
def h3_pair():
    return Subspace.span([1, 0, 0]), Subspace.span([1, 1, 0])


def random_pair(seed):
    """Random pair in C^d, sometimes sharing a common subspace so meets are nontrivial."""
    rng = np.random.default_rng(seed)
    d = int(rng.integers(2, 9))
    k1, k2 = (int(k) for k in rng.integers(0, d + 1, size=2))
    h1, h2 = random_subspace(d, k1, rng), random_subspace(d, k2, rng)
    if rng.random() < 0.5 and min(k1, k2) >= 1:
        shared = random_subspace(d, 1, rng)
        h1 = join(h1, shared)
        h2 = join(h2, shared)
    return h1, h2


pairs = st.integers(0, 2**32 - 1).map(random_pair)


class TestBasics:
    def test_zero_and_full(self):
        assert Subspace.zero(4).dim == 0
        assert np.array_equal(Subspace.full(3).projector, np.eye(3))

    def test_projector_invariants(self, rng):
        h = random_subspace(6, 3, rng)
        p = h.projector
        assert np.linalg.norm(p @ p - p) <= ZERO_TOL
        assert np.linalg.norm(p - p.conj().T) <= ZERO_TOL
        assert abs(np.trace(p) - 3) <= ZERO_TOL

    def test_equality_ignores_basis(self):
        a = Subspace.span(np.array([[1, 0], [0, 1], [0, 0]]))
        b = Subspace.span(np.array([[1, 1], [1j, -1j], [0, 0]]))
        assert a == b
        assert a != Subspace.span([0, 0, 1])

    def test_json_round_trip(self, rng):
        h = random_subspace(5, 2, rng)
        assert Subspace.from_json(h.to_json()) == h
        assert Subspace.from_json(Subspace.zero(3).to_json()).dim == 0

    def test_from_projector_rejects_garbage(self):
        with pytest.raises(ValueError):
            Subspace.from_projector(np.array([[1, 1], [0, 1]]))

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError, match="mismatch"):
            join(Subspace.full(2), Subspace.full(3))
        with pytest.raises(ValueError, match="mismatch"):
            meet(Subspace.full(2), Subspace.full(3))


class TestJoinMeet:
    def test_h3_join(self, h3_pair):
        np.testing.assert_allclose(join(*h3_pair).projector, np.diag([1, 1, 0]), atol=1e-15)

    def test_h3_meet(self, h3_pair):
        assert meet(*h3_pair).dim == 0

    def test_join_with_zero(self, rng):
        h = random_subspace(4, 2, rng)
        assert join(h, Subspace.zero(4)) == h

    def test_join_with_complement(self, rng):
        h = random_subspace(5, 2, rng)
        assert join(h, orthocomplement(h)) == Subspace.full(5)
        assert meet(h, orthocomplement(h)).dim == 0

    def test_meet_with_full(self, rng):
        h = random_subspace(4, 3, rng)
        assert meet(h, Subspace.full(4)) == h

    def test_meet_h7a_h5a(self):
        h7a = Subspace.span(np.array([[1, 0], [0, 1], [0, 1], [1, 0]]))  # (a,b,b,a)
        h5a = Subspace.span(np.array([[1, 0], [0, 1], [1, 0], [0, 1]]))  # (a,b,a,b)
        # oracle: exact null space of the stacked membership constraints
        constraints = sympy.Matrix([[1, 0, 0, -1], [0, 1, -1, 0], [1, 0, -1, 0], [0, 1, 0, -1]])
        null = constraints.nullspace()
        assert len(null) == 1
        expected = Subspace.span(np.array(null[0], dtype=float).reshape(-1))
        got = meet(h7a, h5a)
        assert got.dim == 1
        assert got == expected == Subspace.span([1, 1, 1, 1])


class TestComplement:
    def test_zero(self):
        assert orthocomplement(Subspace.zero(3)) == Subspace.full(3)

    def test_h1a(self):
        perp = orthocomplement(Subspace.span([1, 1, 1, 1]))
        assert perp.dim == 3
        for v in ([1, 0, 0, -1], [0, 1, 0, -1], [0, 0, 1, -1], [2, -1, 3, -4]):
            assert perp.contains(np.array(v, dtype=float))
        assert not perp.contains(np.array([1.0, 1, 1, 1]))

    def test_involution(self, rng):
        h = random_subspace(6, 4, rng)
        assert orthocomplement(orthocomplement(h)) == h

    def test_projector_is_identity_minus(self, rng):
        h = random_subspace(5, 2, rng)
        np.testing.assert_allclose(orthocomplement(h).projector, np.eye(5) - h.projector, atol=1e-12)


class TestOrder:
    def test_zero_below_everything(self, rng):
        assert leq(Subspace.zero(4), random_subspace(4, 2, rng))

    def test_h1a_below_h5a(self):
        h5a = Subspace.span(np.array([[1, 0], [0, 1], [1, 0], [0, 1]]))
        assert leq(Subspace.span([1, 1, 1, 1]), h5a)

    def test_h3_not_ordered(self, h3_pair):
        assert not leq(*h3_pair)


class TestCommutes:
    def test_self(self, rng):
        h = random_subspace(5, 2, rng)
        assert commutes(h, h)

    def test_h3_pair(self, h3_pair):
        assert not commutes(*h3_pair)

    def test_boolean_algebra_elements(self):
        b = boolean_algebra_from_basis(TABLE2_BASIS)
        assert all(commutes(b[i], b[j]) for i in range(16) for j in range(16))

    @given(pairs)
    def test_agrees_with_projector_commutator(self, pair):
        h1, h2 = pair
        comm = np.linalg.norm(h1.projector @ h2.projector - h2.projector @ h1.projector)
        assert commutes(h1, h2) == (comm <= ZERO_TOL)

    @given(pairs)
    def test_symmetric_and_complement_stable(self, pair):
        h1, h2 = pair
        c = commutes(h1, h2)
        assert commutes(h2, h1) == c
        assert commutes(h1, orthocomplement(h2)) == c


class TestLemma:
    @given(pairs)
    def test_absorption(self, pair):
        h1, h2 = pair
        p1, pm, pj = h1.projector, meet(h1, h2).projector, join(h1, h2).projector
        assert np.linalg.norm(pm @ p1 - pm) <= ZERO_TOL
        assert np.linalg.norm(p1 @ pm - pm) <= ZERO_TOL
        assert np.linalg.norm(pj @ p1 - p1) <= ZERO_TOL
        assert np.linalg.norm(p1 @ pj - p1) <= ZERO_TOL

    @given(pairs)
    def test_complement_projectors(self, pair):
        h, _ = pair
        p, q = h.projector, orthocomplement(h).projector
        assert np.linalg.norm(p @ q) <= ZERO_TOL
        assert np.linalg.norm(p + q - np.eye(h.ambient_dim)) <= ZERO_TOL

    @given(st.integers(0, 2**32 - 1))
    def test_orthogonal_projectors_add(self, seed):
        rng = np.random.default_rng(seed)
        d = int(rng.integers(2, 9))
        u = random_unitary(d, rng)
        k = int(rng.integers(0, d + 1))
        h1, h2 = Subspace(u[:, :k]), Subspace(u[:, k : k + int(rng.integers(0, d - k + 1))])
        assert np.linalg.norm(h1.projector @ h2.projector) <= ZERO_TOL
        assert meet(h1, h2).dim == 0
        assert np.linalg.norm(h1.projector + h2.projector - join(h1, h2).projector) <= ZERO_TOL

    def test_zero_meet_does_not_imply_orthogonal(self, h3_pair):
        h1, h2 = h3_pair
        assert meet(h1, h2).dim == 0
        assert np.linalg.norm(h1.projector @ h2.projector) > 0.1

    @given(pairs)
    def test_modularity_of_height(self, pair):
        h1, h2 = pair
        assert join(h1, h2).dim + meet(h1, h2).dim == h1.dim + h2.dim

    @given(st.integers(0, 2**32 - 1))
    def test_commuting_pair_partitions_identity(self, seed):
        rng = np.random.default_rng(seed)
        d = int(rng.integers(2, 9))
        b = boolean_algebra_from_basis(random_unitary(d, rng))
        h1, h2 = b[int(rng.integers(0, b.size))], b[int(rng.integers(0, b.size))]
        h1p, h2p = orthocomplement(h1), orthocomplement(h2)
        parts = [meet(h1, h2), meet(h1p, h2), meet(h1, h2p), meet(h1p, h2p)]
        for i in range(4):
            for j in range(i + 1, 4):
                assert np.linalg.norm(parts[i].projector @ parts[j].projector) <= ZERO_TOL
        total = sum(p.projector for p in parts)
        assert np.linalg.norm(total - np.eye(d)) <= ZERO_TOL


class TestBooleanAlgebra:
    def test_qubit(self):
        b = boolean_algebra_from_basis(np.eye(2))
        assert len(b) == 4
        assert b[0].dim == 0 and b[3] == Subspace.full(2)
        assert b[1] == Subspace.span([1, 0]) and b[2] == Subspace.span([0, 1])

    def test_table2_elements(self):
        b = boolean_algebra_from_basis(TABLE2_BASIS)
        assert b.count_by_dim() == [1, 4, 6, 4, 1]
        table2 = {
            "H1": [[1, 1, 1, 1]],
            "H5": [[1, 0, 1, 0], [0, 1, 0, 1]],
            "H6": [[1, 1, 0, 0], [0, 0, 1, 1]],
            "H7": [[1, 0, 0, 1], [0, 1, 1, 0]],
            "H7_perp": [[1, 0, 0, -1], [0, 1, -1, 0]],
        }
        for vecs in table2.values():
            assert Subspace.span(np.array(vecs, dtype=float).T) in b

    @pytest.mark.parametrize("d", [1, 2, 3, 5, 8])
    def test_counts_are_binomial(self, d, rng):
        b = boolean_algebra_from_basis(random_unitary(d, rng))
        assert b.count_by_dim() == b.expected_counts(d)
        assert sum(b.count_by_dim()) == 2**d

    def test_closed_under_operations(self, rng):
        b = boolean_algebra_from_basis(random_unitary(4, rng))
        for i in range(16):
            assert b.index_of(orthocomplement(b[i])) == 15 ^ i
            for j in range(16):
                assert b.index_of(join(b[i], b[j])) == i | j
                assert b.index_of(meet(b[i], b[j])) == i & j

    def test_rejects_non_orthonormal(self):
        with pytest.raises(ValueError, match="orthonormal"):
            boolean_algebra_from_basis(np.array([[1, 1], [0, 1]]))

    def test_lazy_elements_beyond_limit(self, rng):
        b = boolean_algebra_from_basis(random_unitary(13, rng))
        assert not b._cache
        assert b[(1 << 13) - 1].dim == 13
        assert b[0b101].dim == 2


class TestTransport:
    def test_identity(self, rng):
        b = boolean_algebra_from_basis(random_unitary(3, rng))
        c = transport_by_unitary(b, np.eye(3))
        assert all(b[m] == c[m] for m in range(8))

    def test_h5_survives_local_rotation(self, rng):
        b_a = boolean_algebra_from_basis(TABLE2_BASIS)
        u = random_unitary(2, rng)
        b_b = transport_by_unitary(b_a, np.kron(np.eye(2), u))
        assert b_b[0b0011] == b_a[0b0011]
        assert b_b[0b1100] == b_a[0b1100]
        assert all(commutes(b_b[i], b_b[j]) for i in range(16) for j in range(16))

    def test_rejects_non_unitary(self, rng):
        b = boolean_algebra_from_basis(np.eye(2))
        with pytest.raises(ValueError, match="unitary"):
            transport_by_unitary(b, np.array([[1, 1], [0, 1]]))
