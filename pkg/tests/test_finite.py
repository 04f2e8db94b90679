import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from qlds.additivity import additivity_operator
from qlds.finite import (
    CoherentFamily,
    FiniteSystem,
    coherent_join_projector,
    coherent_overlap,
    coherent_pair_D,
    direct_overlap,
    displacement,
    gram_schmidt_join_projector,
    resolution_of_identity,
)
from qlds.lattice import join

ATOL = 1e-10
odd_dims = st.sampled_from([3, 5, 7])
seeds = st.integers(0, 2**32 - 1)


def family_and_pair(d, seed):
    fam = CoherentFamily.random(d, seed)
    rng = np.random.default_rng(seed + 1)
    p = tuple(int(x) for x in rng.integers(0, d, size=2))
    q = p
    while q == p:
        q = tuple(int(x) for x in rng.integers(0, d, size=2))
    return fam, p, q


class TestSystem:
    @pytest.mark.parametrize("d", [1, 2, 4, 6, 10])
    def test_rejects_bad_dimension(self, d):
        with pytest.raises(ValueError, match="odd"):
            FiniteSystem(d)

    def test_half_is_inverse_of_two(self):
        for d in (3, 5, 7, 9, 11):
            assert 2 * FiniteSystem(d).half % d == 1

    def test_d3_z(self):
        sys = FiniteSystem(3)
        w = np.exp(2j * np.pi / 3)
        np.testing.assert_allclose(displacement(sys, 1, 0), np.diag([1, w, w**2]), atol=1e-14)

    def test_identity_displacement(self):
        sys = FiniteSystem(5)
        np.testing.assert_allclose(displacement(sys, 0, 0), np.eye(5), atol=1e-14)

    def test_shift(self):
        sys = FiniteSystem(5)
        np.testing.assert_allclose(sys.X @ sys.position_state(4), sys.position_state(0))
        np.testing.assert_allclose(sys.X @ sys.position_state(1), sys.position_state(2))

    @pytest.mark.parametrize("d", [3, 5, 7])
    def test_weyl_relation(self, d):
        sys = FiniteSystem(d)
        np.testing.assert_allclose(sys.X @ sys.Z, sys.omega(-1) * sys.Z @ sys.X, atol=1e-13)

    @pytest.mark.parametrize("d", [3, 5, 7])
    def test_fourier(self, d):
        sys = FiniteSystem(d)
        f = sys.fourier
        np.testing.assert_allclose(f @ f.conj().T, np.eye(d), atol=1e-13)
        # momentum states are eigenvectors of the shift
        for m in range(d):
            v = sys.momentum_state(m)
            np.testing.assert_allclose(sys.X @ v, sys.omega(-m) * v, atol=1e-13)

    @given(odd_dims, st.integers(-20, 20), st.integers(-20, 20))
    def test_displacement_unitary(self, d, a, b):
        u = displacement(FiniteSystem(d), a, b)
        np.testing.assert_allclose(u @ u.conj().T, np.eye(d), atol=1e-12)

    @given(odd_dims, st.integers(0, 20), st.integers(0, 20))
    def test_displacement_inverse(self, d, a, b):
        sys = FiniteSystem(d)
        u = displacement(sys, a, b)
        np.testing.assert_allclose(displacement(sys, -a, -b), u.conj().T, atol=1e-12)


class TestFamily:
    def test_rejects_position_state(self):
        with pytest.raises(ValueError, match="position or momentum"):
            CoherentFamily(FiniteSystem(3), [1, 0, 0])

    def test_rejects_momentum_state(self):
        sys = FiniteSystem(5)
        with pytest.raises(ValueError, match="position or momentum"):
            CoherentFamily(sys, sys.momentum_state(2))

    def test_rejects_wrong_length(self):
        with pytest.raises(ValueError):
            CoherentFamily(FiniteSystem(3), [1, 1])

    def test_states_normalized(self):
        fam = CoherentFamily.random(5, 3)
        np.testing.assert_allclose(np.linalg.norm(fam.states, axis=-1), 1.0, atol=1e-13)
        assert len(fam.index_pairs()) == 25

    def test_seed_is_deterministic(self):
        a, b = CoherentFamily.random(5, 11), CoherentFamily.random(5, 11)
        np.testing.assert_array_equal(a.fiducial, b.fiducial)

    @pytest.mark.parametrize("d", [3, 5, 7])
    def test_resolution_of_identity(self, d):
        assert resolution_of_identity(CoherentFamily.random(d, d)) <= ATOL


class TestOverlap:
    @given(odd_dims, seeds)
    def test_formula_matches_inner_product(self, d, seed):
        fam, p, q = family_and_pair(d, seed)
        assert abs(coherent_overlap(fam, p, q) - direct_overlap(fam, p, q)) <= ATOL

    def test_all_pairs_d3(self):
        fam = CoherentFamily.random(3, 0)
        for p in fam.index_pairs():
            for q in fam.index_pairs():
                assert abs(coherent_overlap(fam, p, q) - direct_overlap(fam, p, q)) <= ATOL

    @given(odd_dims, seeds)
    def test_squared_overlap_is_trace(self, d, seed):
        fam, p, q = family_and_pair(d, seed)
        lam = coherent_overlap(fam, p, q)
        tr = np.trace(fam.projector(*p) @ fam.projector(*q))
        assert abs(abs(lam) ** 2 - tr) <= ATOL


class TestPairOperator:
    @given(odd_dims, seeds)
    def test_closed_form_matches_lattice(self, d, seed):
        fam, p, q = family_and_pair(d, seed)
        closed = coherent_pair_D(fam, p, q).matrix
        lattice = additivity_operator(fam.subspace(*p), fam.subspace(*q)).matrix
        assert np.linalg.norm(closed - lattice) <= ATOL

    @given(odd_dims, seeds)
    def test_join_projector_routes(self, d, seed):
        fam, p, q = family_and_pair(d, seed)
        a = coherent_join_projector(fam, p, q)
        b = gram_schmidt_join_projector(fam, p, q)
        c = join(fam.subspace(*p), fam.subspace(*q)).projector
        assert np.linalg.norm(a - b) <= ATOL
        assert np.linalg.norm(a - c) <= ATOL

    @given(odd_dims, seeds)
    def test_triple_products(self, d, seed):
        fam, p, q = family_and_pair(d, seed)
        pp, pq = fam.projector(*p), fam.projector(*q)
        lam2 = abs(coherent_overlap(fam, p, q)) ** 2
        assert np.linalg.norm(pp @ pq @ pp - lam2 * pp) <= ATOL
        assert np.linalg.norm(pq @ pp @ pq - lam2 * pq) <= ATOL

    @pytest.mark.parametrize("d", [3, 5, 7])
    def test_some_pair_is_nonadditive(self, d):
        fam = CoherentFamily.random(d, 0)
        norms = [coherent_pair_D(fam, (0, 0), q).norm() for q in fam.index_pairs() if q != (0, 0)]
        assert max(norms) > 1e-3

    def test_trace_zero(self):
        fam = CoherentFamily.random(5, 2)
        assert abs(coherent_pair_D(fam, (0, 0), (1, 2)).trace) <= ATOL

    def test_coincident_indices(self):
        fam = CoherentFamily.random(3, 0)
        with pytest.raises(ValueError, match="coincide"):
            coherent_pair_D(fam, (1, 1), (4, 1))
