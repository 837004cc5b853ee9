import itertools

import hypothesis.strategies as st
import numpy as np
import pytest
from hypothesis import given, settings

from annealer_audit.errors import DimensionMismatchError, SizeCapError
from annealer_audit.ising import (
    IsingInstance,
    QuboInstance,
    binary_to_spins,
    brute_force_ground,
    energies,
    energy,
    qubo_to_ising,
    random_instance,
    spins_to_binary,
    topology_edges,
)


def all_configs(n):
    return [np.array(c, dtype=np.int8) for c in itertools.product((-1, 1), repeat=n)]


class TestInstance:
    def test_pairs_normalised(self):
        inst = IsingInstance(3, {(2, 0): 1.5})
        assert inst.couplings == {(0, 2): 1.5}

    @pytest.mark.parametrize(
        "couplings, fields",
        [
            ({(0, 0): 1.0}, {}),
            ({(0, 3): 1.0}, {}),
            ({}, {5: 1.0}),
            ({(-1, 0): 1.0}, {}),
        ],
    )
    def test_invalid(self, couplings, fields):
        with pytest.raises(ValueError):
            IsingInstance(3, couplings, fields)

    def test_duplicate_pair_in_lists(self):
        with pytest.raises(ValueError):
            IsingInstance.from_lists(3, [[0, 1, 1.0], [1, 0, 2.0]])

    def test_dense_views(self):
        inst = IsingInstance(3, {(0, 1): 2.0}, {2: -1.0})
        np.testing.assert_array_equal(inst.coupling_matrix, [[0, 2, 0], [2, 0, 0], [0, 0, 0]])
        np.testing.assert_array_equal(inst.field_vector, [0, 0, -1])


class TestEnergy:
    def test_aligned_pair(self):
        assert energy(IsingInstance(2, {(0, 1): 1.0}), [1, 1]) == 1.0

    def test_antialigned_pair(self):
        assert energy(IsingInstance(2, {(0, 1): 1.0}), [1, -1]) == -1.0

    def test_single_field(self):
        assert energy(IsingInstance(1, {}, {0: 2.0}), [-1]) == -2.0

    def test_dimension_mismatch(self, ferromagnet):
        with pytest.raises(DimensionMismatchError):
            energy(ferromagnet, [1, 1, 1])

    def test_rejects_non_spin_values(self, ferromagnet):
        with pytest.raises(ValueError):
            energy(ferromagnet, [1, 0])

    def test_vectorised_matches_scalar(self, small_instance):
        configs = all_configs(small_instance.num_spins)
        vec = energies(small_instance, np.array(configs))
        ref = [energy(small_instance, c) for c in configs]
        np.testing.assert_allclose(vec, ref, rtol=0, atol=1e-12)

    @settings(deadline=None, max_examples=30)
    @given(seed=st.integers(0, 2**32 - 1), n=st.integers(1, 7))
    def test_global_flip_symmetry_without_fields(self, seed, n):
        inst = random_instance(n, "full", 0.3, 1.0, 0.0, seed=seed)
        for c in all_configs(n):
            assert energy(inst, c) == energy(inst, -c)


class TestQubo:
    def test_single_diagonal(self):
        inst, offset = qubo_to_ising(QuboInstance([[1.0]]))
        assert inst.fields == {0: 0.5}
        assert offset == 0.5
        assert energy(inst, [1]) + offset == 1.0
        assert energy(inst, [-1]) + offset == 0.0

    def test_zero_matrix(self):
        inst, offset = qubo_to_ising(QuboInstance(np.zeros((3, 3))))
        assert inst.couplings == {} and inst.fields == {} and offset == 0.0

    def test_off_diagonal_example(self):
        q = QuboInstance([[0.0, 1.0], [0.0, 0.0]])
        inst, offset = qubo_to_ising(q)
        assert inst.couplings == {(0, 1): 0.25}
        assert inst.fields == {0: 0.25, 1: 0.25}
        assert offset == 0.25
        for x in itertools.product((0, 1), repeat=2):
            s = binary_to_spins(x)
            assert q.evaluate(x) == pytest.approx(energy(inst, s) + offset, abs=1e-15)

    def test_symmetric_input_folded(self):
        sym = QuboInstance([[1.0, 0.5], [0.5, -2.0]])
        np.testing.assert_array_equal(sym.matrix, [[1.0, 1.0], [0.0, -2.0]])

    def test_entries_accumulate(self):
        q = QuboInstance.from_entries(2, [[0, 1, 1.0], [1, 0, 2.0]])
        np.testing.assert_array_equal(q.matrix, [[0.0, 3.0], [0.0, 0.0]])

    @settings(deadline=None, max_examples=25)
    @given(
        n=st.integers(1, 12),
        seed=st.integers(0, 2**32 - 1),
        symmetric=st.booleans(),
    )
    def test_round_trip_exhaustive(self, n, seed, symmetric):
        rng = np.random.default_rng(seed)
        q = rng.normal(size=(n, n))
        q = (q + q.T) / 2 if symmetric else np.triu(q)
        qubo = QuboInstance(q)
        inst, offset = qubo_to_ising(qubo)
        xs = np.array(list(itertools.product((0, 1), repeat=n)), dtype=float)
        direct = np.einsum("ki,ij,kj->k", xs, q, xs)
        via_ising = energies(inst, 2 * xs - 1) + offset
        np.testing.assert_allclose(via_ising, direct, rtol=0, atol=1e-9)

    def test_binary_spin_maps(self):
        s = np.array([1, -1, -1, 1])
        np.testing.assert_array_equal(binary_to_spins(spins_to_binary(s)), s)


class TestBruteForce:
    def test_ferromagnet(self, ferromagnet):
        e0, states = brute_force_ground(ferromagnet)
        assert e0 == -1.0
        assert sorted(tuple(s) for s in states) == [(-1, -1), (1, 1)]

    def test_frustrated_triangle(self, triangle):
        # oracle: enumerate all 8 configurations by hand
        values = {c: energy(triangle, np.array(c)) for c in itertools.product((-1, 1), repeat=3)}
        expected_min = min(values.values())
        expected_states = sorted(c for c, v in values.items() if v == expected_min)
        assert expected_min == -1.0 and len(expected_states) == 6
        e0, states = brute_force_ground(triangle)
        assert e0 == expected_min
        assert sorted(tuple(s) for s in states) == expected_states

    def test_single_spin(self):
        e0, states = brute_force_ground(IsingInstance(1, {}, {0: 1.0}))
        assert e0 == -1.0
        assert [tuple(s) for s in states] == [(-1,)]

    def test_size_cap(self):
        with pytest.raises(SizeCapError):
            brute_force_ground(IsingInstance(5), max_spins=4)

    def test_partition_independent(self, small_instance):
        ref = brute_force_ground(small_instance)
        for block, workers in [(1, 1), (7, 1), (16, 4), (1 << 20, 1)]:
            e0, states = brute_force_ground(small_instance, block_size=block, workers=workers)
            assert e0 == ref[0]
            assert [tuple(s) for s in states] == [tuple(s) for s in ref[1]]

    def test_lower_bound_on_random_configs(self):
        inst = random_instance(14, "grid", 0.0, 1.0, 0.3, seed=5)
        e0, _ = brute_force_ground(inst)
        rng = np.random.default_rng(0)
        for _ in range(500):
            assert e0 <= energy(inst, rng.choice([-1, 1], size=14)) + 1e-12


class TestRandomInstance:
    def test_zero_noise_full(self):
        inst = random_instance(3, "full", base_coupling=1.0, noise_scale=0.0, field_scale=0.0, seed=1)
        assert inst.couplings == {(0, 1): 1.0, (0, 2): 1.0, (1, 2): 1.0}
        assert inst.fields == {}

    def test_deterministic(self):
        assert random_instance(6, "grid", 0.2, 0.5, 0.1, seed=9) == random_instance(6, "grid", 0.2, 0.5, 0.1, seed=9)

    def test_seeds_differ(self):
        assert random_instance(6, seed=1) != random_instance(6, seed=2)

    def test_noise_mean(self):
        # 10^4 couplings: U[-0.5, 0.5] noise has std 0.5/sqrt(3)
        n = 142  # 142 * 141 / 2 = 10011 pairs
        inst = random_instance(n, "full", base_coupling=0.7, noise_scale=0.5, seed=4)
        values = np.array(list(inst.couplings.values()))
        assert values.size >= 10_000
        se = 0.5 / np.sqrt(3) / np.sqrt(values.size)
        assert abs(values.mean() - 0.7) < 3 * se
        assert values.min() >= 0.2 and values.max() <= 1.2

    def test_grid_edges(self):
        assert topology_edges(4, "grid") == [(0, 1), (0, 2), (1, 3), (2, 3)]

    def test_edge_list(self):
        inst = random_instance(4, [(3, 1), (0, 2)], noise_scale=0.0, base_coupling=1.0)
        assert inst.couplings == {(0, 2): 1.0, (1, 3): 1.0}

    def test_unknown_topology(self):
        with pytest.raises(ValueError, match="unknown topology"):
            random_instance(4, "hexagonal")

    def test_negative_scales(self):
        with pytest.raises(ValueError):
            random_instance(4, noise_scale=-1.0)
