"""Chain-level tests: state indexing, transition structure, stationary
solvers against hand-solvable chains, gradients, and derived rates."""

import numpy as np
import pytest
import scipy.sparse as sp

import riskevo as rv
from riskevo import Strategy

SMALL = rv.ModelParams(Z=9, N=4, r=0.03)


def small_model(params=SMALL):
    model, _ = rv.solve_stationary(params)
    return model


class TestStateIndexing:
    def test_state_count_z50(self):
        assert rv.simplex_size(50) == 1326

    def test_state_count_z1(self):
        assert rv.simplex_size(1) == 3

    @pytest.mark.parametrize("Z", [1, 2, 5, 13])
    def test_roundtrip_bijection(self, Z):
        seen = set()
        for i_s in range(Z + 1):
            for i_i in range(Z + 1 - i_s):
                idx = rv.state_index(i_s, i_i, Z)
                assert rv.index_to_state(idx, Z) == (i_s, i_i)
                seen.add(idx)
        assert seen == set(range(rv.simplex_size(Z)))

    def test_invalid_state_rejected(self):
        with pytest.raises(ValueError):
            rv.state_index(3, 3, 5)
        with pytest.raises(ValueError):
            rv.index_to_state(rv.simplex_size(5), 5)

    @pytest.mark.parametrize("strategies,edge", [
        (("S", "A"), lambda s, Z: s[1] == 0),
        (("I", "A"), lambda s, Z: s[0] == 0),
        (("S", "I"), lambda s, Z: s[0] + s[1] == Z),
    ])
    def test_restricted_spaces_are_edges(self, strategies, edge):
        Z = 12
        space = rv.StateSpace.build(Z, rv.params.canonical_strategies(strategies))
        assert len(space) == Z + 1
        assert all(edge(s, Z) for s in space.states)
        for i, s in enumerate(space.states):
            assert space.index_of(*s) == i


class TestFermi:
    def test_equal_fitness(self):
        assert rv.fermi(1.3, 1.3, 10.0) == pytest.approx(0.5, abs=1e-15)

    def test_zero_selection_intensity(self):
        assert rv.fermi(5.0, -3.0, 0.0) == pytest.approx(0.5, abs=1e-15)

    def test_known_value(self):
        assert rv.fermi(0.0, 0.1, 10.0) == pytest.approx(
            0.7310585786300049, abs=1e-13)

    def test_overflow_safe(self):
        assert rv.fermi(-1e6, 1e6, 10.0) == pytest.approx(1.0)
        assert rv.fermi(1e6, -1e6, 10.0) == pytest.approx(0.0)


class TestTransitionProbs:
    def test_hand_value_tiny_population(self):
        # Z=2, one S and one A, neutral and mutation-free:
        # (1/2) * (1/1) * (1/2) = 0.25
        params = rv.ModelParams(Z=2, N=2, mu=0.0, beta=0.0, r=0.03)
        tables = rv.build_payoff_tables(params)
        space = rv.StateSpace.build(params.Z, params.strategies)
        ftable = rv.build_fitness_table(params, tables, space.states)
        got = rv.transition_prob((1, 0), Strategy.S, Strategy.A, params, ftable)
        assert got == pytest.approx(0.25, abs=1e-15)

    def test_zero_when_source_absent(self):
        model = small_model()
        assert rv.transition_prob((0, 4), Strategy.S, Strategy.A,
                                  model.params, model.ftable) == 0.0

    def test_pure_mutation(self):
        params = SMALL.replace(mu=1.0)
        model = small_model(params)
        got = rv.transition_prob((3, 2), Strategy.S, Strategy.I,
                                 params, model.ftable)
        assert got == pytest.approx(3 / (2 * params.Z), abs=1e-15)

    def test_same_strategy_rejected(self):
        model = small_model()
        with pytest.raises(ValueError):
            rv.transition_prob((3, 2), Strategy.S, Strategy.S,
                               model.params, model.ftable)


class TestKernel:
    def test_row_sums(self):
        model = small_model()
        sums = np.asarray(model.kernel.sum(axis=1)).ravel()
        assert np.max(np.abs(sums - 1.0)) < 1e-12

    def test_row_structure_full_scale(self):
        model = small_model(rv.ModelParams())
        assert model.kernel.shape == (1326, 1326)
        nnz_per_row = np.diff(model.kernel.indptr)
        assert nnz_per_row.max() <= 7
        sums = np.asarray(model.kernel.sum(axis=1)).ravel()
        assert np.max(np.abs(sums - 1.0)) < 1e-12

    def test_moves_stay_local_and_conserve_count(self):
        model = small_model()
        coo = model.kernel.tocoo()
        states = model.space.states
        for i, j in zip(coo.row, coo.col):
            if i == j:
                continue
            a, b = states[i], states[j]
            assert abs(a[0] - b[0]) + abs(a[1] - b[1]) <= 2
            assert 0 <= b[0] + b[1] <= model.space.Z

    def test_corner_all_pool(self):
        # no insured role models to copy, but mutation still flows out
        model = small_model()
        params = model.params
        corner = model.space.index_of(params.Z, 0)
        target = model.space.index_of(params.Z - 1, 1)
        got = model.kernel[corner, target]
        assert got == pytest.approx(params.mu / 2, abs=1e-15)

    def test_entries_within_unit_interval(self):
        model = small_model()
        assert model.kernel.min() >= 0.0
        assert model.kernel.max() <= 1.0


def handmade_model(kernel_rows, mu=0.1):
    """TransitionModel wrapper around an explicit 3-state kernel on Z=1."""
    params = rv.ModelParams(mu=mu)
    space = rv.StateSpace.build(1, rv.STRATEGY_ORDER)
    kernel = sp.csr_matrix(np.asarray(kernel_rows, dtype=float))
    ftable = rv.FitnessTable(pool=None, index=None, loner=0.0)
    return rv.TransitionModel(space=space, kernel=kernel, params=params,
                              ftable=ftable)


class TestStationary:
    def test_three_state_uniform_chain(self):
        # pure mutation between the Z=1 corners: uniform by symmetry
        mu = 0.3
        rows = [[1 - mu, mu / 2, mu / 2],
                [mu / 2, 1 - mu, mu / 2],
                [mu / 2, mu / 2, 1 - mu]]
        result = rv.stationary(handmade_model(rows))
        assert result.probs == pytest.approx([1 / 3] * 3, abs=1e-12)
        assert result.adoption == pytest.approx([1 / 3] * 3, abs=1e-12)

    def test_three_state_chain_vs_dense_eigen_solve(self):
        rng = np.random.default_rng(7)
        mat = rng.random((3, 3)) + 0.05
        mat /= mat.sum(axis=1, keepdims=True)
        result = rv.stationary(handmade_model(mat))
        vals, vecs = np.linalg.eig(mat.T)
        lead = np.argmin(np.abs(vals - 1.0))
        expected = np.real(vecs[:, lead])
        expected /= expected.sum()
        assert result.probs == pytest.approx(expected, abs=1e-12)
        assert result.residual < 1e-12

    def test_power_agrees_with_direct(self):
        model = small_model()
        direct = rv.stationary(model, method="direct")
        power = rv.stationary(model, method="power", tolerance=1e-14)
        assert direct.probs == pytest.approx(power.probs, abs=1e-8)
        assert direct.method == "direct"
        assert power.method == "power"

    def test_probabilities_well_formed(self):
        _, result = rv.solve_stationary(SMALL)
        assert result.probs.min() >= 0.0
        assert result.probs.sum() == pytest.approx(1.0, abs=1e-10)
        assert abs(sum(result.adoption) - 1.0) < 1e-10
        assert result.residual < 1e-10

    def test_mu_zero_needs_flag(self):
        params = SMALL.replace(mu=0.0)
        tables = rv.build_payoff_tables(params)
        space = rv.StateSpace.build(params.Z, params.strategies)
        ftable = rv.build_fitness_table(params, tables, space.states)
        model = rv.build_kernel(params, ftable, space)
        with pytest.raises(rv.SolverError, match="reducible"):
            rv.stationary(model)
        result = rv.stationary(model, allow_reducible=True)
        assert result.probs.sum() == pytest.approx(1.0, abs=1e-10)

    def test_neutral_symmetry_small(self):
        _, result = rv.solve_stationary(SMALL.replace(beta=0.0))
        for rate in result.adoption:
            assert rate == pytest.approx(1 / 3, abs=1e-12)


class TestGradientField:
    def test_centroid_is_neutral_fixed_point(self):
        params = SMALL.replace(beta=0.0)  # Z=9 puts the centroid on grid
        model, _ = rv.solve_stationary(params)
        grad = rv.gradient_field(model)
        centroid = model.space.index_of(3, 3)
        assert grad[centroid] == pytest.approx([0.0, 0.0], abs=1e-15)

    def test_corner_flow_is_mutation_only(self):
        model = small_model()
        mu, Z = model.params.mu, model.params.Z
        grad = rv.gradient_field(model)
        corner = model.space.index_of(Z, 0)
        assert grad[corner, 0] == pytest.approx(mu / 2, abs=1e-15)
        assert grad[corner, 1] == pytest.approx(-mu, abs=1e-15)

    def test_components_bounded(self):
        model = small_model(rv.ModelParams(Z=14, N=7))
        grad = rv.gradient_field(model)
        assert np.all(grad >= -1.0) and np.all(grad <= 1.0)

    def test_matches_transition_probs(self):
        model = small_model()
        grad = rv.gradient_field(model)
        state = (2, 3)
        t = rv.transition_probs(state, model.params, model.ftable)
        g_i = (t[(Strategy.S, Strategy.I)] + t[(Strategy.A, Strategy.I)]
               - t[(Strategy.I, Strategy.S)] - t[(Strategy.I, Strategy.A)])
        g_s = (t[(Strategy.I, Strategy.S)] + t[(Strategy.A, Strategy.S)]
               - t[(Strategy.S, Strategy.I)] - t[(Strategy.S, Strategy.A)])
        assert grad[model.space.index_of(*state)] == pytest.approx([g_i, g_s])


class TestDerivedQuantities:
    def test_adoption_point_mass(self):
        space = rv.StateSpace.build(10, rv.STRATEGY_ORDER)
        probs = np.zeros(len(space))
        probs[space.index_of(10, 0)] = 1.0
        assert rv.adoption_rates(probs, space.states, 10) == pytest.approx(
            (1.0, 0.0, 0.0))

    def test_adoption_uniform_z1(self):
        space = rv.StateSpace.build(1, rv.STRATEGY_ORDER)
        probs = np.full(3, 1 / 3)
        assert rv.adoption_rates(probs, space.states, 1) == pytest.approx(
            (1 / 3, 1 / 3, 1 / 3))

    def test_profit_zero_margin(self):
        params = rv.ModelParams(c=0.8 * 1.0 * 0.2)
        assert rv.insurer_profit(0.7, params) == 0.0

    def test_profit_zero_adoption(self):
        assert rv.insurer_profit(0.0, rv.ModelParams()) == 0.0

    def test_profit_known_value(self):
        params = rv.ModelParams(Z=50, c=0.18)
        got = rv.insurer_profit(0.5, params)
        assert got == pytest.approx(0.5, abs=1e-12)
