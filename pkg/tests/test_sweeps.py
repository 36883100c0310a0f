"""Grid-experiment tests: determinism, per-point error isolation, profit
consistency, and the restricted two-strategy machinery."""

import numpy as np
import pytest

import riskevo as rv

SMALL = rv.ModelParams(Z=9, N=4, r=0.03)


class TestSweepGrid:
    def test_single_point_equals_direct_run(self):
        spec = rv.SweepSpec(base=SMALL, axes=(("alpha", (0.5,)),))
        (row,) = rv.sweep_grid(spec)
        _, res = rv.solve_stationary(SMALL.replace(alpha=0.5))
        assert (row.p_s, row.p_i, row.p_a) == res.adoption
        assert row.residual == res.residual
        assert row.error is None

    def test_row_major_ordering_and_determinism(self):
        spec = rv.SweepSpec(base=SMALL,
                            axes=(("alpha", (0.3, 0.6)), ("r", (0.01, 0.03))))
        rows = rv.sweep_grid(spec)
        assert [row.values for row in rows] == [
            (0.3, 0.01), (0.3, 0.03), (0.6, 0.01), (0.6, 0.03)]
        again = rv.sweep_grid(spec)
        for a, b in zip(rows, again):
            assert (a.values, a.p_s, a.p_i, a.p_a, a.profit) == \
                   (b.values, b.p_s, b.p_i, b.p_a, b.profit)

    def test_threaded_matches_serial(self):
        spec = rv.SweepSpec(base=SMALL, axes=(("gamma", (0.5, 0.8, 1.1)),))
        serial = rv.sweep_grid(spec, threads=1)
        threaded = rv.sweep_grid(spec, threads=3)
        for a, b in zip(serial, threaded):
            assert a.values == b.values
            assert a.p_s == b.p_s and a.p_i == b.p_i and a.p_a == b.p_a

    def test_invalid_point_reported_not_fatal(self):
        spec = rv.SweepSpec(base=SMALL, axes=(("r", (0.01, 0.5, 0.03)),))
        rows = rv.sweep_grid(spec)
        assert rows[0].error is None
        assert rows[1].error is not None and "r exceeds" in rows[1].error
        assert np.isnan(rows[1].p_s) and rows[1].argmax == "error"
        assert rows[2].error is None

    def test_profit_column_consistent(self):
        spec = rv.SweepSpec(base=SMALL, axes=(("c", (0.16, 0.17, 0.18)),))
        for row in rv.sweep_grid(spec):
            c = row.values[0]
            expected = row.p_i * SMALL.Z * (c - SMALL.alpha * SMALL.w * SMALL.q)
            assert row.profit == expected

    def test_integer_axis_coercion(self):
        spec = rv.SweepSpec(base=SMALL, axes=(("N", (4.0, 6.0)),))
        rows = rv.sweep_grid(spec)
        assert all(row.error is None for row in rows)

    def test_requested_vectors_attached(self):
        spec = rv.SweepSpec(base=SMALL, axes=(("alpha", (0.5,)),),
                            outputs=("adoption", "profit", "stationary", "gradient"))
        (row,) = rv.sweep_grid(spec)
        assert row.probs is not None and len(row.probs) == rv.simplex_size(9)
        assert row.gradient is not None and row.gradient.shape == (55, 2)
        assert row.states is not None

    def test_mode_restricts_every_point(self):
        spec = rv.SweepSpec(base=SMALL, axes=(("alpha", (0.4, 0.7)),),
                            mode=(rv.Strategy.S, rv.Strategy.A))
        rows = rv.sweep_grid(spec)
        assert all(row.p_i == 0.0 for row in rows)

    def test_axis_validation(self):
        with pytest.raises(ValueError, match="unknown sweep axis"):
            rv.SweepSpec(base=SMALL, axes=(("bogus", (1.0,)),))
        with pytest.raises(ValueError, match="1 or 2 axes"):
            rv.SweepSpec(base=SMALL, axes=())
        with pytest.raises(ValueError, match="unknown output"):
            rv.SweepSpec(base=SMALL, axes=(("alpha", (0.5,)),),
                         outputs=("pictures",))


class TestArgmax:
    def test_clear_winner(self):
        assert rv.argmax_strategy(0.2, 0.7, 0.1) == "I"

    def test_exact_tie(self):
        assert rv.argmax_strategy(0.4, 0.4, 0.2) == "tie"


class TestOptimalPremium:
    def test_zero_margin_grid(self):
        fair = SMALL.alpha * SMALL.w * SMALL.q
        curve = rv.optimal_premium(SMALL, [fair])
        assert curve.c_star == fair
        assert curve.profit_star == 0.0

    def test_tie_breaks_toward_smaller_premium(self):
        fair = SMALL.alpha * SMALL.w * SMALL.q
        curve = rv.optimal_premium(SMALL.replace(mu=1.0), [fair, fair])
        assert curve.c_star == fair

    def test_curve_covers_grid_in_order(self):
        grid = (0.18, 0.16, 0.17)
        curve = rv.optimal_premium(SMALL, grid)
        assert [row.values[0] for row in curve.rows] == sorted(grid)
        best = max(row.profit for row in curve.rows if row.error is None)
        assert curve.profit_star == best

    def test_infeasible_grid_raises(self):
        with pytest.raises(rv.ParameterError, match="no premium"):
            rv.optimal_premium(SMALL, [0.5, 0.6])

    def test_empty_grid_raises(self):
        with pytest.raises(rv.ParameterError, match="empty"):
            rv.optimal_premium(SMALL, [])

    def test_partial_feasibility_keeps_error_rows(self):
        curve = rv.optimal_premium(SMALL, [0.17, 0.5])
        assert curve.rows[0].error is None
        assert curve.rows[1].error is not None
        assert curve.c_star == 0.17


class TestRestrictStrategies:
    def test_collapses_to_edge(self):
        params = rv.restrict_strategies(rv.ModelParams(), ("S", "A"))
        assert params.d == 2
        space = rv.StateSpace.build(params.Z, params.strategies)
        assert len(space) == params.Z + 1

    def test_order_normalized(self):
        params = rv.restrict_strategies(SMALL, ("A", "S"))
        assert params.strategies == (rv.Strategy.S, rv.Strategy.A)

    @pytest.mark.parametrize("subset", [("S",), ("S", "I", "A"), ()])
    def test_wrong_size_rejected(self, subset):
        with pytest.raises(rv.ParameterError):
            rv.restrict_strategies(SMALL, subset)

    def test_duplicate_rejected(self):
        with pytest.raises(rv.ParameterError):
            rv.restrict_strategies(SMALL, ("S", "S"))

    def test_restricted_kernel_rows_sum_to_one(self):
        for subset in (("S", "A"), ("S", "I"), ("I", "A")):
            params = rv.restrict_strategies(SMALL, subset)
            model, result = rv.solve_stationary(params)
            sums = np.asarray(model.kernel.sum(axis=1)).ravel()
            assert np.max(np.abs(sums - 1.0)) < 1e-12
            assert result.probs.sum() == pytest.approx(1.0, abs=1e-10)

    def test_mutation_uses_two_strategy_denominator(self):
        # with d = 2 the mutation inflow from a corner is mu * Z / Z = mu
        params = rv.restrict_strategies(SMALL, ("S", "A"))
        model, _ = rv.solve_stationary(params)
        corner = model.space.index_of(params.Z, 0)
        below = model.space.index_of(params.Z - 1, 0)
        assert model.kernel[corner, below] == pytest.approx(params.mu, abs=1e-15)

    def test_only_active_strategies_move(self):
        params = rv.restrict_strategies(SMALL, ("S", "I"))
        model, _ = rv.solve_stationary(params)
        for state in model.space.states:
            assert state[0] + state[1] == params.Z
