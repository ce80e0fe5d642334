import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from icx import costfn
from icx.costfn import (Additive, BudgetAdditive, ConcaveCardinality,
                        CountingOracle, ExplicitTable, WeightedCoverage,
                        XOSClauses, check_monotone, check_submodular,
                        check_xos_pointwise, demand_default)
from conftest import random_monotone_table, random_submodular_fn


class TestConstructors:
    def test_additive_value(self):
        fn = Additive([0.5, 0.25, 1.0])
        assert fn.value(0) == 0.0
        assert fn.value(0b101) == 1.5

    def test_negative_weights_rejected(self):
        with pytest.raises(ValueError):
            Additive([0.5, -0.1])

    def test_budget_additive_caps(self):
        fn = BudgetAdditive([0.6, 0.6], 1.0)
        assert fn.value(0b11) == 1.0

    def test_coverage_counts_union_once(self):
        fn = WeightedCoverage(3, [0b011, 0b110], [1.0, 2.0, 4.0])
        assert fn.value(0b01) == 3.0
        assert fn.value(0b11) == 7.0

    def test_concave_cardinality_validation(self):
        ConcaveCardinality([0.0, 1.0, 1.5, 1.75])
        with pytest.raises(ValueError):
            ConcaveCardinality([0.0, 1.0, 2.5])  # increasing differences
        with pytest.raises(ValueError):
            ConcaveCardinality([0.1, 0.2])

    def test_explicit_table_requires_monotone(self):
        with pytest.raises(ValueError):
            ExplicitTable([0.0, 2.0, 0.5, 1.0])

    def test_explicit_table_requires_normalized(self):
        with pytest.raises(ValueError):
            ExplicitTable([0.5, 1.0])

    def test_xos_is_pointwise_max(self):
        fn = XOSClauses([[1.0, 0.0], [0.0, 2.0]])
        assert fn.value(0b01) == 1.0
        assert fn.value(0b11) == 2.0


class TestCheckers:
    def test_additive_monotone_and_submodular(self):
        fn = Additive([0.3, 0.0, 1.2])
        assert check_monotone(fn, 3) == (True, None)
        assert check_submodular(fn, 3) == (True, None)

    def test_budget_additive_submodular(self):
        fn = BudgetAdditive([0.5, 0.8, 0.3], 1.0)
        assert check_submodular(fn, 3)[0]

    def test_violation_witness(self):
        fn = ExplicitTable([0.0, 2.0, 0.5, 1.0], validate=False)
        ok, witness = check_monotone(fn, 2)
        assert not ok
        mask, elem = witness
        assert fn.value(mask | (1 << elem)) < fn.value(mask)

    def test_submodular_witness_is_valid(self):
        # Coverage with complementary-looking table: build a supermodular one.
        fn = ExplicitTable([0.0, 0.0, 0.0, 1.0], validate=False)
        ok, witness = check_submodular(fn, 2)
        assert not ok
        mask, i, j = witness
        gain_small = fn.value(mask | (1 << i)) - fn.value(mask)
        gain_big = fn.value(mask | (1 << j) | (1 << i)) - fn.value(mask | (1 << j))
        assert gain_big > gain_small

    def test_exhaustive_size_limit(self):
        with pytest.raises(ValueError):
            check_monotone(Additive([0.0] * 17), 17)

    def test_sampled_mode_replays(self, rng):
        fn = random_monotone_table(rng, 8)
        assert check_monotone(fn, 8, mode="sampled", seed=7, samples=500)[0]

    def test_constructors_all_monotone_normalized(self, rng):
        for trial in range(40):
            n = rng.randint(1, 6)
            fn = random_submodular_fn(rng, n)
            assert fn.value(0) == 0.0
            assert check_monotone(fn, n)[0]
            assert check_submodular(fn, n)[0]

    def test_xos_pointwise_self_certificate(self):
        clauses = [[0.5, 0.0, 0.3], [0.2, 0.4, 0.0]]
        fn = XOSClauses(clauses)
        assert check_xos_pointwise(fn, clauses, 3)
        assert check_xos_pointwise(Additive([0.5, 0.2]), [[0.5, 0.2]], 2)

    def test_xos_pointwise_rejects_wrong_family(self):
        fn = Additive([0.5, 0.2])
        assert not check_xos_pointwise(fn, [[0.5, 0.0]], 2)


class TestDemand:
    def test_additive_demand_takes_positive_surplus(self):
        fn = Additive([0.5, 0.2, 0.9])
        prices = [0.1, 0.4, 0.9]  # middle element loses, last one ties
        assert fn.demand(prices) == 0b001
        assert demand_default(fn, prices, 3) == 0b001

    def test_huge_prices_empty(self):
        fn = Additive([0.5, 0.2])
        assert demand_default(fn, [10.0, 10.0], 2) == 0

    def test_tie_breaks_toward_smaller_sets(self):
        fn = ConcaveCardinality([0.0, 1.0, 1.0])
        # Both singletons and the pair reach value 1; free prices everywhere.
        assert demand_default(fn, [0.0, 0.0], 2) == 0b01

    def test_never_dominated(self, rng):
        for _ in range(50):
            n = rng.randint(1, 6)
            fn = random_submodular_fn(rng, n)
            prices = [rng.uniform(0, 0.8) for _ in range(n)]
            chosen = demand_default(fn, prices, n)
            obj = fn.value(chosen) - costfn.price_of(prices, chosen)
            for mask in range(1 << n):
                assert obj >= fn.value(mask) - costfn.price_of(prices, mask) - 1e-12

    def test_rejects_negative_prices(self):
        with pytest.raises(ValueError):
            demand_default(Additive([0.5]), [-1.0], 1)


class TestCountingOracle:
    def test_counts_match_calls(self):
        fn = CountingOracle(Additive([0.5, 0.2]))
        for _ in range(5):
            fn.value(0b11)
        fn.demand([0.1, 0.1])
        assert fn.value_queries == 5
        assert fn.demand_queries == 1

    def test_transparent(self, rng):
        inner = random_monotone_table(rng, 5)
        fn = CountingOracle(inner)
        for mask in range(32):
            assert fn.value(mask) == inner.value(mask)


@settings(max_examples=100, deadline=None)
@given(st.lists(st.floats(0, 2, allow_nan=False), min_size=1, max_size=6),
       st.integers(0, 1 << 6))
def test_additive_matches_sum(weights, seed):
    fn = Additive(weights)
    mask = seed % (1 << len(weights))
    assert fn.value(mask) == pytest.approx(
        sum(w for i, w in enumerate(weights) if mask & (1 << i)), abs=1e-12)
