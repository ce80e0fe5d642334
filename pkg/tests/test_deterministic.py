import pytest

from icx import costfn
from icx.deterministic import candidate_sets, solve_deterministic
from icx.families import gen_gap_instance, gen_intro_example
from icx.model import Action, Instance, ValidationError, is_IC
from conftest import random_instance


class TestCandidateSets:
    def test_intro_example_sets(self):
        inst = gen_intro_example()
        A_g, S_g, S_gj = candidate_sets(inst, "g")
        assert A_g == {"bot", "b"}
        assert S_g == {"bot", "b"}
        assert S_gj["b"] == frozenset()
        assert S_gj["bot"] == frozenset(["b"])

    def test_empty_when_everyone_is_cheaper_per_success(self):
        # All rivals have higher f and a better cost/success ratio.
        inst = Instance((
            Action("bot", 0.0, 0.0),
            Action("i", 0.2, 0.5),   # ratio 0.4
            Action("j", 0.4, 0.9),   # ratio 0.44... >= 0.4 and f >= f(i)
        ), "bot", costfn.Additive([1.0, 1.0, 1.0]))
        A_i, S_i, _ = candidate_sets(inst, "i")
        assert A_i == frozenset()
        assert S_i == frozenset()

    def test_precondition(self):
        inst = gen_intro_example()
        with pytest.raises(ValidationError):
            candidate_sets(inst, "bot")


class TestSolveDeterministic:
    def test_intro_optimum(self):
        inst = gen_intro_example()
        best, _ = solve_deterministic(inst)
        assert best.suggested == "g"
        assert best.alpha == pytest.approx(7 / 20, abs=1e-15)
        assert best.inspected == frozenset(["g"])
        assert best.utility == pytest.approx(11 / 20, abs=1e-12)

    def test_gap_instance_value(self):
        inst = gen_gap_instance(10)
        best, _ = solve_deterministic(inst)
        assert best.utility == pytest.approx(2 / 1024, abs=1e-15)
        assert best.inspected == frozenset()

    def test_single_free_action(self):
        inst = Instance((Action("bot", 0.0, 0.0), Action("a", 0.0, 0.7)),
                        "bot", costfn.Additive([1.0, 1.0]))
        best, _ = solve_deterministic(inst)
        assert (best.suggested, best.alpha, best.inspected) == ("a", 0.0, frozenset())
        assert best.utility == 0.7

    def test_every_candidate_is_ic(self, rng):
        for trial in range(60):
            inst = random_instance(rng, rng.randint(1, 6))
            _, candidates = solve_deterministic(inst)
            for cand in candidates:
                assert is_IC(inst, cand.scheme(), 1e-12), (inst, cand)

    def test_candidate_utility_consistent(self, rng):
        for trial in range(20):
            inst = random_instance(rng, rng.randint(2, 6))
            _, candidates = solve_deterministic(inst)
            for cand in candidates:
                expected = (1.0 - cand.alpha) * inst.f(cand.suggested) \
                    - inst.inspection_cost(cand.inspected)
                assert cand.utility == pytest.approx(expected, abs=1e-12)

    def test_query_budget(self, rng):
        for trial in range(40):
            n = rng.randint(1, 7)
            inst = random_instance(rng, n)
            counted = costfn.CountingOracle(inst.cost_fn)
            solve_deterministic(inst.with_cost_fn(counted))
            assert counted.value_queries <= n * n
