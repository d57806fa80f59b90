import pytest

from conftest import make_item, random_view, tiny_instance
from robust_mckp.instance_model import PricingInstance
from robust_mckp.oracle import (
    LpInfeasible,
    SearchSpaceTooLarge,
    exhaustive_robust,
    lp_oracle,
    lp_oracle_raw,
)
from robust_mckp.robust_core import certificate
from robust_mckp.rng import substream


def test_exhaustive_single_item_picks_feasible_max():
    # options with margin slack {-1, 2}: only the second is feasible alone
    item = make_item(10.0, 1.0, 1.0, [(9.0, 1.0, 0.0), (12.0, 1.0, 0.0)])
    inst = PricingInstance(items=(item,), margin_target=1.0)
    res = exhaustive_robust(inst, 0)
    assert res.best_choice == (1,)
    assert res.enumerated_count == 2


def test_exhaustive_counts_entire_space():
    inst = tiny_instance(3)
    from robust_mckp.reduction import admissible_indices

    expected = 1
    for i, item in enumerate(inst.items):
        expected *= len(admissible_indices(item, i))
    res = exhaustive_robust(inst, 0)
    assert res.enumerated_count == expected


def test_exhaustive_infeasible_instance():
    item = make_item(10.0, 1.0, 0.0, [(10.0, 1.0, 1.0)])
    # price == a, margin target > 1 makes s < 0 at the only option
    inst = PricingInstance(items=(item,), margin_target=1.5)
    res = exhaustive_robust(inst, 0)
    assert res.best_choice is None
    assert res.best_objective is None


def test_exhaustive_result_is_certified():
    for seed in range(20):
        inst = tiny_instance(seed)
        rng = substream(seed, 50)
        gamma = rng.randint(0, len(inst.items))
        res = exhaustive_robust(inst, gamma)
        if res.best_choice is not None:
            assert certificate(inst, res.best_choice, gamma) >= -1e-9


def test_exhaustive_guard():
    item = make_item(10.0, 1.0, 1.0, [(9.0, 1.0, 0.0), (12.0, 1.0, 0.0)])
    inst = PricingInstance(items=(item, item), margin_target=1.0)
    import robust_mckp.oracle as om

    old = om.EXHAUSTIVE_GUARD
    om.EXHAUSTIVE_GUARD = 3  # 2 x 2 = 4 exceeds it
    try:
        with pytest.raises(SearchSpaceTooLarge):
            exhaustive_robust(inst, 0)
    finally:
        om.EXHAUSTIVE_GUARD = old


def test_lp_oracle_worked_example():
    res = lp_oracle_raw([[0.0, 3.0], [0.0, 2.0]], [[0.0, 1.0], [0.0, 2.0]], 2.0)
    assert res.lp_value == pytest.approx(4.0, abs=1e-9)
    assert res.knapsack_dual == pytest.approx(1.0, abs=1e-9)


def test_lp_oracle_zero_capacity_takes_best_free_options():
    res = lp_oracle_raw([[5.0, 9.0], [1.0, 4.0]], [[0.0, 2.0], [0.0, 1.0]], 0.0)
    assert res.lp_value == pytest.approx(6.0, abs=1e-9)


def test_lp_oracle_huge_capacity_takes_max_values():
    res = lp_oracle_raw([[5.0, 9.0, 2.0]], [[0.0, 2.0, 1.0]], 1e9)
    assert res.lp_value == pytest.approx(9.0, abs=1e-9)


def test_lp_oracle_infeasible():
    with pytest.raises(LpInfeasible):
        lp_oracle_raw([[1.0]], [[2.0]], 1.0)


def test_lp_oracle_variable_guard():
    values = [[1.0] * 100 for _ in range(6)]
    costs = [[0.0] * 100 for _ in range(6)]
    with pytest.raises(SearchSpaceTooLarge):
        lp_oracle_raw(values, costs, 1.0)


def test_lp_bound_dominates_exhaustive():
    # the LP relaxation value bounds the certified discrete optimum at the
    # same fixed theta from above
    for seed in range(25):
        inst, coeffs, view = random_view(seed + 500)
        ora = lp_oracle(view)
        # best discrete value subject to the theta-knapsack constraint
        import itertools

        best = None
        for combo in itertools.product(*(range(len(r)) for r in view.costs)):
            cost = sum(view.costs[i][j] for i, j in enumerate(combo))
            if cost <= view.capacity + 1e-12:
                val = sum(view.options[i][j].v for i, j in enumerate(combo))
                if best is None or val > best:
                    best = val
        if best is not None:
            assert ora.lp_value >= best - 1e-8
