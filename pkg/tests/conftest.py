"""Shared test helpers: hand-built instances and randomized-view makers."""

from __future__ import annotations

import pytest

from robust_mckp.generators import SyntheticConfig, gen_synthetic
from robust_mckp.instance_model import ItemSpec, MenuPoint, PricingInstance
from robust_mckp.reduction import build_mckp, option_coeffs
from robust_mckp.rng import substream
from robust_mckp.robust_core import candidate_thetas


def make_item(ref_price, exposure, tolerance, triples) -> ItemSpec:
    return ItemSpec(
        ref_price=ref_price,
        exposure=exposure,
        tolerance=tolerance,
        menu=tuple(MenuPoint(*t) for t in triples),
    )


def tiny_instance(seed: int, max_n: int = 5, max_m: int = 4, alpha=None) -> PricingInstance:
    """Small random generator instance for oracle cross-checks."""
    rng = substream(seed, 0)
    n = rng.randint(1, max_n)
    m = rng.randint(2, max_m)
    a = alpha if alpha is not None else 0.05 + 0.9 * rng.uniform()
    return gen_synthetic(SyntheticConfig(n=n, m=m, alpha=a, seed=rng.next_u64()))


def random_view(seed: int, max_n: int = 6, max_m: int = 5):
    """Random fixed-theta knapsack view with nonnegative capacity, plus the
    instance and coefficient arrays it came from."""
    rng = substream(seed, 1)
    for attempt in range(50):
        inst = tiny_instance(rng.next_u64(), max_n, max_m)
        coeffs = option_coeffs(inst)
        thetas = candidate_thetas(coeffs)
        theta = thetas[rng.randint(0, len(thetas) - 1)]
        gamma = rng.randint(0, len(coeffs))
        view = build_mckp(coeffs, theta, gamma)
        if view.capacity >= 0:
            return inst, coeffs, view
    raise AssertionError("could not draw a feasible view")


@pytest.fixture
def two_item_chains():
    """The canonical worked example: two items, capacity 2, LP optimum 4."""
    from robust_mckp.hull import build_chain

    return [build_chain([0.0, 1.0], [0.0, 3.0]), build_chain([0.0, 2.0], [0.0, 2.0])]
