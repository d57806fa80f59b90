"""Budget-of-uncertainty machinery.

The worst-case penalty beta(x, gamma) is the sum of the gamma largest
deviation magnitudes at the chosen prices; its scalar dual representation
gives the finite theta candidate set, the exact robust-feasibility
certificate, and the separable box case (gamma = n).
"""

from __future__ import annotations

from typing import Sequence

from . import hull, lp_hull_greedy, reduction, rounding
from .instance_model import DiscreteSolution, PricingInstance
from .reduction import OptionCoeffs

CERT_TOL = 1e-9  # a choice is robust-feasible iff its certificate >= -CERT_TOL
THETA_DEDUP_TOL = 1e-12


class BoxInfeasible(ValueError):
    """No choice satisfies the margin constraint under full deviation."""


def beta(t_values: Sequence[float], gamma: int) -> float:
    """Sum of the `gamma` largest deviation magnitudes (0 when gamma = 0)."""
    if not 0 <= gamma <= len(t_values):
        raise ValueError(f"gamma must lie in [0, {len(t_values)}], got {gamma}")
    if gamma == 0:
        return 0.0
    mags = sorted((abs(t) for t in t_values), reverse=True)
    return sum(mags[:gamma])


def beta_dual(t_values: Sequence[float], gamma: int, theta: float) -> float:
    """Dual objective gamma*theta + sum of hinge terms max(0, |t| - theta)."""
    if theta < 0:
        raise ValueError("theta must be nonnegative")
    return gamma * theta + sum(max(0.0, abs(t) - theta) for t in t_values)


def candidate_thetas(coeffs: Sequence[Sequence[OptionCoeffs]]) -> list[float]:
    """{0} union all admissible |t| values, deduplicated and ascending.

    Contains an optimal dual parameter whenever the discrete robust
    problem is feasible, so enumerating it is exact.
    """
    mags = sorted(abs(o.t) for item in coeffs for o in item)
    out = [0.0]
    for m in mags:
        if m - out[-1] > THETA_DEDUP_TOL:
            out.append(m)
    return out


def _choice_st(
    inst: PricingInstance, choice: Sequence[int]
) -> tuple[list[float], list[float]]:
    delta = inst.margin_target
    s_vals, t_vals = [], []
    for item, j in zip(inst.items, choice):
        p = item.menu[j]
        margin_coef = item.exposure * (p.price - delta * item.ref_price)
        s_vals.append(margin_coef * p.demand)
        t_vals.append(margin_coef * p.deviation)
    return s_vals, t_vals


def certificate(inst: PricingInstance, choice: Sequence[int], gamma: int) -> float:
    """Exact worst-case margin slack of a discrete choice.

    Nonnegative (within CERT_TOL) iff the margin constraint holds for
    every demand realization inside the budget-gamma uncertainty set.
    """
    s_vals, t_vals = _choice_st(inst, choice)
    return sum(s_vals) - beta(t_vals, gamma)


def margin_slack(inst: PricingInstance, choice: Sequence[int]) -> float:
    """Nominal margin slack of a discrete choice."""
    s_vals, _ = _choice_st(inst, choice)
    return sum(s_vals)


def solve_box(
    inst: PricingInstance, repair: bool = True, completion: bool = True
) -> DiscreteSolution:
    """Solver for the full-deviation (gamma = n) case.

    The penalty is additive at gamma = n, so the problem is a single
    knapsack with per-option margin s - |t|. That equals the theta = 0
    modification exactly, so this runs the theta = 0 pathway with a zero
    budget term; it cross-checks the general enumeration at gamma = n.
    """
    coeffs = reduction.option_coeffs(inst)
    n = len(coeffs)
    view = reduction.build_mckp(coeffs, 0.0, n)  # capacity = S^0_max, theta term 0
    if view.capacity < 0:
        raise BoxInfeasible(
            f"best per-item choices violate the margin by {-view.capacity:.6g}"
        )
    chains = [
        hull.build_chain(view.costs[i], [o.v for o in coeffs[i]]) for i in range(n)
    ]
    lp = lp_hull_greedy.solve_lp(chains, view.capacity)
    outcome = rounding.recover(lp, chains, view.capacity, repair, completion)
    choice = tuple(
        coeffs[i][chains[i].option_index[k]].price_index
        for i, k in enumerate(outcome.choice_final)
    )
    objective = sum(
        coeffs[i][chains[i].option_index[k]].v
        for i, k in enumerate(outcome.choice_final)
    )
    s_vals, t_vals = _choice_st(inst, choice)
    return DiscreteSolution(
        choice=choice,
        objective=objective,
        margin_slack=sum(s_vals),
        certificate=sum(s_vals) - beta(t_vals, n),
        theta_used=0.0,
        gamma=n,
    )
