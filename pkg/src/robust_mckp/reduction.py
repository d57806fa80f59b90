"""Reduction of the pricing problem to a multiple-choice knapsack.

Fairness filtering keeps prices within the per-item tolerance band, the
per-option coefficients (v, s, t) capture revenue, margin slack, and
worst-case deviation, and the baseline-slack transformation turns the
margin constraint into a knapsack inequality with nonnegative costs.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .instance_model import ItemSpec, PricingInstance, admissible_band


class EmptyAdmissibleMenu(ValueError):
    """No menu price falls inside the item's fairness band."""

    def __init__(self, item: int):
        super().__init__(f"item {item}: no admissible menu point in fairness band")
        self.item = item


@dataclass(frozen=True)
class OptionCoeffs:
    """Knapsack coefficients of one admissible menu option.

    v is the revenue contribution, s the margin slack contribution, t the
    worst-case deviation contribution; price_index points back into the
    item's full menu.
    """

    v: float
    s: float
    t: float
    price_index: int


@dataclass(frozen=True)
class MckpView:
    """Per-item option data specialized to a fixed dual parameter theta.

    costs are nonnegative with a zero-cost baseline per item; a choice
    satisfies the margin constraint at this theta iff its total cost is
    at most `capacity` (which may be negative; callers skip that case).
    """

    options: tuple[tuple[OptionCoeffs, ...], ...]
    theta: float
    gamma: int
    s_theta: tuple[tuple[float, ...], ...]
    baseline: tuple[int, ...]
    costs: tuple[tuple[float, ...], ...]
    capacity: float

    @property
    def n_items(self) -> int:
        return len(self.options)


def admissible_indices(item: ItemSpec, item_index: int = 0) -> list[int]:
    """Menu indices whose price lies in the fairness band (closed, 1e-9 tol)."""
    lo, hi = admissible_band(item)
    idx = [j for j, p in enumerate(item.menu) if lo <= p.price <= hi]
    if not idx:
        raise EmptyAdmissibleMenu(item_index)
    return idx


def option_coeffs(inst: PricingInstance) -> tuple[tuple[OptionCoeffs, ...], ...]:
    """Per-item (v, s, t) arrays over the admissible menu options."""
    delta = inst.margin_target
    out = []
    for i, item in enumerate(inst.items):
        w, a = item.exposure, item.ref_price
        opts = []
        for j in admissible_indices(item, i):
            p = item.menu[j]
            margin_coef = w * (p.price - delta * a)
            opts.append(
                OptionCoeffs(
                    v=w * p.price * p.demand,
                    s=margin_coef * p.demand,
                    t=margin_coef * p.deviation,
                    price_index=j,
                )
            )
        out.append(tuple(opts))
    return tuple(out)


def theta_modify(
    coeffs: Sequence[Sequence[OptionCoeffs]], theta: float
) -> tuple[tuple[float, ...], ...]:
    """Theta-modified margin contributions s - max(0, |t| - theta)."""
    if theta < 0:
        raise ValueError("theta must be nonnegative")
    return tuple(
        tuple(o.s - max(0.0, abs(o.t) - theta) for o in item) for item in coeffs
    )


def build_mckp(
    coeffs: Sequence[Sequence[OptionCoeffs]], theta: float, gamma: int
) -> MckpView:
    """Baseline-slack knapsack view at a fixed theta.

    Baseline per item is the argmax of s_theta (ties: smallest index), so
    the baseline cost is exactly zero. Returns the view even when the
    capacity is negative; callers treat that as a skip, not an error.
    """
    n = len(coeffs)
    if not 0 <= gamma <= n:
        raise ValueError(f"gamma must lie in [0, {n}], got {gamma}")
    s_theta = theta_modify(coeffs, theta)
    baseline = []
    costs = []
    total = 0.0
    for row in s_theta:
        best = 0
        for j in range(1, len(row)):
            if row[j] > row[best]:
                best = j
        baseline.append(best)
        smax = row[best]
        total += smax
        costs.append(tuple(smax - sj for sj in row))
    return MckpView(
        options=tuple(tuple(item) for item in coeffs),
        theta=theta,
        gamma=gamma,
        s_theta=s_theta,
        baseline=tuple(baseline),
        costs=tuple(costs),
        capacity=total - gamma * theta,
    )
