"""Exact solver for the fixed-theta LP relaxation via hull-segment greedy.

Every item starts at its cheapest hull vertex; residual capacity is then
spent on hull segments in nonincreasing slope order, with at most one
final fractional fill. This is the exact LP optimum of the multiple-choice
knapsack relaxation, and at most one item ends up fractional.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .hull import HullChain

CAP_TOL = 1e-9  # capacity feasibility tolerance (matches serialization precision)
RESIDUAL_EPS = 1e-12  # residuals below this are treated as zero


class LpInfeasible(ValueError):
    """Capacity below the sum of minimum per-item costs."""

    def __init__(self, deficit: float):
        super().__init__(f"LP infeasible: capacity short by {deficit:.6g}")
        self.deficit = deficit


def stable_desc_order(values: np.ndarray) -> np.ndarray:
    """Permutation sorting `values` descending, ties by ascending index.

    Equivalent to np.argsort(-values, kind="stable") but built on the
    faster unstable sort with an explicit fix-up of tie runs (ties are
    rare in the slope data this orders).
    """
    neg = -np.asarray(values)
    order = np.argsort(neg, kind="quicksort")
    sv = neg[order]
    dup = np.flatnonzero(sv[1:] == sv[:-1])
    if dup.size:
        breaks = np.flatnonzero(np.diff(dup) > 1)
        starts = np.concatenate(([0], breaks + 1))
        ends = np.concatenate((breaks, [dup.size - 1]))
        for s, e in zip(starts, ends):
            a = int(dup[s])
            b = int(dup[e]) + 1
            order[a : b + 1] = np.sort(order[a : b + 1])
    return order


@dataclass(frozen=True)
class LpSolution:
    """LP optimum over hull chains.

    `vertex[i]` is the hull vertex held by item i; the fractional item (if
    any) additionally holds `fractional_alpha` of the segment from
    `vertex[i]` to the next vertex.
    """

    vertex: tuple[int, ...]
    fractional_item: Optional[int]
    fractional_segment: Optional[int]
    fractional_alpha: float
    objective: float
    used_capacity: float
    critical_slope: Optional[float]


def solve_lp(chains: Sequence[HullChain], capacity: float) -> LpSolution:
    """Greedy segment filling; exact LP optimum.

    Ties among equal-slope segments are broken by ascending (item index,
    segment index); any order is LP-optimal, this one is deterministic.
    """
    n = len(chains)
    base_cost = sum(ch.costs[0] for ch in chains)
    residual = capacity - base_cost
    if residual < -CAP_TOL:
        raise LpInfeasible(-residual)
    residual = max(residual, 0.0)

    slopes: list[float] = []
    seg_item: list[int] = []
    seg_k: list[int] = []
    for i, ch in enumerate(chains):
        slopes.extend(ch.seg_slope)
        seg_item.extend([i] * len(ch.seg_slope))
        seg_k.extend(range(len(ch.seg_slope)))

    vertex = [0] * n
    frac_item: Optional[int] = None
    frac_seg: Optional[int] = None
    alpha = 0.0
    critical: Optional[float] = None

    if slopes:
        # segments were appended in (item, k) order, so a stable sort on
        # -slope realizes the (-slope, item, k) tie-break
        order = stable_desc_order(np.asarray(slopes)).tolist()
        for pos in order:
            if residual <= RESIDUAL_EPS:
                break
            i = seg_item[pos]
            k = seg_k[pos]
            length = chains[i].seg_len[k]
            if length <= residual:
                vertex[i] = k + 1
                residual -= length
                critical = slopes[pos]
            else:
                frac_item = i
                frac_seg = k
                alpha = residual / length
                critical = slopes[pos]
                residual = 0.0
                break

    objective = sum(ch.values[vertex[i]] for i, ch in enumerate(chains))
    used = sum(ch.costs[vertex[i]] for i, ch in enumerate(chains))
    if frac_item is not None:
        ch = chains[frac_item]
        k = frac_seg
        objective += alpha * (ch.values[k + 1] - ch.values[k])
        used += alpha * (ch.costs[k + 1] - ch.costs[k])
    return LpSolution(
        vertex=tuple(vertex),
        fractional_item=frac_item,
        fractional_segment=frac_seg,
        fractional_alpha=alpha,
        objective=objective,
        used_capacity=used,
        critical_slope=critical,
    )


def critical_slope(sol: LpSolution) -> Optional[float]:
    """Slope of the last (possibly fractional) filled segment; None if no
    segment received capacity. On nondegenerate instances this equals the
    LP dual of the knapsack row."""
    return sol.critical_slope
