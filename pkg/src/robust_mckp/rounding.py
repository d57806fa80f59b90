"""Discrete recovery from the hull-greedy LP solution.

Round-down snaps the single fractional item to its cheaper hull vertex and
is always feasible; its loss is bounded by one adjacent hull value jump.
Round-up with ratio-greedy repair and the slope-greedy completion pass are
optional refinements that can only improve the objective. All moves stay
on hull vertices.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass
from typing import Optional, Sequence

from .hull import HullChain
from .lp_hull_greedy import CAP_TOL, LpSolution


@dataclass(frozen=True)
class RoundingOutcome:
    """Recovery result: pre-repair round-down choice, final choice, and the
    round-down loss against the LP optimum (the quantity the additive
    hull-jump bound controls)."""

    choice_down: tuple[int, ...]
    choice_final: tuple[int, ...]
    loss_rd: float
    hull_vertices_only: bool = True


def _total_cost(choice: Sequence[int], chains: Sequence[HullChain]) -> float:
    return sum(ch.costs[k] for ch, k in zip(chains, choice))


def _total_value(choice: Sequence[int], chains: Sequence[HullChain]) -> float:
    return sum(ch.values[k] for ch, k in zip(chains, choice))


def round_down(lp: LpSolution) -> tuple[int, ...]:
    """Snap the fractional item (if any) to the adjacent vertex with the
    smaller cost; all other items keep their LP vertex."""
    # the LP already stores the lower endpoint of the fractional segment
    return tuple(lp.vertex)


def round_up_repair(
    lp: LpSolution, chains: Sequence[HullChain], capacity: float
) -> Optional[tuple[int, ...]]:
    """Snap the fractional item up, then downgrade other items until the
    capacity holds again.

    Each repair step applies the hull-chain downgrade (i, k -> k-1) with
    the smallest value/cost ratio among items that can still move down;
    ties go to the smallest item index, then the largest cost reduction.
    Returns None when the up-vertex cannot be made feasible. The fractional
    item itself is pinned and never downgraded.
    """
    if lp.fractional_item is None:
        return None
    pinned = lp.fractional_item
    choice = list(lp.vertex)
    choice[pinned] += 1
    cost = _total_cost(choice, chains)
    while cost > capacity + CAP_TOL:
        best = None  # (ratio, item, -cost_step)
        for i, ch in enumerate(chains):
            k = choice[i]
            if i == pinned or k == 0:
                continue
            ratio = ch.seg_slope[k - 1]
            step = ch.seg_len[k - 1]
            key = (ratio, i, -step)
            if best is None or key < best:
                best = key
        if best is None:
            return None
        _, i, neg_step = best
        choice[i] -= 1
        cost += neg_step  # strictly decreases: hull costs strictly increase
    return tuple(choice)


def complete(
    choice: Sequence[int], chains: Sequence[HullChain], capacity: float
) -> tuple[int, ...]:
    """Greedily apply adjacent hull upgrades that fit the residual capacity,
    in nonincreasing slope order. Feasibility-preserving; the objective
    weakly increases."""
    out = list(choice)
    cost = _total_cost(out, chains)
    heap = []
    for i, ch in enumerate(chains):
        k = out[i]
        if k + 1 < len(ch):
            heapq.heappush(heap, (-ch.seg_slope[k], i, k))
    while heap:
        neg_slope, i, k = heapq.heappop(heap)
        if k != out[i]:
            continue  # stale entry
        step = chains[i].seg_len[k]
        if cost + step <= capacity + CAP_TOL:
            out[i] = k + 1
            cost += step
            if k + 2 < len(chains[i]):
                heapq.heappush(heap, (-chains[i].seg_slope[k + 1], i, k + 1))
        # an upgrade that does not fit stays skipped: later upgrades of the
        # same item are unreachable without it
    return tuple(out)


def recover(
    lp: LpSolution,
    chains: Sequence[HullChain],
    capacity: float,
    repair: bool = True,
    completion: bool = True,
) -> RoundingOutcome:
    """Full recovery pipeline: round-down, optional round-up-with-repair
    (keep the better of the two), then optional completion."""
    down = round_down(lp)
    final = down
    best_value = _total_value(down, chains)
    if repair and lp.fractional_item is not None:
        up = round_up_repair(lp, chains, capacity)
        if up is not None:
            up_value = _total_value(up, chains)
            if up_value > best_value:
                final = up
                best_value = up_value
    if completion:
        final = complete(final, chains, capacity)
    return RoundingOutcome(
        choice_down=down,
        choice_final=final,
        loss_rd=lp.objective - _total_value(down, chains),
    )
