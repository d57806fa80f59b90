"""Per-item cost-value preprocessing and exact upper-hull construction.

The LP relaxation of the multiple-choice knapsack only ever uses the upper
convex hull of each item's (cost, value) point cloud, so dominated and
duplicate options are filtered first and the hull is built with a monotone
chain scan. Hull construction is the dominant runtime phase of the solver;
per-item hulls are independent, which is where to parallelize first.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

# Costs closer than this are treated as equal during preprocessing; cross
# products closer than this to zero are treated as collinear.
TOL_C = 1e-9
TOL_COLLINEAR = 1e-9

Point = tuple[float, float, int]  # (cost, value, option index)


@dataclass(frozen=True)
class HullChain:
    """Ordered upper-hull vertices of one item.

    Costs are strictly increasing, values strictly increasing, and segment
    slopes strictly decreasing (collinear runs collapsed). Every vertex is
    one of the original menu points, identified by `option_index`.
    """

    costs: tuple[float, ...]
    values: tuple[float, ...]
    option_index: tuple[int, ...]
    seg_len: tuple[float, ...]
    seg_slope: tuple[float, ...]

    def __len__(self) -> int:
        return len(self.costs)

    def interpolate(self, c: float) -> float:
        """Piecewise-linear hull value at cost c (must lie inside the range)."""
        cs, vs = self.costs, self.values
        if not cs[0] <= c <= cs[-1]:
            raise ValueError("cost outside hull range")
        for k in range(len(cs) - 1):
            if c <= cs[k + 1]:
                if cs[k + 1] == cs[k]:
                    return vs[k]
                alpha = (c - cs[k]) / (cs[k + 1] - cs[k])
                return vs[k] + alpha * (vs[k + 1] - vs[k])
        return vs[-1]


def preprocess(points: Sequence[Point]) -> list[Point]:
    """Merge near-equal costs (keep max value) and drop dominated points.

    A point is dominated when another point has cost <= and value >=.
    Output is sorted by strictly increasing cost, hence strictly
    increasing value.
    """
    if not points:
        return []
    # plain tuple sort of (c, -v, j): max value first within equal costs
    ordered = sorted((c, -v, j) for c, v, j in points)
    out: list[Point] = []
    vmax = float("-inf")
    lead_c = ordered[0][0]  # grouping anchor: first cost of the group
    bc, bv, bj = lead_c, -ordered[0][1], ordered[0][2]
    for c, negv, j in ordered[1:]:
        if c - lead_c <= TOL_C:
            if -negv > bv:
                bc, bv, bj = c, -negv, j
        else:
            if bv > vmax:
                out.append((bc, bv, bj))
                vmax = bv
            lead_c = c
            bc, bv, bj = c, -negv, j
    if bv > vmax:
        out.append((bc, bv, bj))
    return out


def upper_hull(points: Sequence[Point]) -> HullChain:
    """Upper hull of a preprocessed point set via a monotone chain scan.

    Near-collinear interior points (cross product within tolerance) are
    dropped: fewer segments, identical LP value. A chain that is already
    concave is returned verbatim.
    """
    if not points:
        raise ValueError("cannot build a hull from an empty point set")
    cs: list[float] = []
    vs: list[float] = []
    js: list[int] = []
    for c, v, j in points:
        while len(cs) >= 2:
            c2 = cs[-1]
            v2 = vs[-1]
            c1 = cs[-2]
            v1 = vs[-2]
            if (c2 - c1) * (v - v1) - (v2 - v1) * (c - c1) >= -TOL_COLLINEAR:
                cs.pop()  # middle point on or below the chord
                vs.pop()
                js.pop()
            else:
                break
        cs.append(c)
        vs.append(v)
        js.append(j)
    nseg = len(cs) - 1
    seg_len = tuple(cs[k + 1] - cs[k] for k in range(nseg))
    seg_slope = tuple((vs[k + 1] - vs[k]) / seg_len[k] for k in range(nseg))
    return HullChain(tuple(cs), tuple(vs), tuple(js), seg_len, seg_slope)


def build_chain(costs: Sequence[float], values: Sequence[float]) -> HullChain:
    """Preprocess raw per-option (cost, value) arrays and build the hull."""
    pts = [(c, v, j) for j, (c, v) in enumerate(zip(costs, values))]
    return upper_hull(preprocess(pts))


def max_value_jump(chains: Sequence[HullChain]) -> float:
    """Largest adjacent hull value jump across items (0 for all-singleton)."""
    best = 0.0
    for ch in chains:
        for k in range(len(ch) - 1):
            jump = ch.values[k + 1] - ch.values[k]
            if jump > best:
                best = jump
    return best
