"""Compiled fast path for the per-theta candidate evaluation.

These kernels replicate the pure-Python pipeline (hull preprocessing and
monotone chain, greedy segment filling, round-down / repair / completion)
operation for operation: identical comparisons, identical tie-breaks, and
identical float accumulation order, so both paths produce bit-equal
results (asserted in the test suite). When numba is unavailable the
driver transparently falls back to the pure implementations.
"""

from __future__ import annotations

import numpy as np

from .hull import TOL_C, TOL_COLLINEAR
from .lp_hull_greedy import CAP_TOL, RESIDUAL_EPS

try:
    from numba import njit

    HAVE_KERNEL = True
except ImportError:  # pragma: no cover - exercised only without numba
    HAVE_KERNEL = False

    def njit(*args, **kwargs):
        def wrap(f):
            return f

        return wrap


@njit(cache=True)
def build_hulls(st, smax, v2d, counts):
    """Per-item upper hulls of (cost, value) with segment data.

    Returns flattened hull vertex arrays with per-item offsets, the global
    segment arrays (in (item, k) order), and the largest adjacent value
    jump across all hulls.
    """
    n, mmax = st.shape
    hull_c = np.empty(n * mmax)
    hull_v = np.empty(n * mmax)
    hull_opt = np.empty(n * mmax, np.int64)
    hstart = np.empty(n + 1, np.int64)
    seg_slope = np.empty(n * mmax)
    seg_len = np.empty(n * mmax)
    seg_item = np.empty(n * mmax, np.int64)
    seg_k = np.empty(n * mmax, np.int64)
    sc = np.empty(mmax)
    sv = np.empty(mmax)
    sj = np.empty(mmax, np.int64)
    nseg = 0
    dv_max = 0.0
    hpos = 0
    hstart[0] = 0
    for i in range(n):
        mi = counts[i]
        base = smax[i]
        # insertion sort of (cost, -value, index), ascending lexicographic
        cnt = 0
        for j in range(mi):
            c = base - st[i, j]
            v = v2d[i, j]
            p = cnt
            while p > 0:
                cp = sc[p - 1]
                vp = sv[p - 1]
                jp = sj[p - 1]
                if c < cp or (c == cp and (v > vp or (v == vp and j < jp))):
                    sc[p] = cp
                    sv[p] = vp
                    sj[p] = jp
                    p -= 1
                else:
                    break
            sc[p] = c
            sv[p] = v
            sj[p] = j
            cnt += 1
        # merge near-equal costs (keep max value), then drop dominated
        w = 0
        vmax = -np.inf
        lead_c = sc[0]
        bc = sc[0]
        bv = sv[0]
        bj = sj[0]
        for p in range(1, cnt):
            c = sc[p]
            v = sv[p]
            j = sj[p]
            if c - lead_c <= TOL_C:
                if v > bv:
                    bc = c
                    bv = v
                    bj = j
            else:
                if bv > vmax:
                    sc[w] = bc
                    sv[w] = bv
                    sj[w] = bj
                    w += 1
                    vmax = bv
                lead_c = c
                bc = c
                bv = v
                bj = j
        if bv > vmax:
            sc[w] = bc
            sv[w] = bv
            sj[w] = bj
            w += 1
        # monotone chain, popping on-or-below-chord middles
        hn = 0
        for p in range(w):
            c = sc[p]
            v = sv[p]
            while hn >= 2:
                c2 = hull_c[hpos + hn - 1]
                v2 = hull_v[hpos + hn - 1]
                c1 = hull_c[hpos + hn - 2]
                v1 = hull_v[hpos + hn - 2]
                if (c2 - c1) * (v - v1) - (v2 - v1) * (c - c1) >= -TOL_COLLINEAR:
                    hn -= 1
                else:
                    break
            hull_c[hpos + hn] = c
            hull_v[hpos + hn] = v
            hull_opt[hpos + hn] = sj[p]
            hn += 1
        for k in range(hn - 1):
            dc = hull_c[hpos + k + 1] - hull_c[hpos + k]
            dv = hull_v[hpos + k + 1] - hull_v[hpos + k]
            seg_len[nseg] = dc
            seg_slope[nseg] = dv / dc
            seg_item[nseg] = i
            seg_k[nseg] = k
            nseg += 1
            if dv > dv_max:
                dv_max = dv
        hpos += hn
        hstart[i + 1] = hpos
    return (
        hull_c,
        hull_v,
        hull_opt,
        hstart,
        seg_slope[:nseg],
        seg_len[:nseg],
        seg_item[:nseg],
        seg_k[:nseg],
        dv_max,
    )


@njit(cache=True)
def greedy_fill(hull_c, hull_v, hstart, order, seg_len, seg_item, seg_k, capacity):
    """Greedy LP fill over hull segments in (-slope, item, k) order.

    `order` is the stable argsort of the negated slopes (computed by the
    caller with numpy, whose stable sort is faster than a jitted one).
    Returns (status, vertex, frac_item, frac_seg, alpha, opt_lp); status 1
    flags an infeasible capacity.
    """
    n = hstart.shape[0] - 1
    vertex = np.zeros(n, np.int64)
    base_cost = 0.0
    for i in range(n):
        base_cost += hull_c[hstart[i]]
    residual = capacity - base_cost
    if residual < -CAP_TOL:
        return 1, vertex, -1, -1, 0.0, 0.0
    if residual < 0.0:
        residual = 0.0
    frac_item = -1
    frac_seg = -1
    alpha = 0.0
    nseg = order.shape[0]
    if nseg > 0:
        for oi in range(nseg):
            if residual <= RESIDUAL_EPS:
                break
            pos = order[oi]
            i = seg_item[pos]
            k = seg_k[pos]
            length = seg_len[pos]
            if length <= residual:
                vertex[i] = k + 1
                residual -= length
            else:
                frac_item = i
                frac_seg = k
                alpha = residual / length
                residual = 0.0
                break
    opt_lp = 0.0
    for i in range(n):
        opt_lp += hull_v[hstart[i] + vertex[i]]
    if frac_item >= 0:
        s0 = hstart[frac_item]
        opt_lp += alpha * (hull_v[s0 + frac_seg + 1] - hull_v[s0 + frac_seg])
    return 0, vertex, frac_item, frac_seg, alpha, opt_lp


@njit(cache=True)
def _heap_less(sa, ia, sb, ib):
    # priority: larger slope first, then smaller item index
    return sa > sb or (sa == sb and ia < ib)


@njit(cache=True)
def _heap_push(hs, hi, size, slope, item):
    pos = size
    hs[pos] = slope
    hi[pos] = item
    while pos > 0:
        parent = (pos - 1) >> 1
        if _heap_less(hs[pos], hi[pos], hs[parent], hi[parent]):
            hs[pos], hs[parent] = hs[parent], hs[pos]
            hi[pos], hi[parent] = hi[parent], hi[pos]
            pos = parent
        else:
            break
    return size + 1


@njit(cache=True)
def _heap_pop(hs, hi, size):
    size -= 1
    hs[0] = hs[size]
    hi[0] = hi[size]
    pos = 0
    while True:
        left = 2 * pos + 1
        if left >= size:
            break
        best = left
        right = left + 1
        if right < size and _heap_less(hs[right], hi[right], hs[left], hi[left]):
            best = right
        if _heap_less(hs[best], hi[best], hs[pos], hi[pos]):
            hs[pos], hs[best] = hs[best], hs[pos]
            hi[pos], hi[best] = hi[best], hi[pos]
            pos = best
        else:
            break
    return size


@njit(cache=True)
def recover_choice(
    hull_c, hull_v, hull_opt, hstart, vertex, frac_item, capacity, do_repair, do_complete
):
    """Round-down, optional round-up-with-repair (keep the better), then
    optional slope-greedy completion; mirrors rounding.recover exactly.

    Returns (down_value, final hull-vertex choice, final option indices).
    """
    n = hstart.shape[0] - 1
    down_value = 0.0
    for i in range(n):
        down_value += hull_v[hstart[i] + vertex[i]]
    choice = vertex.copy()
    best_value = down_value
    if do_repair and frac_item >= 0:
        up = vertex.copy()
        up[frac_item] += 1
        cost = 0.0
        for i in range(n):
            cost += hull_c[hstart[i] + up[i]]
        feasible = True
        while cost > capacity + CAP_TOL:
            best_i = -1
            best_ratio = 0.0
            best_step = 0.0
            for i in range(n):
                if i == frac_item:
                    continue
                k = up[i]
                if k == 0:
                    continue
                s0 = hstart[i]
                step = hull_c[s0 + k] - hull_c[s0 + k - 1]
                ratio = (hull_v[s0 + k] - hull_v[s0 + k - 1]) / step
                if best_i < 0 or ratio < best_ratio:
                    best_i = i
                    best_ratio = ratio
                    best_step = step
            if best_i < 0:
                feasible = False
                break
            up[best_i] -= 1
            cost -= best_step
        if feasible:
            up_value = 0.0
            for i in range(n):
                up_value += hull_v[hstart[i] + up[i]]
            if up_value > best_value:
                choice = up
                best_value = up_value
    if do_complete:
        cost = 0.0
        for i in range(n):
            cost += hull_c[hstart[i] + choice[i]]
        # binary max-heap keyed by (slope desc, item asc); the key order is
        # strict (one entry per item), so pop order matches the reference
        # heapq pipeline exactly
        hs = np.empty(n)
        hi = np.empty(n, np.int64)
        size = 0
        for i in range(n):
            s0 = hstart[i]
            k = choice[i]
            if s0 + k + 1 < hstart[i + 1]:
                slope = (hull_v[s0 + k + 1] - hull_v[s0 + k]) / (
                    hull_c[s0 + k + 1] - hull_c[s0 + k]
                )
                size = _heap_push(hs, hi, size, slope, i)
        while size > 0:
            top_i = hi[0]
            size = _heap_pop(hs, hi, size)
            s0 = hstart[top_i]
            k = choice[top_i]
            step = hull_c[s0 + k + 1] - hull_c[s0 + k]
            if cost + step <= capacity + CAP_TOL:
                choice[top_i] = k + 1
                cost += step
                if s0 + k + 2 < hstart[top_i + 1]:
                    slope = (hull_v[s0 + k + 2] - hull_v[s0 + k + 1]) / (
                        hull_c[s0 + k + 2] - hull_c[s0 + k + 1]
                    )
                    size = _heap_push(hs, hi, size, slope, top_i)
            # an upgrade that does not fit stays dropped: later upgrades of
            # the same item are unreachable without it
    final_opt = np.empty(n, np.int64)
    for i in range(n):
        final_opt[i] = hull_opt[hstart[i] + choice[i]]
    return down_value, choice, final_opt
