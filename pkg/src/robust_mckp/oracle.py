"""Independent brute-force oracles for tests and the `oracle-check` CLI.

`exhaustive_robust` enumerates every discrete choice and applies the exact
robust certificate; `lp_oracle` solves the multiple-choice knapsack LP
relaxation with a dense two-phase tableau simplex under Bland's rule.
Both are deliberately simple and guarded: an oracle must never approximate,
so oversized inputs are hard errors rather than truncations.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from . import robust_core
from .instance_model import PricingInstance
from .reduction import MckpView, admissible_indices

EXHAUSTIVE_GUARD = 10_000_000
LP_VARIABLE_GUARD = 500
_PIVOT_TOL = 1e-9


class SearchSpaceTooLarge(ValueError):
    pass


class LpInfeasible(ValueError):
    pass


@dataclass(frozen=True)
class OracleResult:
    best_choice: Optional[tuple[int, ...]]
    best_objective: Optional[float]
    enumerated_count: int
    lp_value: Optional[float] = None
    knapsack_dual: Optional[float] = None


def exhaustive_robust(inst: PricingInstance, gamma: int) -> OracleResult:
    """Global discrete optimum by full enumeration with exact certificates.

    Keeps the maximum objective among robust-feasible choices; ties go to
    the lexicographically smallest choice. Infeasible instances return a
    result with best_choice None.
    """
    per_item = [admissible_indices(item, i) for i, item in enumerate(inst.items)]
    space = 1
    for idx in per_item:
        space *= len(idx)
        if space > EXHAUSTIVE_GUARD:
            raise SearchSpaceTooLarge(f"search space exceeds {EXHAUSTIVE_GUARD}")
    delta = inst.margin_target
    v_rows, s_rows, t_rows = [], [], []
    for item, idx in zip(inst.items, per_item):
        w, a = item.exposure, item.ref_price
        v_rows.append([w * item.menu[j].price * item.menu[j].demand for j in idx])
        s_rows.append(
            [w * (item.menu[j].price - delta * a) * item.menu[j].demand for j in idx]
        )
        t_rows.append(
            [w * (item.menu[j].price - delta * a) * item.menu[j].deviation for j in idx]
        )

    best_choice = None
    best_obj = None
    count = 0
    for combo in itertools.product(*(range(len(idx)) for idx in per_item)):
        count += 1
        s_total = sum(s_rows[i][j] for i, j in enumerate(combo))
        t_vals = [t_rows[i][j] for i, j in enumerate(combo)]
        z = s_total - robust_core.beta(t_vals, gamma)
        if z < -robust_core.CERT_TOL:
            continue
        obj = sum(v_rows[i][j] for i, j in enumerate(combo))
        if best_obj is None or obj > best_obj:
            best_obj = obj
            best_choice = tuple(per_item[i][j] for i, j in enumerate(combo))
    return OracleResult(best_choice, best_obj, count)


def lp_oracle_raw(
    values: Sequence[Sequence[float]],
    costs: Sequence[Sequence[float]],
    capacity: float,
) -> OracleResult:
    """LP relaxation optimum of the multiple-choice knapsack via tableau
    simplex, plus the dual of the knapsack row (in max-problem sign, so a
    binding capacity has a nonnegative dual)."""
    n = len(values)
    nvars = sum(len(row) for row in values)
    if nvars > LP_VARIABLE_GUARD:
        raise SearchSpaceTooLarge(f"LP exceeds {LP_VARIABLE_GUARD} variables")
    if capacity < 0:
        raise LpInfeasible("negative capacity")

    # min -v z  s.t.  c z + slack = C,  sum_j z_ij = 1,  all vars >= 0
    nrows = n + 1
    ncols = nvars + 1
    a_mat = np.zeros((nrows, ncols))
    rhs = np.zeros(nrows)
    obj = np.zeros(ncols)
    col = 0
    for i in range(n):
        for v, c in zip(values[i], costs[i]):
            a_mat[0, col] = c
            a_mat[1 + i, col] = 1.0
            obj[col] = -v
            col += 1
    a_mat[0, nvars] = 1.0  # knapsack slack
    rhs[0] = capacity
    rhs[1:] = 1.0

    value, duals = _two_phase_simplex(a_mat, rhs, obj)
    if value is None:
        raise LpInfeasible("no feasible assignment within capacity")
    return OracleResult(
        best_choice=None,
        best_objective=None,
        enumerated_count=0,
        lp_value=-value,
        knapsack_dual=-duals[0],
    )


def lp_oracle(view: MckpView) -> OracleResult:
    """LP oracle over a theta-specialized knapsack view."""
    values = [[o.v for o in item] for item in view.options]
    return lp_oracle_raw(values, view.costs, view.capacity)


def _pivot(tab: np.ndarray, basis: list[int], row: int, col: int) -> None:
    tab[row] /= tab[row, col]
    for r in range(tab.shape[0]):
        if r != row and tab[r, col] != 0.0:
            tab[r] -= tab[r, col] * tab[row]
    basis[row - 1] = col


def _bland_iterate(tab: np.ndarray, basis: list[int], allowed: int) -> None:
    """Run simplex to optimality on the tableau (row 0 = objective).

    Bland's rule: entering = smallest-index improving column, leaving =
    smallest basis index among minimum-ratio rows. Guarantees termination.
    """
    nrows = tab.shape[0]
    while True:
        col = -1
        for j in range(allowed):
            if tab[0, j] < -_PIVOT_TOL:
                col = j
                break
        if col < 0:
            return
        row = -1
        best_ratio = None
        for r in range(1, nrows):
            if tab[r, col] > _PIVOT_TOL:
                ratio = tab[r, -1] / tab[r, col]
                if (
                    best_ratio is None
                    or ratio < best_ratio - _PIVOT_TOL
                    or (abs(ratio - best_ratio) <= _PIVOT_TOL and basis[r - 1] < basis[row - 1])
                ):
                    best_ratio = ratio
                    row = r
        if row < 0:
            raise ArithmeticError("unbounded LP in oracle")
        _pivot(tab, basis, row, col)


def _two_phase_simplex(
    a_mat: np.ndarray, rhs: np.ndarray, obj: np.ndarray
) -> tuple[Optional[float], Optional[np.ndarray]]:
    """Textbook dense two-phase simplex.

    Returns (optimal objective of min obj'x, duals y) or (None, None)
    when infeasible. Duals are recovered from the original columns as
    y = obj_B @ inv(B).
    """
    nrows, ncols = a_mat.shape
    # phase I tableau: [original | artificials | rhs]
    tab = np.zeros((nrows + 1, ncols + nrows + 1))
    tab[1:, :ncols] = a_mat
    tab[1:, ncols : ncols + nrows] = np.eye(nrows)
    tab[1:, -1] = rhs
    basis = [ncols + r for r in range(nrows)]
    # phase I objective: sum of artificials, expressed in nonbasic terms
    tab[0, :ncols] = -a_mat.sum(axis=0)
    tab[0, -1] = -rhs.sum()
    _bland_iterate(tab, basis, allowed=ncols)
    if tab[0, -1] < -1e-7:
        return None, None
    # drive any lingering zero-level artificials out of the basis
    for r in range(1, nrows + 1):
        if basis[r - 1] >= ncols:
            for j in range(ncols):
                if abs(tab[r, j]) > _PIVOT_TOL:
                    _pivot(tab, basis, r, j)
                    break

    # phase II: rebuild the objective row for the real objective
    tab[0, :] = 0.0
    tab[0, :ncols] = obj
    for r in range(1, nrows + 1):
        if basis[r - 1] < ncols:
            tab[0, :] -= obj[basis[r - 1]] * tab[r, :]
    _bland_iterate(tab, basis, allowed=ncols)

    value = -tab[0, -1]
    obj_basic = np.array([obj[b] if b < ncols else 0.0 for b in basis])
    b_matrix = np.empty((nrows, nrows))
    for r, b in enumerate(basis):
        if b < ncols:
            b_matrix[:, r] = a_mat[:, b]
        else:
            unit = np.zeros(nrows)
            unit[b - ncols] = 1.0
            b_matrix[:, r] = unit
    duals = np.linalg.solve(b_matrix.T, obj_basic)
    return value, duals
