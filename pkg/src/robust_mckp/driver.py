"""End-to-end robust solve: theta enumeration with discrete recovery.

For every candidate theta (ascending): build the theta-modified knapsack
view, skip when its capacity is negative, build per-item hulls, solve the
LP relaxation exactly by hull-greedy, recover a discrete choice, gate it
on the exact robust certificate, and keep the best accepted objective.
Candidates are independent work units; the incumbent fold is an
associative max by (objective, then smaller theta), so results do not
depend on the evaluation schedule.
"""

from __future__ import annotations

import dataclasses
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from functools import partial
from typing import Callable, Optional, Sequence

import numpy as np

from . import _kernel, hull, lp_hull_greedy, reduction, robust_core, rounding, stress
from .instance_model import DiscreteSolution, PricingInstance

_PHASES = ("reduce", "hull", "lp", "round", "certify")


@dataclass(frozen=True)
class ThetaTrace:
    theta: float
    capacity: float
    skipped: bool
    opt_lp: Optional[float] = None
    l_rd: Optional[float] = None
    dv_max: Optional[float] = None
    objective: Optional[float] = None
    certificate: Optional[float] = None
    accepted: bool = False


@dataclass(frozen=True)
class Counters:
    total: int
    skipped: int
    evaluated: int
    rejected: int
    improved: int


@dataclass(frozen=True)
class SolveReport:
    best: Optional[DiscreteSolution]
    trace: tuple[ThetaTrace, ...]
    counters: Counters
    timing: dict
    best_trace_index: Optional[int]
    max_opt_lp: Optional[float]

    @property
    def feasible(self) -> bool:
        return self.best is not None


class _Arrays:
    """Padded per-option arrays for the per-theta hot path.

    Padding uses s = -inf (never a baseline) and |t| = 0; every per-theta
    quantity derived here matches the pure build_mckp arithmetic value for
    value, since the elementwise operations are identical.
    """

    def __init__(self, coeffs):
        n = len(coeffs)
        mmax = max((len(item) for item in coeffs), default=1)
        self.n = n
        self.counts = [len(item) for item in coeffs]
        self.counts_arr = np.array(self.counts, dtype=np.int64)
        self.s = np.full((n, mmax), -np.inf)
        self.t_abs = np.zeros((n, mmax))
        self.v2d = np.zeros((n, mmax))
        for i, item in enumerate(coeffs):
            for j, o in enumerate(item):
                self.s[i, j] = o.s
                self.t_abs[i, j] = abs(o.t)
                self.v2d[i, j] = o.v
        self.v_lists = [[o.v for o in item] for item in coeffs]
        self.price_index = [[o.price_index for o in item] for item in coeffs]
        self.rows = np.arange(n)


@dataclass(frozen=True)
class _Candidate:
    trace: ThetaTrace
    choice: Optional[tuple[int, ...]] = None
    margin_slack: Optional[float] = None
    phase_times: tuple = (0.0,) * len(_PHASES)


def _evaluate_candidate(
    arrays: _Arrays,
    gamma: int,
    repair: bool,
    completion: bool,
    theta: float,
    use_kernel: Optional[bool] = None,
) -> _Candidate:
    if use_kernel is None:
        use_kernel = _kernel.HAVE_KERNEL
    times = [0.0] * len(_PHASES)
    t0 = time.perf_counter()
    st = arrays.s - np.maximum(0.0, arrays.t_abs - theta)
    base = np.argmax(st, axis=1)
    smax = st[arrays.rows, base]
    capacity = sum(smax.tolist()) - gamma * theta
    t1 = time.perf_counter()
    times[0] = t1 - t0
    if capacity < 0:
        return _Candidate(
            trace=ThetaTrace(theta=theta, capacity=capacity, skipped=True),
            phase_times=tuple(times),
        )

    if use_kernel:
        (
            hull_c,
            hull_v,
            hull_opt,
            hstart,
            seg_slope,
            seg_len,
            seg_item,
            seg_k,
            dv_max,
        ) = _kernel.build_hulls(st, smax, arrays.v2d, arrays.counts_arr)
        t2 = time.perf_counter()
        times[1] = t2 - t1
        order = lp_hull_greedy.stable_desc_order(seg_slope)
        status, vertex, frac_item, _, _, opt_lp = _kernel.greedy_fill(
            hull_c, hull_v, hstart, order, seg_len, seg_item, seg_k, capacity
        )
        if status:
            raise lp_hull_greedy.LpInfeasible(-capacity)
        t3 = time.perf_counter()
        times[2] = t3 - t2
        down_value, _, final_opt = _kernel.recover_choice(
            hull_c,
            hull_v,
            hull_opt,
            hstart,
            vertex,
            frac_item,
            capacity,
            repair,
            completion,
        )
        l_rd = opt_lp - down_value
        opt_idx = final_opt.tolist()
    else:
        costs = (smax[:, None] - st).tolist()
        chains = [
            hull.build_chain(costs[i], arrays.v_lists[i]) for i in range(arrays.n)
        ]
        dv_max = hull.max_value_jump(chains)
        t2 = time.perf_counter()
        times[1] = t2 - t1
        lp = lp_hull_greedy.solve_lp(chains, capacity)
        opt_lp = lp.objective
        t3 = time.perf_counter()
        times[2] = t3 - t2
        outcome = rounding.recover(lp, chains, capacity, repair, completion)
        l_rd = outcome.loss_rd
        opt_idx = [
            chains[i].option_index[k] for i, k in enumerate(outcome.choice_final)
        ]

    if l_rd < -1e-9 or l_rd > dv_max + 1e-9:
        raise RuntimeError(
            f"round-down loss {l_rd} violates the additive hull-jump bound "
            f"{dv_max} at theta={theta}"
        )
    choice = tuple(arrays.price_index[i][j] for i, j in enumerate(opt_idx))
    objective = sum(arrays.v_lists[i][j] for i, j in enumerate(opt_idx))
    t4 = time.perf_counter()
    times[3] = t4 - t3

    opt_arr = np.asarray(opt_idx)
    s_choice = arrays.s[arrays.rows, opt_arr].tolist()
    t_choice = arrays.t_abs[arrays.rows, opt_arr].tolist()
    slack = sum(s_choice)
    cert = slack - robust_core.beta(t_choice, gamma)
    accepted = cert >= -robust_core.CERT_TOL
    times[4] = time.perf_counter() - t4
    return _Candidate(
        trace=ThetaTrace(
            theta=theta,
            capacity=capacity,
            skipped=False,
            opt_lp=opt_lp,
            l_rd=l_rd,
            dv_max=dv_max,
            objective=objective,
            certificate=cert,
            accepted=accepted,
        ),
        choice=choice,
        margin_slack=slack,
        phase_times=tuple(times),
    )


def solve(
    inst: PricingInstance,
    gamma: int,
    repair: bool = True,
    completion: bool = True,
    threads: int = 1,
) -> SolveReport:
    """Best certified discrete choice over all candidate thetas.

    Full enumeration without early termination: with exact subproblem
    solves the candidate set provably contains an optimal theta, and the
    exact certificate is the final feasibility authority for each
    recovered choice. Returns an infeasible report when no theta yields a
    nonnegative capacity and a certified selection.
    """
    wall0 = time.perf_counter()
    coeffs = reduction.option_coeffs(inst)
    n = len(coeffs)
    if not 0 <= gamma <= n:
        raise ValueError(f"gamma must lie in [0, {n}], got {gamma}")
    thetas = robust_core.candidate_thetas(coeffs)
    arrays = _Arrays(coeffs)
    eval_one = partial(_evaluate_candidate, arrays, gamma, repair, completion)
    if threads > 1:
        chunk = max(1, len(thetas) // (threads * 8))
        with ThreadPoolExecutor(max_workers=threads) as ex:
            candidates = list(ex.map(eval_one, thetas, chunksize=chunk))
    else:
        candidates = [eval_one(th) for th in thetas]

    best_cand: Optional[_Candidate] = None
    best_idx: Optional[int] = None
    skipped = rejected = improved = 0
    max_opt_lp: Optional[float] = None
    for idx, cand in enumerate(candidates):
        tr = cand.trace
        if tr.skipped:
            skipped += 1
            continue
        if max_opt_lp is None or tr.opt_lp > max_opt_lp:
            max_opt_lp = tr.opt_lp
        if not tr.accepted:
            rejected += 1
            continue
        if best_cand is None or tr.objective > best_cand.trace.objective:
            best_cand = cand
            best_idx = idx
            improved += 1

    best = None
    if best_cand is not None:
        tr = best_cand.trace
        best = DiscreteSolution(
            choice=best_cand.choice,
            objective=tr.objective,
            margin_slack=best_cand.margin_slack,
            certificate=tr.certificate,
            theta_used=tr.theta,
            gamma=gamma,
        )
    timing = {
        p: sum(c.phase_times[k] for c in candidates) for k, p in enumerate(_PHASES)
    }
    timing["total"] = time.perf_counter() - wall0
    return SolveReport(
        best=best,
        trace=tuple(c.trace for c in candidates),
        counters=Counters(
            total=len(candidates),
            skipped=skipped,
            evaluated=len(candidates) - skipped,
            rejected=rejected,
            improved=improved,
        ),
        timing=timing,
        best_trace_index=best_idx,
        max_opt_lp=max_opt_lp,
    )


# -- frontier and prefix experiment harnesses --------------------------------


@dataclass(frozen=True)
class FrontierRow:
    gamma: int
    feasible: bool
    objective: Optional[float] = None
    rev_ratio: Optional[float] = None
    opt_lp: Optional[float] = None
    l_rd: Optional[float] = None
    dv_max: Optional[float] = None
    gap_lp: Optional[float] = None
    theta: Optional[float] = None
    cert: Optional[float] = None
    time_s: float = 0.0
    viol_adv: Optional[float] = None
    viol_iid: Optional[float] = None
    q05_margin: Optional[float] = None


FRONTIER_CSV_HEADER = (
    "gamma,objective,rev_ratio,opt_lp,l_rd,dv_max,gap_lp,theta,cert,"
    "time_s,viol_adv,viol_iid,q05_margin"
)


def frontier(
    inst: PricingInstance,
    gammas: Sequence[int],
    stress_scenarios: int = 0,
    stress_seed: int = 1,
    repair: bool = True,
    completion: bool = True,
    threads: int = 1,
) -> list[FrontierRow]:
    """Revenue-risk sweep over protection budgets, ascending.

    Revenue ratios are normalized by the nominal (gamma = 0) objective;
    per-gamma infeasibility is recorded as a row flag, not an abort. With
    stress_scenarios > 0, each feasible row is stress-tested adversarially
    at attack level max(gamma, floor(1.5 * gamma)) and with i.i.d. shocks.
    """
    order = sorted(set(int(g) for g in gammas))
    base = solve(inst, 0, repair, completion, threads)
    nominal = base.best.objective if base.best is not None else None
    rows = []
    for g in order:
        rep = base if g == 0 else solve(inst, g, repair, completion, threads)
        if rep.best is None:
            rows.append(FrontierRow(gamma=g, feasible=False, time_s=rep.timing["total"]))
            continue
        tr = rep.trace[rep.best_trace_index]
        gap = tr.l_rd / tr.opt_lp if tr.opt_lp else 0.0
        row = FrontierRow(
            gamma=g,
            feasible=True,
            objective=rep.best.objective,
            rev_ratio=(rep.best.objective / nominal) if nominal else None,
            opt_lp=tr.opt_lp,
            l_rd=tr.l_rd,
            dv_max=tr.dv_max,
            gap_lp=gap,
            theta=rep.best.theta_used,
            cert=rep.best.certificate,
            time_s=rep.timing["total"],
        )
        if stress_scenarios > 0:
            attack = max(g, math.floor(1.5 * g))
            adv = stress.stress(
                inst,
                rep.best.choice,
                stress.StressConfig(
                    scenarios=stress_scenarios,
                    protocol="adversarial",
                    gamma_attack=min(attack, inst.n_items),
                    seed=stress_seed,
                ),
            )
            iid = stress.stress(
                inst,
                rep.best.choice,
                stress.StressConfig(
                    scenarios=stress_scenarios, protocol="iid", seed=stress_seed
                ),
            )
            row = dataclasses.replace(
                row,
                viol_adv=adv.violation_prob,
                viol_iid=iid.violation_prob,
                q05_margin=adv.q05_margin,
            )
        rows.append(row)
    return rows


def _csv_cell(x) -> str:
    if x is None:
        return ""
    if isinstance(x, float):
        return repr(x)
    return str(x)


def frontier_csv(rows: Sequence[FrontierRow]) -> str:
    lines = [FRONTIER_CSV_HEADER]
    for r in rows:
        lines.append(
            ",".join(
                _csv_cell(v)
                for v in (
                    r.gamma,
                    r.objective,
                    r.rev_ratio,
                    r.opt_lp,
                    r.l_rd,
                    r.dv_max,
                    r.gap_lp,
                    r.theta,
                    r.cert,
                    r.time_s,
                    r.viol_adv,
                    r.viol_iid,
                    r.q05_margin,
                )
            )
        )
    return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class PrefixRow:
    n: int
    gamma: int
    feasible: bool
    theta: Optional[float] = None
    objective: Optional[float] = None
    opt_lp: Optional[float] = None
    l_rd: Optional[float] = None
    dv_max: Optional[float] = None
    ratio_rd: Optional[float] = None  # l_rd / dv_max, 0 when no hull jump exists
    gap_lp: Optional[float] = None
    n_gap_lp: Optional[float] = None
    time_s: float = 0.0


PREFIX_CSV_HEADER = (
    "n,gamma,theta,objective,opt_lp,l_rd,dv_max,ratio_rd,gap_lp,n_gap_lp,time_s"
)


def nested_prefix_run(
    master: PricingInstance,
    sizes: Sequence[int],
    gamma_rule: Callable[[int], int],
    repair: bool = True,
    completion: bool = True,
    threads: int = 1,
) -> list[PrefixRow]:
    """Gap-decay experiment over nested prefixes of one master portfolio.

    Each prefix keeps the first n items, recalibrates the margin target,
    and solves at gamma = gamma_rule(n); the rows record the round-down
    loss against its hull-jump bound and the size-scaled relative gap.
    """
    from . import generators

    rows = []
    for n in sizes:
        sub = generators.prefix(master, n)
        g = int(gamma_rule(n))
        rep = solve(sub, g, repair, completion, threads)
        if rep.best is None:
            rows.append(
                PrefixRow(n=n, gamma=g, feasible=False, time_s=rep.timing["total"])
            )
            continue
        tr = rep.trace[rep.best_trace_index]
        ratio = tr.l_rd / tr.dv_max if tr.dv_max > 0 else 0.0
        gap = tr.l_rd / tr.opt_lp if tr.opt_lp else 0.0
        rows.append(
            PrefixRow(
                n=n,
                gamma=g,
                feasible=True,
                theta=rep.best.theta_used,
                objective=rep.best.objective,
                opt_lp=tr.opt_lp,
                l_rd=tr.l_rd,
                dv_max=tr.dv_max,
                ratio_rd=ratio,
                gap_lp=gap,
                n_gap_lp=n * gap,
                time_s=rep.timing["total"],
            )
        )
    return rows


def prefix_csv(rows: Sequence[PrefixRow]) -> str:
    lines = [PREFIX_CSV_HEADER]
    for r in rows:
        lines.append(
            ",".join(
                _csv_cell(v)
                for v in (
                    r.n,
                    r.gamma,
                    r.theta,
                    r.objective,
                    r.opt_lp,
                    r.l_rd,
                    r.dv_max,
                    r.ratio_rd,
                    r.gap_lp,
                    r.n_gap_lp,
                    r.time_s,
                )
            )
        )
    return "\n".join(lines) + "\n"


def report_to_dict(report: SolveReport) -> dict:
    """JSON-ready view of a solve report; timing isolated under one key."""
    best = None
    if report.best is not None:
        b = report.best
        best = {
            "choice": list(b.choice),
            "objective": b.objective,
            "margin_slack": b.margin_slack,
            "certificate": b.certificate,
            "theta_used": b.theta_used,
            "gamma": b.gamma,
        }
    return {
        "feasible": report.feasible,
        "best": best,
        "counters": report.counters.__dict__,
        "max_opt_lp": report.max_opt_lp,
        "trace": [
            {
                "theta": t.theta,
                "capacity": t.capacity,
                "skipped": t.skipped,
                "opt_lp": t.opt_lp,
                "l_rd": t.l_rd,
                "dv_max": t.dv_max,
                "objective": t.objective,
                "certificate": t.certificate,
                "accepted": t.accepted,
            }
            for t in report.trace
        ],
        "timing": report.timing,
    }
