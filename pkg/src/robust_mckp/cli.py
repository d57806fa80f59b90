"""Command-line surface: generate, solve, frontier, prefixes, stress,
validate, and oracle cross-checks.

Machine output (JSON or CSV) goes to stdout or the --out file; diagnostics
go to stderr. Exit codes: 0 success, 1 infeasible, 2 input error,
3 internal guard tripped.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from pathlib import Path

from . import driver, generators, hull, oracle, robust_core, stress
from .instance_model import (
    InstanceFormatError,
    from_json,
    solution_from_json,
    to_json,
    validate,
)
from .lp_hull_greedy import critical_slope, solve_lp
from .reduction import EmptyAdmissibleMenu, build_mckp, option_coeffs
from .rng import substream

EXIT_OK = 0
EXIT_INFEASIBLE = 1
EXIT_INPUT = 2
EXIT_GUARD = 3


def _default_threads() -> int:
    env = os.environ.get("ROBUST_MCKP_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            pass
    return os.cpu_count() or 1


def _build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="robust-mckp")
    p.add_argument("--threads", type=int, default=None, help="worker cap; results are independent of it")
    sub = p.add_subparsers(dest="cmd", required=True)

    g = sub.add_parser("generate", help="write a generated instance")
    g.add_argument("--kind", choices=("synthetic", "retail"), required=True)
    g.add_argument("--n", type=int, default=50)
    g.add_argument("--m", type=int, default=20)
    g.add_argument("--alpha", type=float, default=0.10)
    g.add_argument("--sigma", type=float, default=0.10)
    g.add_argument("--eps", type=float, default=0.02)
    g.add_argument("--seed", type=int, default=42)
    g.add_argument("--segment-sizes", type=str, default="120,100,50,30")
    g.add_argument("--segment-alphas", type=str, default="0.08,0.15,0.12,0.25")
    g.add_argument("--out", type=str, default=None)

    s = sub.add_parser("solve", help="solve one instance at a fixed budget")
    s.add_argument("--instance", required=True)
    s.add_argument("--gamma", type=int, required=True)
    s.add_argument("--no-repair", action="store_true")
    s.add_argument("--no-complete", action="store_true")
    s.add_argument("--out", type=str, default=None)

    f = sub.add_parser("frontier", help="revenue-risk sweep over budgets")
    f.add_argument("--instance", required=True)
    f.add_argument("--gammas", required=True, help="comma-separated budgets")
    f.add_argument("--stress-scenarios", type=int, default=0)
    f.add_argument("--seed", type=int, default=1)
    f.add_argument("--format", choices=("csv", "json"), default="csv")
    f.add_argument("--out", type=str, default=None)

    x = sub.add_parser("prefixes", help="nested-prefix gap-decay experiment")
    x.add_argument("--instance", required=True, help="master portfolio")
    x.add_argument("--sizes", required=True, help="comma-separated prefix sizes")
    x.add_argument(
        "--gamma-rule",
        default="sqrt",
        help="sqrt, tenth, zero, or an integer literal",
    )
    x.add_argument("--format", choices=("csv", "json"), default="csv")
    x.add_argument("--out", type=str, default=None)

    t = sub.add_parser("stress", help="Monte Carlo stress of a solution")
    t.add_argument("--instance", required=True)
    t.add_argument("--solution", required=True)
    t.add_argument("--protocol", choices=("adversarial", "iid"), default="adversarial")
    t.add_argument("--gamma-attack", type=int, default=0)
    t.add_argument("--scenarios", type=int, default=10_000)
    t.add_argument("--seed", type=int, default=1)
    t.add_argument("--out", type=str, default=None)

    v = sub.add_parser("validate", help="check instance invariants")
    v.add_argument("--instance", required=True)

    o = sub.add_parser("oracle-check", help="randomized solver cross-validation")
    o.add_argument("--trials", type=int, default=200)
    o.add_argument("--max-n", type=int, default=5)
    o.add_argument("--max-m", type=int, default=4)
    o.add_argument("--seed", type=int, default=1)
    o.add_argument("--out", type=str, default=None)
    return p


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _load_instance(path: str):
    return from_json(Path(path).read_text())


def _parse_int_list(text: str) -> list[int]:
    return [int(x) for x in text.split(",") if x.strip() != ""]


def _gamma_rule(name: str):
    if name == "sqrt":
        return lambda n: int(math.isqrt(n))
    if name == "tenth":
        return lambda n: n // 10
    if name == "zero":
        return lambda n: 0
    fixed = int(name)
    return lambda n: fixed


def _cmd_generate(args) -> int:
    if args.kind == "synthetic":
        inst = generators.gen_synthetic(
            generators.SyntheticConfig(
                n=args.n,
                m=args.m,
                alpha=args.alpha,
                sigma=args.sigma,
                seed=args.seed,
                eps=args.eps,
            )
        )
    else:
        sizes = tuple(_parse_int_list(args.segment_sizes))
        alphas = tuple(float(a) for a in args.segment_alphas.split(","))
        inst = generators.gen_retail(
            generators.RetailConfig(
                seed=args.seed,
                segment_sizes=sizes,
                segment_alphas=alphas,
                m=args.m,
                sigma=args.sigma,
                eps=args.eps,
            )
        )
    _emit(to_json(inst), args.out)
    return EXIT_OK


def _cmd_solve(args, threads: int) -> int:
    inst = _load_instance(args.instance)
    report = driver.solve(
        inst,
        args.gamma,
        repair=not args.no_repair,
        completion=not args.no_complete,
        threads=threads,
    )
    _emit(json.dumps(driver.report_to_dict(report), indent=2) + "\n", args.out)
    if report.best is None:
        print("infeasible: no theta yields a certified selection", file=sys.stderr)
        return EXIT_INFEASIBLE
    b = report.best
    print(
        f"objective={b.objective:.6f} theta={b.theta_used:.6g} "
        f"certificate={b.certificate:.6g}",
        file=sys.stderr,
    )
    return EXIT_OK


def _cmd_frontier(args, threads: int) -> int:
    inst = _load_instance(args.instance)
    rows = driver.frontier(
        inst,
        _parse_int_list(args.gammas),
        stress_scenarios=args.stress_scenarios,
        stress_seed=args.seed,
        threads=threads,
    )
    if args.format == "csv":
        _emit(driver.frontier_csv(rows), args.out)
    else:
        _emit(json.dumps([r.__dict__ for r in rows], indent=2) + "\n", args.out)
    return EXIT_OK if any(r.feasible for r in rows) else EXIT_INFEASIBLE


def _cmd_prefixes(args, threads: int) -> int:
    inst = _load_instance(args.instance)
    rows = driver.nested_prefix_run(
        inst,
        _parse_int_list(args.sizes),
        _gamma_rule(args.gamma_rule),
        threads=threads,
    )
    if args.format == "csv":
        _emit(driver.prefix_csv(rows), args.out)
    else:
        _emit(json.dumps([r.__dict__ for r in rows], indent=2) + "\n", args.out)
    return EXIT_OK


def _cmd_stress(args) -> int:
    inst = _load_instance(args.instance)
    sol = solution_from_json(Path(args.solution).read_text())
    if len(sol.choice) != inst.n_items:
        raise InstanceFormatError("solution/instance size mismatch", "$.choice")
    report = stress.stress(
        inst,
        sol.choice,
        stress.StressConfig(
            scenarios=args.scenarios,
            protocol=args.protocol,
            gamma_attack=args.gamma_attack,
            seed=args.seed,
        ),
    )
    _emit(json.dumps(report.__dict__, indent=2) + "\n", args.out)
    return EXIT_OK


def _cmd_validate(args) -> int:
    inst = _load_instance(args.instance)
    report = validate(inst)
    sys.stdout.write(
        json.dumps(
            [
                {"item": v.item, "field": v.field, "message": v.message}
                for v in report
            ],
            indent=2,
        )
        + "\n"
    )
    if report:
        print(f"{len(report)} violation(s)", file=sys.stderr)
        return EXIT_INPUT
    return EXIT_OK


def _cmd_oracle_check(args) -> int:
    """Randomized cross-validation of the hull-greedy LP against the
    tableau oracle; prints max residuals."""
    max_lp_resid = 0.0
    max_dual_resid = 0.0
    checked = 0
    trial = 0
    while checked < args.trials:
        trial += 1
        sub = substream(args.seed, trial)
        n = sub.randint(1, args.max_n)
        m = sub.randint(2, args.max_m)
        inst = generators.gen_synthetic(
            generators.SyntheticConfig(
                n=n, m=m, alpha=0.05 + 0.3 * sub.uniform(), seed=sub.next_u64()
            )
        )
        coeffs = option_coeffs(inst)
        thetas = robust_core.candidate_thetas(coeffs)
        theta = thetas[sub.randint(0, len(thetas) - 1)]
        gamma = sub.randint(0, n)
        view = build_mckp(coeffs, theta, gamma)
        if view.capacity < 0:
            continue
        chains = [
            hull.build_chain(view.costs[i], [o.v for o in coeffs[i]])
            for i in range(n)
        ]
        lp = solve_lp(chains, view.capacity)
        ora = oracle.lp_oracle(view)
        max_lp_resid = max(max_lp_resid, abs(lp.objective - ora.lp_value))
        if lp.fractional_item is not None:
            max_dual_resid = max(
                max_dual_resid, abs((critical_slope(lp) or 0.0) - ora.knapsack_dual)
            )
        checked += 1
    out = {
        "trials": checked,
        "max_lp_residual": max_lp_resid,
        "max_dual_residual_fractional": max_dual_resid,
    }
    _emit(json.dumps(out, indent=2) + "\n", args.out)
    print(
        f"max LP residual {max_lp_resid:.3e} over {checked} trials", file=sys.stderr
    )
    return EXIT_OK if max_lp_resid < 1e-8 else EXIT_GUARD


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    threads = args.threads if args.threads else _default_threads()
    try:
        if args.cmd == "generate":
            return _cmd_generate(args)
        if args.cmd == "solve":
            return _cmd_solve(args, threads)
        if args.cmd == "frontier":
            return _cmd_frontier(args, threads)
        if args.cmd == "prefixes":
            return _cmd_prefixes(args, threads)
        if args.cmd == "stress":
            return _cmd_stress(args)
        if args.cmd == "validate":
            return _cmd_validate(args)
        if args.cmd == "oracle-check":
            return _cmd_oracle_check(args)
        raise AssertionError(f"unhandled command {args.cmd}")
    except oracle.SearchSpaceTooLarge as e:
        print(f"guard: {e}", file=sys.stderr)
        return EXIT_GUARD
    except (InstanceFormatError, EmptyAdmissibleMenu, FileNotFoundError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    raise SystemExit(main())
