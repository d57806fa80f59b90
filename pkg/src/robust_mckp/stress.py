"""Monte Carlo stress engine for discrete price choices.

Two perturbation protocols: adversarial (a random attack set of fixed size
deviates against the margin, scaled Uniform(-1,0)) and i.i.d. (every item
draws an undirected Uniform(-1,1) shock). Scenario s draws from the
SplitMix64 substream (seed, s), so scenario streams are reproducible and
match across attack levels for paired comparisons. Scenarios are evaluated
in vectorized blocks; the streams are identical to the scalar generator.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .instance_model import PricingInstance
from .rng import draw_matrix_u64, substream_states, u64_to_unit

# violations share the certificate tolerance so certified guarantees hold
# bit-for-bit under float noise
VIOLATION_TOL = 1e-9

_BLOCK = 2048  # scenarios per vectorized block (bounds memory)


@dataclass(frozen=True)
class StressConfig:
    scenarios: int = 10_000
    protocol: str = "adversarial"  # or "iid"
    gamma_attack: int = 0  # adversarial attack-set size
    seed: int = 1

    def __post_init__(self):
        if self.scenarios < 1:
            raise ValueError("need at least one scenario")
        if self.protocol not in ("adversarial", "iid"):
            raise ValueError(f"unknown protocol {self.protocol!r}")
        if self.gamma_attack < 0:
            raise ValueError("gamma_attack must be nonnegative")


@dataclass(frozen=True)
class StressReport:
    violation_prob: float
    q05_margin: float
    mean_margin: float
    scenarios: int


def _choice_arrays(inst: PricingInstance, choice: Sequence[int]):
    delta = inst.margin_target
    mu, ghat, dev = [], [], []
    for item, j in zip(inst.items, choice):
        p = item.menu[j]
        mu.append(item.exposure * (p.price - delta * item.ref_price))
        ghat.append(p.demand)
        dev.append(p.deviation)
    return np.array(mu), np.array(ghat), np.array(dev)


def _adversarial_margins(
    mu: np.ndarray, ghat: np.ndarray, dev: np.ndarray, cfg: StressConfig
) -> np.ndarray:
    n = len(mu)
    k = min(cfg.gamma_attack, n)
    nominal = float(np.dot(mu, ghat))
    margins = np.empty(cfg.scenarios)
    if k == 0:
        margins.fill(nominal)
        return margins
    sign_t = np.sign(mu * dev)
    for start in range(0, cfg.scenarios, _BLOCK):
        stop = min(start + _BLOCK, cfg.scenarios)
        states = substream_states(cfg.seed, np.arange(start, stop, dtype=np.uint64))
        draws = draw_matrix_u64(states, 2 * k)
        # draws 0..k-1: partial Fisher-Yates attack-set selection;
        # draws k..2k-1: one Uniform(-1,0) deviation per selected item
        nblock = stop - start
        idx = np.tile(np.arange(n), (nblock, 1))
        rows = np.arange(nblock)
        for j in range(k):
            r = j + (draws[:, j] % np.uint64(n - j)).astype(np.int64)
            picked = idx[rows, r].copy()
            idx[rows, r] = idx[rows, j]
            idx[rows, j] = picked
        attacked = idx[:, :k]
        xi = u64_to_unit(draws[:, k:]) - 1.0  # Uniform(-1, 0)
        xi_signed = xi * sign_t[attacked]
        realized = np.maximum(0.0, ghat[attacked] + xi_signed * dev[attacked])
        delta_margin = (mu[attacked] * (realized - ghat[attacked])).sum(axis=1)
        margins[start:stop] = nominal + delta_margin
    return margins


def _iid_margins(
    mu: np.ndarray, ghat: np.ndarray, dev: np.ndarray, cfg: StressConfig
) -> np.ndarray:
    n = len(mu)
    margins = np.empty(cfg.scenarios)
    for start in range(0, cfg.scenarios, _BLOCK):
        stop = min(start + _BLOCK, cfg.scenarios)
        states = substream_states(cfg.seed, np.arange(start, stop, dtype=np.uint64))
        xi = 2.0 * u64_to_unit(draw_matrix_u64(states, n)) - 1.0  # Uniform(-1, 1)
        realized = np.maximum(0.0, ghat[None, :] + xi * dev[None, :])
        margins[start:stop] = realized @ mu
    return margins


def stress(
    inst: PricingInstance, choice: Sequence[int], cfg: StressConfig
) -> StressReport:
    """Simulate realized margins of a discrete choice under demand shocks.

    Reports the violation probability, the 5% margin quantile
    (nearest-rank), and the mean margin over `cfg.scenarios` scenarios.
    """
    mu, ghat, dev = _choice_arrays(inst, choice)
    if cfg.protocol == "adversarial":
        margins = _adversarial_margins(mu, ghat, dev, cfg)
    else:
        margins = _iid_margins(mu, ghat, dev, cfg)
    violations = int(np.count_nonzero(margins < -VIOLATION_TOL))
    rank = max(int(np.ceil(0.05 * cfg.scenarios)), 1)
    q05 = float(np.partition(margins, rank - 1)[rank - 1])
    return StressReport(
        violation_prob=violations / cfg.scenarios,
        q05_margin=q05,
        mean_margin=float(margins.mean()),
        scenarios=cfg.scenarios,
    )


def worst_case_margin(
    inst: PricingInstance, choice: Sequence[int], gamma: int
) -> float:
    """Realized margin of the deterministic worst scenario inside the
    budget: fully flip the gamma largest deviation magnitudes against the
    margin. Equals the robust certificate up to summation order."""
    mu, ghat, dev = _choice_arrays(inst, choice)
    t = mu * dev
    order = np.argsort(-np.abs(t), kind="stable")[: min(gamma, len(mu))]
    xi_signed = np.zeros(len(mu))
    xi_signed[order] = -np.sign(t[order])
    realized = np.maximum(0.0, ghat + xi_signed * dev)
    return float(np.dot(mu, realized))


def tightness_matrix(
    inst: PricingInstance,
    solutions: Sequence,
    attack_levels: Sequence[int],
    scenarios: int = 10_000,
    seed: int = 1,
) -> list[list[float]]:
    """Violation probabilities of protected solutions under varying attack
    sizes: rows follow `solutions` (each a DiscreteSolution), columns follow
    `attack_levels`. Entries at attack <= protection are zero for certified
    solutions."""
    matrix = []
    for sol in solutions:
        row = []
        for ga in attack_levels:
            cfg = StressConfig(
                scenarios=scenarios,
                protocol="adversarial",
                gamma_attack=ga,
                seed=seed,
            )
            row.append(stress(inst, sol.choice, cfg).violation_prob)
        matrix.append(row)
    return matrix
