"""Deterministic pricing-instance generators.

Two families: a synthetic portfolio with lognormal reference prices,
piecewise-linear demand, and proportional uncertainty; and a retail-style
portfolio with four SKU segments, iso-elastic demand, psychological
price-ending grids, and heterogeneous per-segment uncertainty.

Every item draws from its own SplitMix64 substream keyed by
(master seed, item index) with a fixed draw order, so the first n items of
a master portfolio are bit-identical across portfolio sizes and prefixes
nest exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

from .instance_model import (
    ItemSpec,
    MenuPoint,
    PricingInstance,
    admissible_band,
    canonical_menu,
)
from .rng import SplitMix64, substream


@dataclass(frozen=True)
class SyntheticConfig:
    n: int
    m: int
    alpha: float  # proportional deviation level
    sigma: float = 0.10  # fairness tolerance
    seed: int = 42
    eps: float = 0.02  # relative margin slack of the baseline policy

    def __post_init__(self):
        if self.n < 1 or self.m < 2:
            raise ValueError("need n >= 1 and m >= 2")
        if not 0.0 <= self.alpha <= 1.0:
            raise ValueError("alpha must lie in [0, 1]")


# (name, size, alpha, ref price median, ref price tau^2,
#  demand median, demand tau^2, elasticity range)
_RETAIL_SEGMENTS = (
    ("staples", 120, 0.08, 3.0, 0.15, 150.0, 0.30, (1.2, 2.0)),
    ("mainstream", 100, 0.15, 5.5, 0.20, 60.0, 0.35, (2.0, 3.5)),
    ("premium", 50, 0.12, 9.0, 0.25, 20.0, 0.40, (1.5, 2.5)),
    ("private_label", 30, 0.25, 3.5, 0.10, 80.0, 0.25, (3.0, 5.0)),
)


@dataclass(frozen=True)
class RetailConfig:
    seed: int = 42
    segment_sizes: tuple[int, int, int, int] = (120, 100, 50, 30)
    segment_alphas: tuple[float, float, float, float] = (0.08, 0.15, 0.12, 0.25)
    m: int = 20
    sigma: float = 0.10
    eps: float = 0.02

    def __post_init__(self):
        if any(s <= 0 for s in self.segment_sizes):
            raise ValueError("segment sizes must be positive")
        if self.m < 2:
            raise ValueError("need m >= 2")


def _closest_admissible(item: ItemSpec) -> MenuPoint:
    """Admissible menu point closest to the reference price (ties: lower)."""
    lo, hi = admissible_band(item)
    best = None
    for p in item.menu:
        if lo <= p.price <= hi:
            gap = abs(p.price - item.ref_price)
            if best is None or gap < best[0]:
                best = (gap, p)
    if best is None:
        raise ValueError("item has no admissible menu point")
    return best[1]


def calibrate_margin_target(items: Sequence[ItemSpec], eps: float) -> float:
    """Margin target giving the closest-to-reference baseline policy a
    relative slack of eps: at the baseline prices, N/D equals the returned
    target divided by (1 - eps)."""
    num = 0.0
    den = 0.0
    for item in items:
        p = _closest_admissible(item)
        num += item.exposure * p.price * p.demand
        den += item.exposure * item.ref_price * p.demand
    return (1.0 - eps) * num / den


def _synthetic_item(rng: SplitMix64, cfg: SyntheticConfig) -> ItemSpec:
    # fixed draw order: a, omega, menu offsets, demand scale, elasticity
    a = rng.lognormal(5.0, 0.5)
    omega = rng.lognormal(0.0, 0.3)
    offsets = [rng.uniform_in(-0.15, 0.15) for _ in range(cfg.m)]
    b = rng.lognormal(3.0, 0.4)
    eta = rng.uniform_in(1.5, 3.5)
    if not any(abs(u) <= cfg.sigma for u in offsets):
        # guarantee a nonempty admissible menu: pull the nearest offset to
        # the reference price (only reachable for tiny m)
        j = min(range(cfg.m), key=lambda j: abs(offsets[j]))
        offsets[j] = 0.0
    points = []
    for u in offsets:
        x = a * (1.0 + u)
        g = b * max(0.0, 1.0 - eta * (x - a) / a)
        points.append(MenuPoint(price=x, demand=g, deviation=cfg.alpha * g))
    return ItemSpec(
        ref_price=a, exposure=omega, tolerance=cfg.sigma, menu=canonical_menu(points)
    )


def gen_synthetic(cfg: SyntheticConfig) -> PricingInstance:
    """Synthetic portfolio: lognormal prices/exposures (medians ~148 and ~1),
    menus at +/-15% around reference, piecewise-linear demand, and
    deviations proportional to nominal demand."""
    items = tuple(_synthetic_item(substream(cfg.seed, i), cfg) for i in range(cfg.n))
    delta = calibrate_margin_target(items, cfg.eps)
    meta = {
        "generator": "synthetic",
        "seed": cfg.seed,
        "n": cfg.n,
        "m": cfg.m,
        "alpha": cfg.alpha,
        "sigma": cfg.sigma,
        "eps": cfg.eps,
    }
    return PricingInstance(items=items, margin_target=delta, meta=meta)


def _snap_to_nine_cents(price: float) -> float:
    """Nearest price ending in 9 cents, ties toward the lower price."""
    cents = price * 100.0
    k = math.ceil((cents - 9.0) / 10.0 - 0.5)
    k = max(k, 0)
    return (10 * k + 9) / 100.0


def _retail_item(
    rng: SplitMix64, seg: tuple, alpha: float, m: int, sigma: float
) -> tuple[ItemSpec, float]:
    _, _, _, a_med, a_tau2, d_med, d_tau2, eta_range = seg
    a = rng.lognormal(math.log(a_med), math.sqrt(a_tau2))
    d = rng.lognormal(math.log(d_med), math.sqrt(d_tau2))
    eta = rng.uniform_in(*eta_range)
    lo, hi = a * (1.0 - sigma), a * (1.0 + sigma)
    raw = [lo + j * (hi - lo) / (m - 1) for j in range(m)]
    prices = sorted({_snap_to_nine_cents(x) for x in raw})
    if not any(lo - 1e-9 <= x <= hi + 1e-9 for x in prices):
        prices.append(a)  # degenerate band narrower than the cent grid
    points = []
    for x in prices:
        g = d * (x / a) ** (-eta)
        points.append(MenuPoint(price=x, demand=g, deviation=alpha * g))
    item = ItemSpec(
        ref_price=a, exposure=1.0, tolerance=sigma, menu=canonical_menu(points)
    )
    return item, d


def gen_retail(cfg: RetailConfig = RetailConfig()) -> PricingInstance:
    """Retail-style portfolio: four SKU segments with segment-specific
    iso-elastic demand, volume-share exposures, price grids snapped to
    $.X9 endings, and heterogeneous deviation levels."""
    items: list[ItemSpec] = []
    volumes: list[float] = []
    index = 0
    for seg, size, alpha in zip(_RETAIL_SEGMENTS, cfg.segment_sizes, cfg.segment_alphas):
        for _ in range(size):
            item, d = _retail_item(substream(cfg.seed, index), seg, alpha, cfg.m, cfg.sigma)
            items.append(item)
            volumes.append(d)
            index += 1
    d_bar = sum(volumes) / len(volumes)
    # exposures weight each SKU by its volume share
    items = [
        ItemSpec(
            ref_price=it.ref_price,
            exposure=d / d_bar,
            tolerance=it.tolerance,
            menu=it.menu,
        )
        for it, d in zip(items, volumes)
    ]
    delta = calibrate_margin_target(items, cfg.eps)
    meta = {
        "generator": "retail",
        "seed": cfg.seed,
        "segment_sizes": list(cfg.segment_sizes),
        "segment_alphas": list(cfg.segment_alphas),
        "m": cfg.m,
        "sigma": cfg.sigma,
        "eps": cfg.eps,
    }
    return PricingInstance(items=tuple(items), margin_target=delta, meta=meta)


def prefix(inst: PricingInstance, n: int) -> PricingInstance:
    """First n items of a master portfolio, with the margin target
    recalibrated to keep the same relative baseline slack."""
    if not 1 <= n <= len(inst.items):
        raise ValueError(f"prefix size must lie in [1, {len(inst.items)}], got {n}")
    items = inst.items[:n]
    eps = inst.meta.get("eps", 0.02)
    delta = calibrate_margin_target(items, eps)
    meta = dict(inst.meta)
    meta["prefix_n"] = n
    return PricingInstance(items=items, margin_target=delta, meta=meta)
