"""Pricing-instance data model, validation, and JSON serialization.

All types are immutable after construction and safe to share across
parallel workers. Serialization is lossless: floats are written with
Python's shortest round-trip repr, so ``from_json(to_json(inst)) == inst``
field by field.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Any, Iterable, Optional

SCHEMA_VERSION = "1"

# Closed fairness-band comparison tolerance: guards decimal-grid prices
# landing exactly on a band edge.
FAIRNESS_TOL = 1e-9


class InstanceFormatError(ValueError):
    """Malformed instance/solution document; `path` names the bad field."""

    def __init__(self, message: str, path: str = "$"):
        super().__init__(f"{path}: {message}")
        self.path = path


@dataclass(frozen=True)
class MenuPoint:
    """One discrete price option with its nominal demand and deviation bound."""

    price: float
    demand: float
    deviation: float


@dataclass(frozen=True)
class ItemSpec:
    """One priceable item: reference price, exposure weight, fairness
    tolerance, and its discrete menu (strictly increasing prices)."""

    ref_price: float
    exposure: float
    tolerance: float
    menu: tuple[MenuPoint, ...]


@dataclass(frozen=True)
class PricingInstance:
    """A portfolio of items plus the margin-ratio target."""

    items: tuple[ItemSpec, ...]
    margin_target: float
    meta: dict = field(default_factory=dict)

    @property
    def n_items(self) -> int:
        return len(self.items)


@dataclass(frozen=True)
class DiscreteSolution:
    """One menu choice per item with its objective and robustness data.

    `choice[i]` indexes into `items[i].menu`. `certificate` is the exact
    worst-case margin slack under the uncertainty budget `gamma`; the
    solution is robust-feasible iff it is >= -1e-9.
    """

    choice: tuple[int, ...]
    objective: float
    margin_slack: float
    certificate: float
    theta_used: Optional[float]
    gamma: int


@dataclass(frozen=True)
class Violation:
    item: Optional[int]  # None for instance-level violations
    field: str
    message: str


def admissible_band(item: ItemSpec) -> tuple[float, float]:
    """Closed fairness band around the reference price."""
    lo = (1.0 - item.tolerance) * item.ref_price - FAIRNESS_TOL
    hi = (1.0 + item.tolerance) * item.ref_price + FAIRNESS_TOL
    return lo, hi


def _has_admissible_point(item: ItemSpec) -> bool:
    lo, hi = admissible_band(item)
    return any(lo <= p.price <= hi for p in item.menu)


def canonical_menu(points: Iterable[MenuPoint]) -> tuple[MenuPoint, ...]:
    """Sort by price and merge exact duplicates, keeping the larger demand."""
    out: list[MenuPoint] = []
    for p in sorted(points, key=lambda p: (p.price, -p.demand)):
        if out and p.price == out[-1].price:
            continue  # first of each group carries the max demand
        out.append(p)
    return tuple(out)


def validate(inst: PricingInstance) -> list[Violation]:
    """Report every invariant violation; an empty list means valid.

    Total on malformed-but-typed data: never raises.
    """
    out: list[Violation] = []
    if not inst.margin_target > 0:
        out.append(Violation(None, "margin_target", "must be positive"))
    for i, item in enumerate(inst.items):
        if not item.ref_price > 0:
            out.append(Violation(i, "ref_price", "must be positive"))
        if not item.exposure > 0:
            out.append(Violation(i, "exposure", "must be positive"))
        if not 0.0 <= item.tolerance <= 1.0:
            out.append(Violation(i, "tolerance", "must lie in [0, 1]"))
        if not item.menu:
            out.append(Violation(i, "menu", "must be nonempty"))
            continue
        for j, p in enumerate(item.menu):
            if not p.price > 0:
                out.append(Violation(i, f"menu[{j}].price", "must be positive"))
            if p.demand < 0:
                out.append(Violation(i, f"menu[{j}].demand", "must be nonnegative"))
            if p.deviation < 0:
                out.append(Violation(i, f"menu[{j}].deviation", "must be nonnegative"))
            if p.deviation > p.demand:
                out.append(
                    Violation(i, f"menu[{j}].deviation", "exceeds nominal demand")
                )
            if j > 0 and not p.price > item.menu[j - 1].price:
                out.append(
                    Violation(i, f"menu[{j}].price", "prices not strictly increasing")
                )
        if item.ref_price > 0 and 0.0 <= item.tolerance <= 1.0:
            if not _has_admissible_point(item):
                out.append(
                    Violation(i, "menu", "empty admissible menu (fairness band)")
                )
    return out


# -- JSON ---------------------------------------------------------------------


def to_json(inst: PricingInstance) -> str:
    doc = {
        "schema_version": SCHEMA_VERSION,
        "margin_target": inst.margin_target,
        "items": [
            {
                "ref_price": it.ref_price,
                "exposure": it.exposure,
                "tolerance": it.tolerance,
                "menu": [
                    {"price": p.price, "demand": p.demand, "deviation": p.deviation}
                    for p in it.menu
                ],
            }
            for it in inst.items
        ],
        "meta": inst.meta,
    }
    return json.dumps(doc, sort_keys=True, indent=2) + "\n"


def _require(obj: Any, key: str, kind: type | tuple, path: str) -> Any:
    if not isinstance(obj, dict):
        raise InstanceFormatError("expected an object", path)
    if key not in obj:
        raise InstanceFormatError(f"missing field '{key}'", path)
    val = obj[key]
    if kind is float:
        if isinstance(val, bool) or not isinstance(val, (int, float)):
            raise InstanceFormatError("expected a number", f"{path}.{key}")
        return float(val)
    if not isinstance(val, kind):
        raise InstanceFormatError(f"expected {kind}", f"{path}.{key}")
    return val


def from_json(text: str) -> PricingInstance:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise InstanceFormatError(f"invalid JSON: {e.msg}", f"line {e.lineno}") from e
    if not isinstance(doc, dict):
        raise InstanceFormatError("top level must be an object")
    version = doc.get("schema_version")
    if version != SCHEMA_VERSION:
        raise InstanceFormatError(
            f"unsupported schema_version {version!r} (expected {SCHEMA_VERSION!r})",
            "$.schema_version",
        )
    margin = _require(doc, "margin_target", float, "$")
    raw_items = _require(doc, "items", list, "$")
    items = []
    for i, raw in enumerate(raw_items):
        path = f"$.items[{i}]"
        menu_raw = _require(raw, "menu", list, path)
        menu = []
        for j, mp in enumerate(menu_raw):
            mpath = f"{path}.menu[{j}]"
            menu.append(
                MenuPoint(
                    price=_require(mp, "price", float, mpath),
                    demand=_require(mp, "demand", float, mpath),
                    deviation=_require(mp, "deviation", float, mpath),
                )
            )
        items.append(
            ItemSpec(
                ref_price=_require(raw, "ref_price", float, path),
                exposure=_require(raw, "exposure", float, path),
                tolerance=_require(raw, "tolerance", float, path),
                menu=canonical_menu(menu),
            )
        )
    meta = doc.get("meta", {})
    if not isinstance(meta, dict):
        raise InstanceFormatError("expected an object", "$.meta")
    return PricingInstance(items=tuple(items), margin_target=margin, meta=meta)


def solution_to_json(sol: DiscreteSolution) -> str:
    doc = {
        "choice": list(sol.choice),
        "objective": sol.objective,
        "margin_slack": sol.margin_slack,
        "certificate": sol.certificate,
        "theta_used": sol.theta_used,
        "gamma": sol.gamma,
    }
    return json.dumps(doc, sort_keys=True, indent=2) + "\n"


def solution_from_json(text: str) -> DiscreteSolution:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise InstanceFormatError(f"invalid JSON: {e.msg}", f"line {e.lineno}") from e
    choice = _require(doc, "choice", list, "$")
    if not all(isinstance(c, int) and not isinstance(c, bool) for c in choice):
        raise InstanceFormatError("expected a list of integers", "$.choice")
    theta = doc.get("theta_used")
    if theta is not None and not isinstance(theta, (int, float)):
        raise InstanceFormatError("expected a number or null", "$.theta_used")
    gamma = _require(doc, "gamma", int, "$")
    return DiscreteSolution(
        choice=tuple(choice),
        objective=_require(doc, "objective", float, "$"),
        margin_slack=_require(doc, "margin_slack", float, "$"),
        certificate=_require(doc, "certificate", float, "$"),
        theta_used=None if theta is None else float(theta),
        gamma=gamma,
    )
