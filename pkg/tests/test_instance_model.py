import pytest

from conftest import make_item, tiny_instance
from robust_mckp.generators import SyntheticConfig, gen_synthetic
from robust_mckp.instance_model import (
    DiscreteSolution,
    InstanceFormatError,
    MenuPoint,
    PricingInstance,
    canonical_menu,
    from_json,
    solution_from_json,
    solution_to_json,
    to_json,
    validate,
)


def _valid_instance():
    item = make_item(10.0, 1.0, 0.2, [(9.0, 5.0, 1.0), (11.0, 4.0, 0.5)])
    return PricingInstance(items=(item,), margin_target=0.9, meta={"k": 1})


def test_valid_instance_passes():
    assert validate(_valid_instance()) == []


def test_deviation_above_demand_is_reported():
    item = make_item(10.0, 1.0, 0.2, [(9.0, 5.0, 6.0), (11.0, 4.0, 0.5)])
    inst = PricingInstance(items=(item,), margin_target=0.9)
    report = validate(inst)
    assert len(report) == 1
    assert report[0].item == 0
    assert "deviation" in report[0].field
    assert "menu[0]" in report[0].field


def test_zero_tolerance_without_reference_point_is_reported():
    item = make_item(10.0, 1.0, 0.0, [(9.0, 5.0, 1.0), (11.0, 4.0, 0.5)])
    inst = PricingInstance(items=(item,), margin_target=0.9)
    assert any("admissible" in v.message for v in validate(inst))


def test_zero_tolerance_with_reference_point_is_fine():
    item = make_item(10.0, 1.0, 0.0, [(9.0, 5.0, 1.0), (10.0, 4.5, 0.5)])
    inst = PricingInstance(items=(item,), margin_target=0.9)
    assert validate(inst) == []


def test_validate_is_total_on_garbage():
    item = make_item(-1.0, 0.0, 3.0, [(0.0, -2.0, -1.0), (0.0, 1.0, 2.0)])
    inst = PricingInstance(items=(item,), margin_target=-1.0)
    report = validate(inst)  # must not raise
    assert len(report) >= 5


def test_generator_output_is_valid():
    for seed in range(12):
        inst = gen_synthetic(SyntheticConfig(n=6, m=4, alpha=0.3, seed=seed))
        assert validate(inst) == []


def test_round_trip_identity():
    inst = _valid_instance()
    assert from_json(to_json(inst)) == inst


def test_round_trip_generator_outputs():
    for seed in range(8):
        inst = tiny_instance(seed)
        again = from_json(to_json(inst))
        assert again == inst
        # serialization is idempotent at the byte level
        assert to_json(again) == to_json(inst)


def test_missing_meta_defaults_empty():
    text = to_json(_valid_instance())
    import json

    doc = json.loads(text)
    del doc["meta"]
    inst = from_json(json.dumps(doc))
    assert inst.meta == {}


def test_malformed_field_names_path():
    text = to_json(_valid_instance()).replace("9.0", '"nine"')
    with pytest.raises(InstanceFormatError) as exc:
        from_json(text)
    assert "items[0]" in str(exc.value)


def test_schema_version_mismatch():
    text = to_json(_valid_instance()).replace('"schema_version": "1"', '"schema_version": "2"')
    with pytest.raises(InstanceFormatError, match="schema_version"):
        from_json(text)


def test_invalid_json_reports_line():
    with pytest.raises(InstanceFormatError, match="line"):
        from_json("{ not json")


def test_duplicate_prices_merged_keeping_larger_demand():
    pts = [
        MenuPoint(5.0, 2.0, 0.1),
        MenuPoint(5.0, 3.0, 0.2),
        MenuPoint(4.0, 6.0, 0.0),
    ]
    menu = canonical_menu(pts)
    assert [p.price for p in menu] == [4.0, 5.0]
    assert menu[1].demand == 3.0


def test_solution_round_trip():
    sol = DiscreteSolution(
        choice=(0, 2, 1),
        objective=12.5,
        margin_slack=0.25,
        certificate=0.1,
        theta_used=None,
        gamma=2,
    )
    assert solution_from_json(solution_to_json(sol)) == sol
