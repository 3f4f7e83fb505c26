import json

import pytest

from tilepress.rule import (
    RuleFormatError,
    builtin_rule,
    parse_rule,
    serialize_rule,
    validate_rule,
)

ALL_RULES = ["lattes-2x2", "lattes-3x3", "triangle-2x2", "flap-2-1"]


@pytest.mark.parametrize("name", ALL_RULES)
def test_builtins_validate(name):
    rule = builtin_rule(name)
    report = validate_rule(rule)
    assert report.ok, report.violations


def test_lattes_2x2_shape():
    rule = builtin_rule("lattes-2x2")
    assert rule.m == 4
    assert rule.degree == 4
    assert len(rule.tiles) == 8
    report = validate_rule(rule)
    assert report.ramification_sum == 2 * rule.degree - 2 == 6


def test_lattes_3x3_tile_split():
    rule = builtin_rule("lattes-3x3")
    whites = [t for t in rule.tiles if t.location == "white"]
    blacks = [t for t in rule.tiles if t.location == "black"]
    assert len(whites) == 9 and len(blacks) == 9


def test_triangle_shape():
    rule = builtin_rule("triangle-2x2")
    assert rule.m == 3
    assert rule.degree == 4
    assert sum(1 for t in rule.tiles if t.location == "white") == 4


def test_flap_degree_and_critical_corner():
    rule = builtin_rule("flap-2-1")
    assert rule.degree == 4 + 2 * 1
    assert validate_rule(rule).ramification_sum == 2 * rule.degree - 2


@pytest.mark.parametrize("name", ALL_RULES)
def test_serialize_parse_roundtrip(name):
    rule = builtin_rule(name)
    text = serialize_rule(rule)
    again = parse_rule(text)
    assert serialize_rule(again) == text
    assert validate_rule(again).ok


def test_parse_empty_tiles_rejected():
    with pytest.raises(RuleFormatError):
        parse_rule(json.dumps({"m": 4, "degree": 4, "tiles": []}))


def test_parse_accepts_self_neighbor_validate_rejects():
    doc = json.loads(serialize_rule(builtin_rule("lattes-2x2")))
    side = doc["tiles"][0]["sides"][0]
    side["neighbor_tile"] = doc["tiles"][0]["id"]
    side["neighbor_side"] = 0
    rule = parse_rule(json.dumps(doc))  # parse/validate separation
    report = validate_rule(rule)
    assert not report.ok
    assert any("involution" in v for v in report.violations)


def test_corrupted_neighbor_breaks_involution():
    doc = json.loads(serialize_rule(builtin_rule("lattes-3x3")))
    doc["tiles"][3]["sides"][1]["neighbor_side"] = (
        doc["tiles"][3]["sides"][1]["neighbor_side"] + 1
    ) % 4
    report = validate_rule(parse_rule(json.dumps(doc)))
    assert not report.ok
    assert any("involution" in v for v in report.violations)


def test_unknown_builtin():
    with pytest.raises(ValueError):
        builtin_rule("lattes-1x1")
    with pytest.raises(ValueError):
        builtin_rule("flap-2-0")
    with pytest.raises(ValueError):
        builtin_rule("dodecahedron")
