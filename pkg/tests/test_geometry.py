import json

import pytest

from tilepress.geometry import (
    GeometryError,
    check_partition,
    realize_geometry,
)
from tilepress.rule import builtin_rule, parse_rule, serialize_rule


@pytest.mark.parametrize("name,area", [
    ("lattes-2x2", 1.0), ("lattes-3x3", 1.0), ("triangle-2x2", 0.5),
])
@pytest.mark.parametrize("depth", [1, 2, 3])
def test_faces_partition_exactly(name, area, depth):
    real = realize_geometry(builtin_rule(name), depth)
    for locn in (0, 1):
        assert abs(check_partition(real, locn) - area) < 1e-9


def test_polygon_count_matches_word_count():
    rule = builtin_rule("lattes-3x3")
    real = realize_geometry(rule, 2)
    assert len(real.polygons) == 2 * rule.degree**2
    assert len(real.face_words(0)) == rule.degree**2


def test_level_one_grid_is_congruent_squares():
    real = realize_geometry(builtin_rule("lattes-3x3"), 1)
    for poly in real.polygons.values():
        xs = sorted({round(p[0], 12) for p in poly})
        ys = sorted({round(p[1], 12) for p in poly})
        assert len(xs) == 2 and len(ys) == 2
        assert abs((xs[1] - xs[0]) - 1 / 3) < 1e-12
        assert abs((ys[1] - ys[0]) - 1 / 3) < 1e-12


def test_carpet_cells_match_base3_digits():
    """Depth-3 carpet words occupy exactly the grid cells whose base-3
    digit pairs never hit the center, the standard carpet prefractal."""
    rule = builtin_rule("lattes-3x3")
    banned = {rule.index.tile_pos["w11"], rule.index.tile_pos["b11"]}
    real = realize_geometry(rule, 3)
    covered = set()
    for w, poly in real.polygons.items():
        if rule.index.loc[w[0]] != 0 or any(a in banned for a in w):
            continue
        cx = sum(p[0] for p in poly) / 4 * 27
        cy = sum(p[1] for p in poly) / 4 * 27
        covered.add((int(cx), int(cy)))

    def carpet(i, j):
        for _ in range(3):
            if i % 3 == 1 and j % 3 == 1:
                return False
            i, j = i // 3, j // 3
        return True

    oracle = {(i, j) for i in range(27) for j in range(27) if carpet(i, j)}
    assert covered == oracle
    assert len(covered) == 8**3


def test_flap_renders_schematically():
    rule = builtin_rule("flap-2-1")
    real = realize_geometry(rule, 2)
    assert len(real.polygons) == 2 * 36
    assert real.schematic_words
    # words staying in the base grid are not flagged
    grid = [w for w in real.polygons if w not in real.schematic_words]
    assert grid
    # base-grid words still tile each face exactly
    assert abs(check_partition(real, 0) - 1.0) < 1e-9


def test_depth_cap_and_bad_depth():
    rule = builtin_rule("lattes-2x2")
    with pytest.raises(GeometryError):
        realize_geometry(rule, 9, cap=8)
    with pytest.raises(GeometryError):
        realize_geometry(rule, 0)


def test_rule_without_geometry_rejected():
    doc = json.loads(serialize_rule(builtin_rule("lattes-2x2")))
    doc.pop("base_geometry", None)
    name_map = {t["id"]: f"t{i}" for i, t in enumerate(doc["tiles"])}
    for t in doc["tiles"]:
        t["id"] = name_map[t["id"]]
        for s in t["sides"]:
            s["neighbor_tile"] = name_map[s["neighbor_tile"]]
    rule = parse_rule(json.dumps(doc))
    with pytest.raises(GeometryError):
        realize_geometry(rule, 1)
