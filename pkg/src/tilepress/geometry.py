"""Planar realization of tile words for rendering.

Each builtin family carries enough structure to place its level-1 tiles as
polygons inside a standard face polygon (the unit square for 4-gon pillows,
a unit-base triangle for the 3-gon pillow).  Deeper tiles are obtained by
composing the affine chart of each letter: the chart of a tile maps the
standard face polygon onto that tile's polygon, sending the 0-vertex
positions to the tile's corners in image order.  Accordion ("flap") rules
have no flat realization, so their pocket tiles are drawn schematically as
thin sectors fanned out from the host curve edge and flagged as such.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from tilepress.rule import SubdivisionRule

Point = tuple[float, float]
Word = tuple[int, ...]


class GeometryError(ValueError):
    """The rule has no usable base geometry for the requested realization."""


@dataclass(frozen=True)
class Affine:
    """Planar affine map (x, y) -> (a x + b y + e, c x + d y + f)."""

    a: float
    b: float
    c: float
    d: float
    e: float
    f: float

    def apply(self, p: Point) -> Point:
        x, y = p
        return (self.a * x + self.b * y + self.e, self.c * x + self.d * y + self.f)

    def compose(self, other: "Affine") -> "Affine":
        """Return self ∘ other."""
        return Affine(
            a=self.a * other.a + self.b * other.c,
            b=self.a * other.b + self.b * other.d,
            c=self.c * other.a + self.d * other.c,
            d=self.c * other.b + self.d * other.d,
            e=self.a * other.e + self.b * other.f + self.e,
            f=self.c * other.e + self.d * other.f + self.f,
        )

    @staticmethod
    def from_points(src: list[Point], dst: list[Point]) -> "Affine":
        """Affine map sending src[i] -> dst[i]; src must contain 3
        non-collinear points, any extra pairs are verified."""
        (x0, y0), (x1, y1), (x2, y2) = src[:3]
        det = (x1 - x0) * (y2 - y0) - (x2 - x0) * (y1 - y0)
        if abs(det) < 1e-12:
            raise GeometryError("chart anchor points are collinear")
        out = []
        for k in range(2):
            u0, u1, u2 = (dst[0][k], dst[1][k], dst[2][k])
            ca = ((u1 - u0) * (y2 - y0) - (u2 - u0) * (y1 - y0)) / det
            cb = ((x1 - x0) * (u2 - u0) - (x2 - x0) * (u1 - u0)) / det
            ce = u0 - ca * x0 - cb * y0
            out.append((ca, cb, ce))
        aff = Affine(out[0][0], out[0][1], out[1][0], out[1][1], out[0][2], out[1][2])
        for p, q in zip(src[3:], dst[3:]):
            img = aff.apply(p)
            if abs(img[0] - q[0]) > 1e-9 or abs(img[1] - q[1]) > 1e-9:
                raise GeometryError("corner correspondence is not affine")
        return aff


def face_polygon(m: int) -> list[Point]:
    """Standard face polygon with 0-vertex v at corner v."""
    if m == 4:
        return [(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)]
    if m == 3:
        return [(0.0, 0.0), (0.5, 1.0), (1.0, 0.0)]
    raise GeometryError(f"no standard face polygon for m={m}")


@dataclass
class GeometricRealization:
    rule: SubdivisionRule
    depth: int
    face_outline: list[Point]
    polygons: dict[Word, list[Point]] = field(default_factory=dict)
    schematic_words: set[Word] = field(default_factory=set)

    def face_words(self, location: int) -> list[Word]:
        idx = self.rule.index
        return [w for w in self.polygons if idx.loc[w[0]] == location]


_SQUARE_ID = re.compile(r"^([wb])(?:(\d)(\d)|(\d+)_(\d+))$")
_FLAP_ID = re.compile(r"^f([pq])([xy])(\d+)$")

_TRIANGLE_POINTS = {
    "v0": (0.0, 0.0),
    "v1": (1.0, 0.0),
    "v2": (0.5, 1.0),
    "m0": (0.5, 0.0),
    "m1": (0.75, 0.5),
    "m2": (0.25, 0.5),
}
_TRIANGLE_TILES = {
    "c0": ["v0", "m0", "m2"],
    "c1": ["m0", "v1", "m1"],
    "c2": ["m2", "m1", "v2"],
    "mid": ["m0", "m1", "m2"],
}


def _square_cell(tid: str, k: int) -> tuple[int, int, int] | None:
    mt = _SQUARE_ID.match(tid)
    if mt is None:
        return None
    face = 0 if mt.group(1) == "w" else 1
    if mt.group(2) is not None:
        i, j = int(mt.group(2)), int(mt.group(3))
    else:
        i, j = int(mt.group(4)), int(mt.group(5))
    if not (0 <= i < k and 0 <= j < k):
        return None
    return face, i, j


def _square_corners(face: int, i: int, j: int, k: int) -> list[Point]:
    pts = [(i, j), (i + 1, j), (i + 1, j + 1), (i, j + 1)]
    if face == 1:
        pts = [pts[0], pts[3], pts[2], pts[1]]
    return [(x / k, y / k) for x, y in pts]


def _flap_quad(tag: str, xy: str, pocket: int, k: int) -> list[Point]:
    if tag == "p":
        w: Point = (0.0, 0.0)
        u: Point = (0.0, 1.0 / k)
        normal = (-1.0, 0.0)
    else:
        w = (1.0, (k - 1) / k)
        u = (1.0, 1.0)
        normal = (1.0, 0.0)
    h = 0.05 / k
    base = 2 * pocket * h + (0.0 if xy == "x" else h)
    lo = base + 0.25 * h if xy == "y" else base
    hi = lo + h

    def off(p: Point, t: float) -> Point:
        return (p[0] + normal[0] * t, p[1] + normal[1] * t)

    # generator cycle order: X = [w, u, ., .], Y = [u, w, ., .]
    if xy == "x":
        return [off(w, lo), off(u, lo), off(u, hi), off(w, hi)]
    return [off(u, lo), off(w, lo), off(w, hi), off(u, hi)]


def _unit_charts(rule: SubdivisionRule) -> tuple[dict[str, Affine], set[str]]:
    """Per-tile charts on the standard face polygon; returns (charts,
    schematically placed tile ids)."""
    geom = rule.base_geometry
    kind = geom.get("kind") if geom else None
    looks_flap = geom is None and any(_FLAP_ID.match(t.id) for t in rule.tiles)
    outline = face_polygon(rule.m)
    charts: dict[str, Affine] = {}
    schematic: set[str] = set()

    if kind == "square" or looks_flap:
        if rule.m != 4:
            raise GeometryError("square geometry needs a 4-gon pillow")
        grid = sum(1 for t in rule.tiles if _SQUARE_ID.match(t.id))
        k = round((grid / 2) ** 0.5)
        if 2 * k * k != grid:
            raise GeometryError("tile ids do not form a square grid")
        if kind == "square" and geom.get("k") not in (None, k):
            raise GeometryError("declared grid size disagrees with tile ids")
        for tile in rule.tiles:
            cell = _square_cell(tile.id, k)
            if cell is not None:
                corners = _square_corners(*cell, k)
            else:
                mf = _FLAP_ID.match(tile.id)
                if mf is None or not looks_flap:
                    raise GeometryError(f"tile {tile.id!r} has no grid position")
                corners = _flap_quad(mf.group(1), mf.group(2), int(mf.group(3)), k)
                schematic.add(tile.id)
            src = [outline[v] for v in tile.corners]
            charts[tile.id] = Affine.from_points(src, corners)
        return charts, schematic

    if kind == "triangle":
        if rule.m != 3:
            raise GeometryError("triangle geometry needs a 3-gon pillow")
        for tile in rule.tiles:
            mt = re.match(r"^[wb]-(c0|c1|c2|mid)$", tile.id)
            if mt is None:
                raise GeometryError(f"tile {tile.id!r} has no triangle position")
            names = _TRIANGLE_TILES[mt.group(1)]
            if tile.id.startswith("b"):
                names = [names[0], names[2], names[1]]
            corners = [_TRIANGLE_POINTS[nm] for nm in names]
            src = [outline[v] for v in tile.corners]
            charts[tile.id] = Affine.from_points(src, corners)
        return charts, schematic

    raise GeometryError("rule declares no base geometry")


def realize_geometry(
    rule: SubdivisionRule, depth: int, cap: int = 8
) -> GeometricRealization:
    """Place every tile word of length ``depth`` as a planar polygon."""
    if depth < 1:
        raise GeometryError("depth must be at least 1")
    if depth > cap:
        raise GeometryError(f"depth {depth} exceeds cap {cap}")
    charts, schematic_ids = _unit_charts(rule)
    outline = face_polygon(rule.m)
    tiles = rule.tiles
    real = GeometricRealization(rule=rule, depth=depth, face_outline=outline)

    def walk(word: list[int], aff: Affine) -> None:
        if len(word) == depth:
            key = tuple(word)
            real.polygons[key] = [aff.apply(p) for p in outline]
            if any(tiles[a].id in schematic_ids for a in word):
                real.schematic_words.add(key)
            return
        col = rule.index.col[word[-1]] if word else None
        for a, tile in enumerate(tiles):
            if col is not None and rule.index.loc[a] != col:
                continue
            walk(word + [a], aff.compose(charts[tile.id]))

    walk([], Affine(1, 0, 0, 1, 0, 0))
    expected = 2 * rule.degree**depth
    if len(real.polygons) != expected:
        raise AssertionError(
            f"realized {len(real.polygons)} polygons, expected {expected}"
        )
    return real


def _polygon_area(pts: list[Point]) -> float:
    s = 0.0
    for (x0, y0), (x1, y1) in zip(pts, pts[1:] + pts[:1]):
        s += x0 * y1 - x1 * y0
    return 0.5 * s


def check_partition(real: GeometricRealization, location: int) -> float:
    """Total absolute area of the polygons on one face (1.0 for square
    families at any depth when no schematic tiles are involved; the
    triangle face has area 0.5)."""
    total = 0.0
    for w in real.face_words(location):
        if w in real.schematic_words:
            continue
        total += abs(_polygon_area(real.polygons[w]))
    return total


__all__ = [
    "Affine",
    "GeometricRealization",
    "GeometryError",
    "check_partition",
    "face_polygon",
    "realize_geometry",
]
