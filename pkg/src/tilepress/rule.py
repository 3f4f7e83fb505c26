"""Two-tile subdivision rules on the pillow: schema, validation, builtins.

A rule describes how the two faces (the *white* and *black* 0-tiles) of an
m-gon pillow are subdivided into 2*degree quadrilateral-like 1-tiles, each
mapped homeomorphically onto one of the faces.  Every 1-tile records

* its ``location`` (which face it lies in),
* its ``color`` (which face it maps onto),
* one side per 0-edge of the image face, indexed by that image 0-edge,
* one corner per 0-vertex of the image face.

The corner cycle of a tile lists image 0-vertices in positive boundary order:
ascending ``0,1,...,m-1`` (cyclically) for white-color tiles and descending
for black-color tiles.  Corner ``v`` is incident to the sides with image
edges ``v-1`` and ``v``.

Sides that lie on the invariant curve carry ``sub_edge_of``, the index of the
0-edge containing them, and ``vertex_anchors`` points at the m corners that
are actual 0-vertices.  Together these pin down how the 0-complex sits inside
the 1-complex, which the cell machinery needs.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from itertools import product
from typing import Any, Iterable, Sequence

WHITE = "white"
BLACK = "black"
COLORS = (WHITE, BLACK)


class RuleFormatError(ValueError):
    """Raised when a rule file cannot be parsed into the schema."""


@dataclass(frozen=True)
class Side:
    """One side of a 1-tile, indexed position = image 0-edge is implicit."""

    image_edge: int
    neighbor_tile: str
    neighbor_side: int
    sub_edge_of: int | None = None


@dataclass(frozen=True)
class Tile:
    id: str
    location: str
    color: str
    sides: tuple[Side, ...]
    corners: tuple[int, ...]


@dataclass
class SubdivisionRule:
    m: int
    degree: int
    tiles: list[Tile]
    vertex_anchors: list[tuple[str, int]]
    name: str = ""
    base_geometry: dict[str, Any] | None = None
    assumptions: list[str] = field(default_factory=list)

    _index: "RuleIndex | None" = field(default=None, repr=False, compare=False)

    @property
    def index(self) -> "RuleIndex":
        if self._index is None:
            self._index = RuleIndex(self)
        return self._index

    def tile_by_id(self, tid: str) -> Tile:
        return self.tiles[self.index.tile_pos[tid]]


class RuleIndex:
    """Compiled integer tables for fast word manipulation.

    Colors and locations are 0 (white) / 1 (black).  ``side_by_image[t][e]``
    is the array position of tile ``t``'s side whose image is the 0-edge
    ``e``; all per-side lookups are exposed keyed by image edge, which is the
    index that survives under the subdivision map.
    """

    def __init__(self, rule: SubdivisionRule):
        self.rule = rule
        self.m = rule.m
        self.n_tiles = len(rule.tiles)
        self.tile_pos = {t.id: i for i, t in enumerate(rule.tiles)}
        if len(self.tile_pos) != self.n_tiles:
            raise RuleFormatError("duplicate tile id")
        self.loc = [0 if t.location == WHITE else 1 for t in rule.tiles]
        self.col = [0 if t.color == WHITE else 1 for t in rule.tiles]
        m = rule.m
        self.side_by_image: list[list[int]] = []
        self.neighbor_by_image: list[list[int]] = []
        self.sub_edge_by_image: list[list[int | None]] = []
        self.on_curve_by_image: list[list[bool]] = []
        self.corner_pos_by_image: list[list[int]] = []
        for t in rule.tiles:
            by_img = [-1] * m
            nbr = [-1] * m
            sub: list[int | None] = [None] * m
            onc = [False] * m
            for j, s in enumerate(t.sides):
                if not 0 <= s.image_edge < m:
                    raise RuleFormatError(f"{t.id}: side image out of range")
                by_img[s.image_edge] = j
                nbr[s.image_edge] = self.tile_pos.get(s.neighbor_tile, -1)
                sub[s.image_edge] = s.sub_edge_of
                onc[s.image_edge] = s.sub_edge_of is not None
            self.side_by_image.append(by_img)
            self.neighbor_by_image.append(nbr)
            self.sub_edge_by_image.append(sub)
            self.on_curve_by_image.append(onc)
            cpos = [-1] * m
            for j, v in enumerate(t.corners):
                if 0 <= v < m:
                    cpos[v] = j
            self.corner_pos_by_image.append(cpos)
        # successors[c] = tile indices admissible after a color-c letter
        self.successors = [
            [i for i in range(self.n_tiles) if self.loc[i] == c] for c in (0, 1)
        ]
        self.ids = [t.id for t in rule.tiles]

    def tile_matrix(self) -> list[list[int]]:
        """2x2 count matrix A[location][color] over all 1-tiles."""
        a = [[0, 0], [0, 0]]
        for i in range(self.n_tiles):
            a[self.loc[i]][self.col[i]] += 1
        return a


# ---------------------------------------------------------------------------
# serialization


def _tile_to_dict(t: Tile) -> dict[str, Any]:
    sides = []
    for s in t.sides:
        d: dict[str, Any] = {
            "image_edge": s.image_edge,
            "neighbor_tile": s.neighbor_tile,
            "neighbor_side": s.neighbor_side,
        }
        if s.sub_edge_of is not None:
            d["sub_edge_of"] = s.sub_edge_of
        sides.append(d)
    return {
        "id": t.id,
        "location": t.location,
        "color": t.color,
        "sides": sides,
        "corners": list(t.corners),
    }


def serialize_rule(rule: SubdivisionRule) -> str:
    doc: dict[str, Any] = {
        "name": rule.name,
        "m": rule.m,
        "degree": rule.degree,
        "tiles": [_tile_to_dict(t) for t in rule.tiles],
        "vertex_anchors": [[tid, pos] for tid, pos in rule.vertex_anchors],
    }
    if rule.base_geometry is not None:
        doc["base_geometry"] = rule.base_geometry
    if rule.assumptions:
        doc["assumptions"] = list(rule.assumptions)
    return json.dumps(doc, indent=2) + "\n"


def parse_rule(text: str) -> SubdivisionRule:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise RuleFormatError(f"not valid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise RuleFormatError("top level must be an object")
    for key in ("m", "degree", "tiles"):
        if key not in doc:
            raise RuleFormatError(f"missing required field {key!r}")
    m, degree = doc["m"], doc["degree"]
    if not isinstance(m, int) or not isinstance(degree, int):
        raise RuleFormatError("m and degree must be integers")
    raw_tiles = doc["tiles"]
    if not isinstance(raw_tiles, list) or not raw_tiles:
        raise RuleFormatError("tiles must be a non-empty list")
    tiles: list[Tile] = []
    seen: set[str] = set()
    for rt in raw_tiles:
        try:
            tid = rt["id"]
            sides = tuple(
                Side(
                    image_edge=int(s["image_edge"]),
                    neighbor_tile=str(s["neighbor_tile"]),
                    neighbor_side=int(s["neighbor_side"]),
                    sub_edge_of=(int(s["sub_edge_of"]) if "sub_edge_of" in s else None),
                )
                for s in rt["sides"]
            )
            tile = Tile(
                id=str(tid),
                location=str(rt["location"]),
                color=str(rt["color"]),
                sides=sides,
                corners=tuple(int(c) for c in rt["corners"]),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise RuleFormatError(f"malformed tile entry: {exc}") from exc
        if tile.id in seen:
            raise RuleFormatError(f"duplicate tile id {tile.id!r}")
        seen.add(tile.id)
        if tile.location not in COLORS or tile.color not in COLORS:
            raise RuleFormatError(f"{tile.id}: location/color must be white or black")
        tiles.append(tile)
    anchors_raw = doc.get("vertex_anchors", [])
    anchors = []
    for entry in anchors_raw:
        try:
            tid, pos = entry
        except (TypeError, ValueError) as exc:
            raise RuleFormatError(f"malformed vertex anchor {entry!r}") from exc
        anchors.append((str(tid), int(pos)))
    return SubdivisionRule(
        m=m,
        degree=degree,
        tiles=tiles,
        vertex_anchors=anchors,
        name=str(doc.get("name", "")),
        base_geometry=doc.get("base_geometry"),
        assumptions=[str(a) for a in doc.get("assumptions", [])],
    )


# ---------------------------------------------------------------------------
# validation


@dataclass
class ValidationReport:
    violations: list[str]
    n_tiles: int = 0
    n_curve_edges: int = 0
    n_vertex_classes: int = 0
    ramification_sum: int = 0

    @property
    def ok(self) -> bool:
        return not self.violations


def _corner_classes(rule: SubdivisionRule) -> list[list[tuple[int, int]]]:
    """Partition corners (tile_index, image_vertex) into 1-vertex classes.

    Two corners are identified when they are joined through a shared side;
    the class is the full rotation (flower) around the 1-vertex.
    """
    idx = rule.index
    m = idx.m
    seen = [[False] * m for _ in range(idx.n_tiles)]
    classes = []
    for t0 in range(idx.n_tiles):
        for v0 in range(m):
            if seen[t0][v0]:
                continue
            orbit = []
            t, v = t0, v0
            # alternate crossing the two sides at the corner: image edges v, v-1
            cross_prev = False
            while not seen[t][v]:
                seen[t][v] = True
                orbit.append((t, v))
                e = (v - 1) % m if cross_prev else v
                t = idx.neighbor_by_image[t][e]
                cross_prev = not cross_prev
            classes.append(orbit)
    return classes


def validate_rule(rule: SubdivisionRule) -> ValidationReport:
    """Check structural consistency; returns a report, never raises."""
    v: list[str] = []
    m, d = rule.m, rule.degree
    if m < 3:
        v.append(f"m must be >= 3, got {m}")
    if d < 2:
        v.append(f"degree must be >= 2, got {d}")
    try:
        idx = rule.index
    except RuleFormatError as exc:
        return ValidationReport([str(exc)])
    if v:
        return ValidationReport(v, n_tiles=idx.n_tiles)

    if idx.n_tiles != 2 * d:
        v.append(f"expected {2 * d} tiles for degree {d}, found {idx.n_tiles}")
    for c, cname in enumerate(COLORS):
        n = sum(1 for x in idx.col if x == c)
        if n != d:
            v.append(f"expected {d} {cname}-color tiles, found {n}")
    for c, cname in enumerate(COLORS):
        if not any(x == c for x in idx.loc):
            v.append(f"no tiles located in the {cname} face")

    for ti, t in enumerate(rule.tiles):
        if len(t.sides) != m or len(t.corners) != m:
            v.append(f"{t.id}: needs exactly {m} sides and corners")
            continue
        if sorted(t.corners) != list(range(m)):
            v.append(f"{t.id}: corners must enumerate all {m} image vertices")
            continue
        step = 1 if t.color == WHITE else -1
        for j in range(m):
            if (t.corners[(j + 1) % m] - t.corners[j]) % m != step % m:
                v.append(
                    f"{t.id}: corner cycle must be "
                    f"{'ascending' if step == 1 else 'descending'} for {t.color} color"
                )
                break
        img_edges = sorted(s.image_edge for s in t.sides)
        if img_edges != list(range(m)):
            v.append(f"{t.id}: side images must hit every 0-edge exactly once")
            continue
        for j, s in enumerate(t.sides):
            a, b = t.corners[j], t.corners[(j + 1) % m]
            e = s.image_edge
            if {a, b} != {e, (e + 1) % m}:
                v.append(
                    f"{t.id} side {j}: image edge {e} does not join "
                    f"its endpoint images {a},{b}"
                )

    if v:
        return ValidationReport(v, n_tiles=idx.n_tiles)

    # gluing: involution, matching images, checkerboard colors, curve marks
    n_curve = 0
    for ti, t in enumerate(rule.tiles):
        for j, s in enumerate(t.sides):
            if s.neighbor_tile not in idx.tile_pos:
                v.append(f"{t.id} side {j}: unknown neighbor {s.neighbor_tile!r}")
                continue
            other = rule.tiles[idx.tile_pos[s.neighbor_tile]]
            if not 0 <= s.neighbor_side < m:
                v.append(f"{t.id} side {j}: neighbor side index out of range")
                continue
            back = other.sides[s.neighbor_side]
            if back.neighbor_tile != t.id or back.neighbor_side != j:
                v.append(f"{t.id} side {j}: gluing is not an involution")
            if back.image_edge != s.image_edge:
                v.append(f"{t.id} side {j}: image edges disagree across the gluing")
            if other.color == t.color:
                v.append(
                    f"{t.id} side {j}: adjacent tiles must have opposite colors"
                )
            on_curve = t.location != other.location
            if on_curve != (s.sub_edge_of is not None):
                v.append(
                    f"{t.id} side {j}: sub_edge_of must be present exactly "
                    "when the side lies on the invariant curve"
                )
            if s.sub_edge_of is not None:
                n_curve += 1
                if not 0 <= s.sub_edge_of < m:
                    v.append(f"{t.id} side {j}: sub_edge_of out of range")
                elif back.sub_edge_of != s.sub_edge_of:
                    v.append(f"{t.id} side {j}: sub_edge_of differs across the curve")
    n_curve //= 2

    if v:
        return ValidationReport(v, n_tiles=idx.n_tiles, n_curve_edges=n_curve)

    # flower closure around every 1-vertex, curve/vertex incidence, branching
    classes = _corner_classes(rule)
    rh = 0
    anchor_class: dict[int, int] = {}
    class_of_corner = {}
    for ci, orbit in enumerate(classes):
        for tc in orbit:
            class_of_corner[tc] = ci
    for ci, orbit in enumerate(classes):
        if len(orbit) % 2:
            v.append(f"flower at {rule.tiles[orbit[0][0]].id} does not close evenly")
            continue
        deg = len(orbit) // 2
        rh += deg - 1
        curve_sides = []
        for t, vv in orbit:
            for e in (vv, (vv - 1) % m):
                if idx.on_curve_by_image[t][e]:
                    curve_sides.append(idx.sub_edge_by_image[t][e])
        # each on-curve side is seen from both tiles bounding it
        if len(curve_sides) not in (0, 4):
            v.append(
                f"vertex at {rule.tiles[orbit[0][0]].id} corner {orbit[0][1]}: "
                "a 1-vertex must lie on 0 or 2 curve edges"
            )
    sphere_rh = 2 * d - 2
    if rh != sphere_rh:
        v.append(f"ramification sum {rh} != {sphere_rh} (not a sphere cover)")

    # anchors: m of them, distinct classes, each an endpoint of 0-edges v-1, v
    if len(rule.vertex_anchors) != m:
        v.append(f"expected {m} vertex anchors, found {len(rule.vertex_anchors)}")
    else:
        for vi, (tid, pos) in enumerate(rule.vertex_anchors):
            if tid not in idx.tile_pos or not 0 <= pos < m:
                v.append(f"vertex anchor {vi}: bad reference ({tid}, {pos})")
                continue
            ti = idx.tile_pos[tid]
            img = rule.tiles[ti].corners[pos]
            ci = class_of_corner[(ti, img)]
            if ci in anchor_class:
                v.append(f"vertex anchors {anchor_class[ci]} and {vi} coincide")
            anchor_class[ci] = vi
            subs = set()
            for t, vv in classes[ci]:
                for e in (vv, (vv - 1) % m):
                    if idx.on_curve_by_image[t][e]:
                        subs.add(idx.sub_edge_by_image[t][e])
            if subs != {(vi - 1) % m, vi}:
                v.append(
                    f"vertex anchor {vi}: incident curve edges lie in 0-edges "
                    f"{sorted(subs)}, expected [{(vi - 1) % m}, {vi}]"
                )
        # every non-anchor on-curve vertex is interior to a single 0-edge
        for ci, orbit in enumerate(classes):
            if ci in anchor_class:
                continue
            subs = set()
            for t, vv in orbit:
                for e in (vv, (vv - 1) % m):
                    if idx.on_curve_by_image[t][e]:
                        subs.add(idx.sub_edge_by_image[t][e])
            if len(subs) > 1:
                v.append(
                    f"vertex at {rule.tiles[orbit[0][0]].id} corner {orbit[0][1]}: "
                    f"interior curve vertex meets several 0-edges {sorted(subs)}"
                )

    # every 0-edge is subdivided by at least one curve edge
    per_edge = [0] * m
    for t in rule.tiles:
        for s in t.sides:
            if s.sub_edge_of is not None and 0 <= s.sub_edge_of < m:
                per_edge[s.sub_edge_of] += 1
    for e, cnt in enumerate(per_edge):
        if cnt == 0:
            v.append(f"0-edge {e} contains no curve 1-edges")

    return ValidationReport(
        v,
        n_tiles=idx.n_tiles,
        n_curve_edges=n_curve,
        n_vertex_classes=len(classes),
        ramification_sum=rh,
    )


# ---------------------------------------------------------------------------
# builtin families
#
# Generators describe tiles geometrically: a positively oriented corner cycle
# of (corner_key, image_vertex) plus per-side segment keys.  Gluing, colors,
# image edges and the final schema arrays are derived uniformly.


@dataclass
class _TileSpec:
    id: str
    location: str
    cycle: list[tuple[Any, int]]  # (corner_key, image 0-vertex)
    side_keys: list[Any]  # side j joins cycle[j] -> cycle[j+1]
    side_subs: list[int | None]


def _assemble(
    name: str,
    m: int,
    degree: int,
    specs: Sequence[_TileSpec],
    anchors: Sequence[tuple[str, Any]],
    base_geometry: dict[str, Any] | None = None,
    assumptions: Iterable[str] = (),
) -> SubdivisionRule:
    seg_map: dict[Any, list[tuple[int, int]]] = {}
    for ti, sp in enumerate(specs):
        for j, key in enumerate(sp.side_keys):
            seg_map.setdefault(key, []).append((ti, j))
    for key, occ in seg_map.items():
        if len(occ) != 2:
            raise AssertionError(f"segment {key!r} bounds {len(occ)} tiles")

    tiles: list[Tile] = []
    for ti, sp in enumerate(specs):
        imgs = [img for _, img in sp.cycle]
        step = (imgs[1] - imgs[0]) % m
        assert step in (1, m - 1), f"{sp.id}: corner images not monotone"
        color = WHITE if step == 1 else BLACK
        sides = []
        for j in range(m):
            a, b = imgs[j], imgs[(j + 1) % m]
            assert (b - a) % m == step, f"{sp.id}: corner cycle not monotone"
            edge = a if step == 1 else b
            occ = seg_map[sp.side_keys[j]]
            (oti, oj) = occ[0] if occ[0] != (ti, j) else occ[1]
            sides.append(
                Side(
                    image_edge=edge,
                    neighbor_tile=specs[oti].id,
                    neighbor_side=oj,
                    sub_edge_of=sp.side_subs[j],
                )
            )
        tiles.append(
            Tile(
                id=sp.id,
                location=sp.location,
                color=color,
                sides=tuple(sides),
                corners=tuple(imgs),
            )
        )

    anchor_list = []
    by_id = {sp.id: sp for sp in specs}
    for tid, corner_key in anchors:
        sp = by_id[tid]
        pos = next(j for j, (key, _) in enumerate(sp.cycle) if key == corner_key)
        anchor_list.append((tid, pos))
    return SubdivisionRule(
        m=m,
        degree=degree,
        tiles=tiles,
        vertex_anchors=anchor_list,
        name=name,
        base_geometry=base_geometry,
        assumptions=list(assumptions),
    )


def _lattes_specs(k: int) -> tuple[list[_TileSpec], list[tuple[str, Any]]]:
    """Degree-k^2 flat family: each face cut into a k x k grid of squares.

    The map is multiplication by k in the fold plane; both faces share chart
    coordinates [0,k]^2 along their common boundary.
    """

    def fold(a: int) -> int:
        x = (k * a) % (2 * k)
        return x if x <= k else 2 * k - x

    def img_vertex(p: tuple[int, int]) -> int:
        xi = fold(p[0]) // k
        yi = fold(p[1]) // k
        return [[0, 3], [1, 2]][xi][yi]

    def ckey(face: int, p: tuple[int, int]) -> Any:
        if p[0] in (0, k) or p[1] in (0, k):
            return ("C", p)
        return (face, p)

    def tid(face: int, i: int, j: int) -> str:
        return f"{'wb'[face]}{i}{j}" if k <= 9 else f"{'wb'[face]}{i}_{j}"

    specs = []
    for face in (0, 1):
        for i, j in product(range(k), range(k)):
            pts = [(i, j), (i + 1, j), (i + 1, j + 1), (i, j + 1)]
            if face == 1:
                pts = [pts[0], pts[3], pts[2], pts[1]]
            keys, subs = [], []
            for a in range(4):
                p, q = pts[a], pts[(a + 1) % 4]
                sub: int | None = None
                if p[0] == q[0] and p[0] in (0, k):
                    sub = 3 if p[0] == 0 else 1
                elif p[1] == q[1] and p[1] in (0, k):
                    sub = 0 if p[1] == 0 else 2
                if sub is None:
                    keys.append((face, frozenset((p, q))))
                else:
                    keys.append(("C", frozenset((p, q))))
                subs.append(sub)
            specs.append(
                _TileSpec(
                    id=tid(face, i, j),
                    location=COLORS[face],
                    cycle=[(ckey(face, p), img_vertex(p)) for p in pts],
                    side_keys=keys,
                    side_subs=subs,
                )
            )
    anchors = [
        (tid(0, 0, 0), ("C", (0, 0))),
        (tid(0, k - 1, 0), ("C", (k, 0))),
        (tid(0, k - 1, k - 1), ("C", (k, k))),
        (tid(0, 0, k - 1), ("C", (0, k))),
    ]
    return specs, anchors


def _lattes_rule(k: int) -> SubdivisionRule:
    specs, anchors = _lattes_specs(k)
    return _assemble(
        name=f"lattes-{k}x{k}",
        m=4,
        degree=k * k,
        specs=specs,
        anchors=anchors,
        base_geometry={"kind": "square", "k": k},
    )


def _triangle_rule() -> SubdivisionRule:
    """Degree-4 barycentric-style family on the 3-gon pillow.

    Each triangular face splits into three corner triangles and a middle
    triangle; corner triangles map to the same face, middles to the other.
    """
    v0, v1, v2 = (0, 0), (4, 0), (2, 4)
    m0, m1, m2 = (2, 0), (3, 2), (1, 2)
    img = {v0: 0, v1: 2, v2: 1, m0: 1, m1: 0, m2: 2}
    boundary = {
        frozenset((v0, m0)): 0,
        frozenset((m0, v1)): 0,
        frozenset((v1, m1)): 1,
        frozenset((m1, v2)): 1,
        frozenset((v2, m2)): 2,
        frozenset((m2, v0)): 2,
    }
    face_tiles = [
        ("c0", [v0, m0, m2]),
        ("c1", [m0, v1, m1]),
        ("c2", [m2, m1, v2]),
        ("mid", [m0, m1, m2]),
    ]
    specs = []
    for face in (0, 1):
        for tag, pts in face_tiles:
            cyc = pts if face == 0 else [pts[0], pts[2], pts[1]]
            keys, subs = [], []
            for a in range(3):
                seg = frozenset((cyc[a], cyc[(a + 1) % 3]))
                sub = boundary.get(seg)
                keys.append(("C", seg) if sub is not None else (face, seg))
                subs.append(sub)
            specs.append(
                _TileSpec(
                    id=f"{'wb'[face]}-{tag}",
                    location=COLORS[face],
                    cycle=[(p, img[p]) for p in cyc],
                    side_keys=keys,
                    side_subs=subs,
                )
            )
    anchors = [("w-c0", v0), ("w-c1", v1), ("w-c2", v2)]
    return _assemble(
        name="triangle-2x2",
        m=3,
        degree=4,
        specs=specs,
        anchors=anchors,
        base_geometry={"kind": "triangle"},
    )


def _insert_accordion(
    specs: list[_TileSpec], seg_key: Any, flaps: int, tag: str
) -> None:
    """Insert ``flaps`` nested two-tile pockets into the curve edge ``seg_key``.

    The pocket stack sits on the side of the first (white-located) bounding
    tile; the curve is rerouted through the outermost interface, so both
    endpoints of the original edge gain one to their local degree per pocket.
    """
    occ = [
        (ti, j)
        for ti, sp in enumerate(specs)
        for j, key in enumerate(sp.side_keys)
        if key == seg_key
    ]
    assert len(occ) == 2
    occ.sort(key=lambda o: specs[o[0]].location != WHITE)
    (ai, aj), _ = occ
    a_sp = specs[ai]
    mm = len(a_sp.cycle)
    u_key, u_img = a_sp.cycle[aj]
    w_key, w_img = a_sp.cycle[(aj + 1) % mm]
    sub = a_sp.side_subs[aj]
    assert sub is not None, "accordion slit must be a curve edge"
    step = (u_img - w_img) % mm  # X tiles traverse w -> u
    assert step in (1, mm - 1)

    def lip(i: int) -> Any:
        return ("flap-lip", tag, i)

    # tile A now borders the innermost pocket
    a_sp.side_keys[aj] = lip(0)
    a_sp.side_subs[aj] = None

    for i in range(flaps):
        a_key = ("flap", tag, i, 0)
        b_key = ("flap", tag, i, 1)
        x_imgs = [(w_img + s * step) % mm for s in range(mm)]
        y_imgs = [(u_img - s * step) % mm for s in range(mm)]
        x_cycle = [(w_key, x_imgs[0]), (u_key, x_imgs[1])] + [
            ((a_key, b_key)[s - 2], x_imgs[s]) for s in range(2, mm)
        ]
        y_cycle = [(u_key, y_imgs[0]), (w_key, y_imgs[1])] + [
            ((b_key, a_key)[s - 2], y_imgs[s]) for s in range(2, mm)
        ]
        shared = [frozenset((x_cycle[s][0], x_cycle[(s + 1) % mm][0])) for s in range(1, mm)]
        x_keys = [lip(i)] + [("flap-seam", tag, i, s) for s in range(mm - 1)]
        # Y traverses the shared seams in reverse order
        y_keys = [lip(i + 1) if i + 1 < flaps else seg_key] + [
            ("flap-seam", tag, i, mm - 2 - s) for s in range(mm - 1)
        ]
        del shared
        outermost = i + 1 == flaps
        specs.append(
            _TileSpec(
                id=f"f{tag}x{i}",
                location=a_sp.location,
                cycle=x_cycle,
                side_keys=x_keys,
                side_subs=[None] * mm,
            )
        )
        specs.append(
            _TileSpec(
                id=f"f{tag}y{i}",
                location=a_sp.location,
                cycle=y_cycle,
                side_keys=y_keys,
                side_subs=[sub if outermost else None] + [None] * (mm - 1),
            )
        )


def _flap_rule(k: int, flaps: int) -> SubdivisionRule:
    """lattes-kxk with pocket stacks making the corner p = v0 critical.

    ``flaps`` pockets at the curve edge leaving p give deg_f(p) = 1 + flaps;
    a matching stack at the opposite corner keeps the advertised degree
    d = k^2 + 2*flaps.
    """
    specs, anchors = _lattes_specs(k)

    def find_side(tid: str, seg: frozenset) -> Any:
        sp = next(s for s in specs if s.id == tid)
        for key in sp.side_keys:
            if key == ("C", seg):
                return key
        raise AssertionError(f"no curve side {seg} on {tid}")

    w00 = specs[0].id
    wkk = f"w{k - 1}{k - 1}" if k <= 9 else f"w{k - 1}_{k - 1}"
    _insert_accordion(specs, find_side(w00, frozenset(((0, 0), (0, 1)))), flaps, "p")
    _insert_accordion(
        specs, find_side(wkk, frozenset(((k, k - 1), (k, k)))), flaps, "q"
    )
    return _assemble(
        name=f"flap-{k}-{flaps}",
        m=4,
        degree=k * k + 2 * flaps,
        specs=specs,
        anchors=anchors,
        base_geometry=None,
        assumptions=[
            "expansion is assumed for the flap family; only combinatorial "
            "consistency is certified by validation"
        ],
    )


def builtin_rule(name: str) -> SubdivisionRule:
    """Return a builtin family member: lattes-kxk, triangle-2x2, flap-k-F."""
    parts = name.split("-")
    if parts[0] == "lattes" and len(parts) == 2:
        grid = parts[1].split("x")
        if len(grid) == 2 and grid[0] == grid[1] and grid[0].isdigit():
            k = int(grid[0])
            if k >= 2:
                return _lattes_rule(k)
    if name == "triangle-2x2":
        return _triangle_rule()
    if parts[0] == "flap" and len(parts) == 3:
        if parts[1].isdigit() and parts[2].isdigit():
            k, flaps = int(parts[1]), int(parts[2])
            if k >= 2 and flaps >= 1:
                return _flap_rule(k, flaps)
    raise ValueError(f"unknown builtin rule {name!r}")
