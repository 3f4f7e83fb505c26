"""Cells of the iterated subdivision: n-tiles, n-edges, n-vertices, pairs.

An n-tile is an admissible word ``t_0 ... t_{n-1}`` of 1-tile indices with
``location(t_{i+1}) = color(t_i)``; it names the intersection
``t_0 ∩ f^{-1}(t_1) ∩ ... ∩ f^{-(n-1)}(t_{n-1})``.  The word's location is
the location of its first letter, its color the color of its last.

Sides and corners of an n-tile inherit the image indexing of level 1: side
``e`` is the one mapped onto the 0-edge ``e`` by f^n, corner ``v`` the one
mapped onto the 0-vertex ``v``.  The neighbor across a side keeps the same
image index, which is what makes the recursion below work uniformly in n.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator, Sequence

from tilepress.rule import SubdivisionRule

Word = tuple[int, ...]


@dataclass(frozen=True)
class TileWord:
    """Public handle on an n-tile: the letters as tile ids."""

    letters: tuple[str, ...]

    def __str__(self) -> str:
        return ".".join(self.letters)


def word_ids(rule: SubdivisionRule, word: Word) -> TileWord:
    ids = rule.index.ids
    return TileWord(tuple(ids[t] for t in word))


def word_from_ids(rule: SubdivisionRule, tw: TileWord | Sequence[str]) -> Word:
    letters = tw.letters if isinstance(tw, TileWord) else tuple(tw)
    pos = rule.index.tile_pos
    try:
        word = tuple(pos[x] for x in letters)
    except KeyError as exc:
        raise ValueError(f"unknown tile id {exc.args[0]!r}") from exc
    if not is_admissible(rule, word):
        raise ValueError(f"word {'.'.join(letters)} is not admissible")
    return word


def is_admissible(rule: SubdivisionRule, word: Word) -> bool:
    idx = rule.index
    if not word:
        return False
    return all(idx.loc[word[i + 1]] == idx.col[word[i]] for i in range(len(word) - 1))


def word_location(rule: SubdivisionRule, word: Word) -> int:
    return rule.index.loc[word[0]]


def word_color(rule: SubdivisionRule, word: Word) -> int:
    return rule.index.col[word[-1]]


def enumerate_tiles(rule: SubdivisionRule, n: int) -> Iterator[Word]:
    """All n-tiles, as admissible words, in lexicographic letter order."""
    if n < 1:
        raise ValueError("n must be >= 1")
    idx = rule.index
    stack: list[Word] = [(t,) for t in reversed(range(idx.n_tiles))]
    while stack:
        w = stack.pop()
        if len(w) == n:
            yield w
        else:
            for t in reversed(idx.successors[idx.col[w[-1]]]):
                stack.append(w + (t,))


def tile_count(rule: SubdivisionRule, n: int) -> int:
    """Exact number of n-tiles (= total of 1^T A^{n-1} for the tile matrix)."""
    if n < 1:
        raise ValueError("n must be >= 1")
    idx = rule.index
    # cnt[c] = number of length-r admissible words whose last letter has color c
    cnt = [0, 0]
    for t in range(idx.n_tiles):
        cnt[idx.col[t]] += 1
    for _ in range(n - 1):
        nxt = [0, 0]
        for t in range(idx.n_tiles):
            nxt[idx.col[t]] += cnt[idx.loc[t]]
        cnt = nxt
    return cnt[0] + cnt[1]


def neighbor(rule: SubdivisionRule, word: Word, e: int) -> Word:
    """The n-tile sharing the side of ``word`` whose f^n-image is 0-edge ``e``.

    Working back from the last letter: B[i] is the 0-edge containing the
    shared side of the suffix word[i:], or None once the side has fallen
    into a tile interior, in which case all earlier letters are kept.
    """
    idx = rule.index
    n = len(word)
    B: list[int | None] = [None] * n
    B[n - 1] = idx.sub_edge_by_image[word[n - 1]][e]
    for i in range(n - 2, -1, -1):
        prev = B[i + 1]
        B[i] = None if prev is None else idx.sub_edge_by_image[word[i]][prev]
    out = [0] * n
    out[n - 1] = idx.neighbor_by_image[word[n - 1]][e]
    for i in range(n - 1):
        b = B[i + 1]
        out[i] = word[i] if b is None else idx.neighbor_by_image[word[i]][b]
    return tuple(out)


def containing_zero_edge(rule: SubdivisionRule, word: Word, e: int) -> int | None:
    """0-edge containing side ``e`` of the n-tile, or None when off the curve."""
    idx = rule.index
    b: int | None = idx.sub_edge_by_image[word[-1]][e]
    for t in reversed(word[:-1]):
        if b is None:
            return None
        b = idx.sub_edge_by_image[t][b]
    return b


def side_on_curve(rule: SubdivisionRule, word: Word, e: int) -> bool:
    return containing_zero_edge(rule, word, e) is not None


def flower(rule: SubdivisionRule, word: Word, v: int) -> list[Word]:
    """Tiles around corner ``v`` of ``word``, in rotation order.

    The rotation alternately crosses the two sides incident to the corner
    (image edges ``v`` and ``v-1``); it closes after an even number of steps
    for any rule that passes validation.
    """
    m = rule.m
    out = [word]
    w, cross_prev = word, False
    while True:
        w = neighbor(rule, w, (v - 1) % m if cross_prev else v)
        cross_prev = not cross_prev
        if w == word and not cross_prev:
            return out
        out.append(w)


@dataclass(frozen=True)
class VertexRef:
    """An n-vertex, named by its lexicographically least incident corner."""

    word: TileWord
    image_vertex: int
    flower_size: int
    local_degree: int
    on_curve: bool


@dataclass(frozen=True)
class EdgeRef:
    """An n-edge, named by its lexicographically least incident side."""

    word: TileWord
    image_edge: int
    on_curve: bool


@dataclass
class Skeleton:
    n: int
    tiles: int
    edges: list[EdgeRef]
    vertices: list[VertexRef]


def skeleton(rule: SubdivisionRule, n: int) -> Skeleton:
    """Enumerate the n-edges and n-vertices by gluing classes."""
    idx = rule.index
    m = rule.m
    words = list(enumerate_tiles(rule, n))
    edges: list[EdgeRef] = []
    seen_sides: set[tuple[Word, int]] = set()
    for w in words:
        for e in range(m):
            if (w, e) in seen_sides:
                continue
            other = neighbor(rule, w, e)
            seen_sides.add((w, e))
            seen_sides.add((other, e))
            rep = min(w, other)
            edges.append(
                EdgeRef(
                    word=word_ids(rule, rep),
                    image_edge=e,
                    on_curve=side_on_curve(rule, w, e),
                )
            )
    vertices: list[VertexRef] = []
    seen_corners: set[tuple[Word, int]] = set()
    for w in words:
        for v in range(m):
            if (w, v) in seen_corners:
                continue
            fl = flower(rule, w, v)
            for fw in fl:
                seen_corners.add((fw, v))
            locs = {word_location(rule, fw) for fw in fl}
            vertices.append(
                VertexRef(
                    word=word_ids(rule, min(fl)),
                    image_vertex=v,
                    flower_size=len(fl),
                    local_degree=len(fl) // 2,
                    on_curve=len(locs) > 1,
                )
            )
    return Skeleton(n=n, tiles=len(words), edges=edges, vertices=vertices)


@dataclass
class InteriorReport:
    touches_curve: bool
    sides_on_curve: list[int]
    curve_corners: list[int]


def interior_test(rule: SubdivisionRule, word: Word) -> InteriorReport:
    """Does the n-tile meet the invariant curve, and along which sides?

    A tile touches the curve iff one of its sides lies on it or one of its
    corners is a curve vertex (detected from mixed locations in the flower).
    """
    m = rule.m
    sides = [e for e in range(m) if side_on_curve(rule, word, e)]
    corners = []
    for v in range(m):
        fl = flower(rule, word, v)
        if len({word_location(rule, fw) for fw in fl}) > 1:
            corners.append(v)
    return InteriorReport(
        touches_curve=bool(sides or corners),
        sides_on_curve=sides,
        curve_corners=corners,
    )


@dataclass(frozen=True)
class Pair:
    """Two n-tiles glued along an n-edge mapped onto the 0-edge 0 by f^n."""

    first: TileWord
    second: TileWord
    location: str
    on_curve_seam: bool


PAIR_EDGE = 0


def partner(rule: SubdivisionRule, word: Word) -> Word:
    """The unique n-tile paired with ``word`` across its image-0 side."""
    return neighbor(rule, word, PAIR_EDGE)


def enumerate_pairs(rule: SubdivisionRule, n: int) -> list[Pair]:
    out = []
    for w in enumerate_tiles(rule, n):
        p = partner(rule, w)
        if w <= p:
            seam = side_on_curve(rule, w, PAIR_EDGE)
            out.append(
                Pair(
                    first=word_ids(rule, w),
                    second=word_ids(rule, p),
                    location=rule.tiles[w[0]].location,
                    on_curve_seam=seam,
                )
            )
    return out


@dataclass
class InteriorPairReport:
    n: int | None
    pairs: dict[str, Pair] = field(default_factory=dict)

    @property
    def found(self) -> bool:
        return self.n is not None and len(self.pairs) == 2


def interior_pair_search(rule: SubdivisionRule, cap: int = 6) -> InteriorPairReport:
    """Smallest n with a curve-avoiding pair inside each face, if any.

    Used as the witness data for strong primitivity: a pair whose two tiles
    both avoid the curve stays in the open face containing it.
    """
    for n in range(1, cap + 1):
        found: dict[str, Pair] = {}
        for w in enumerate_tiles(rule, n):
            loc = rule.tiles[w[0]].location
            if loc in found:
                continue
            p = partner(rule, w)
            if interior_test(rule, w).touches_curve:
                continue
            if interior_test(rule, p).touches_curve:
                continue
            found[loc] = Pair(
                first=word_ids(rule, min(w, p)),
                second=word_ids(rule, max(w, p)),
                location=loc,
                on_curve_seam=False,
            )
            if len(found) == 2:
                return InteriorPairReport(n=n, pairs=found)
    return InteriorPairReport(n=None)


def tiles_at_zero_vertex(rule: SubdivisionRule, v: int) -> list[int]:
    """1-tiles having a corner at the position of the 0-vertex ``v``, in
    rotation order around it."""
    tid, pos = rule.vertex_anchors[v]
    t0 = rule.index.tile_pos[tid]
    img = rule.tiles[t0].corners[pos]
    return [w[0] for w in flower(rule, (t0,), img)]


def vertex_flower(rule: SubdivisionRule, tile_id: str, corner: int, n: int) -> list[Word]:
    """n-tiles meeting the level-1 vertex at corner ``corner`` of 1-tile
    ``tile_id``.

    A word contains the vertex as one of its corners exactly when its first
    letter touches the vertex and each deeper letter sits at the pushed-
    forward 0-vertex of the previous stage, so one witness word is built by
    walking the 0-vertex orbit and the flower of the full word is returned.
    """
    idx = rule.index
    t = idx.tile_pos[tile_id]
    u = rule.tiles[t].corners[corner]
    word = [t]
    for _ in range(n - 1):
        col = idx.col[word[-1]]
        cand = [a for a in tiles_at_zero_vertex(rule, u) if idx.loc[a] == col]
        word.append(min(cand))
        tid0, pos0 = rule.vertex_anchors[u]
        u = rule.tiles[idx.tile_pos[tid0]].corners[pos0]
    return flower(rule, tuple(word), u)
