"""Periodic tiles, iterated preimages, and critical-orbit analysis.

Exact point locations of periodic points are not combinatorially determined,
so everything here reports tile-level data: exact counts, and weighted-sum
brackets whose (1/n) log limits match the pressure.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from tilepress import cells, thermo
from tilepress.cells import Word
from tilepress.rule import SubdivisionRule
from tilepress.thermo import Potential, PressureEstimate


def max_local_degree(rule: SubdivisionRule) -> int:
    sk = cells.skeleton(rule, 1)
    return max(v.local_degree for v in sk.vertices)


# ---------------------------------------------------------------------------
# fixed tiles


@dataclass
class FixedTileSet:
    n: int
    count: int
    words: list[cells.TileWord] | None
    sum_bracket: tuple[float, float]
    midpoint_sum: float


def _fixed_count(rule: SubdivisionRule, n: int) -> int:
    a = rule.index.tile_matrix()
    cur = [[1, 0], [0, 1]]
    for _ in range(n):
        cur = [
            [
                cur[0][0] * a[0][0] + cur[0][1] * a[1][0],
                cur[0][0] * a[0][1] + cur[0][1] * a[1][1],
            ],
            [
                cur[1][0] * a[0][0] + cur[1][1] * a[1][0],
                cur[1][0] * a[0][1] + cur[1][1] * a[1][1],
            ],
        ]
    return cur[0][0] + cur[1][1]


def _tail_triple(rule, phi, state: Word) -> tuple[float, float, float]:
    if phi.level == 1:
        return 0.0, 0.0, 0.0
    lo, hi = thermo._tail_extremes(rule, phi, state[1:])
    return float(lo), float(hi), float(lo + hi) / 2


def _weighted_path_sums(
    rule: SubdivisionRule,
    phi: Potential,
    n: int,
    start_filter=None,
    end_filter=None,
    closed: bool = False,
) -> tuple[float, float, float]:
    """(sum e^lo, sum e^hi, sum e^mid) of Birkhoff brackets over n-words.

    ``closed`` restricts to words that can follow themselves (fixed tiles of
    f^n); the filters restrict the first/last letter.
    """
    ell = phi.level
    if n < ell:
        raise ValueError("n must be at least the potential level")
    idx = rule.index
    states, _, adj = thermo.word_chain(rule, ell)
    k = len(states)
    logw = np.array([phi(s) for s in states])
    tails = [_tail_triple(rule, phi, s) for s in states]
    # M[u0][ue] = sum over words with window path u0 -> ue of e^{exact sum}
    M = np.zeros((k, k))
    for u in range(k):
        M[u, u] = math.exp(logw[u])
    A = np.zeros((k, k))
    for u in range(k):
        for v in adj[u]:
            A[u, v] = math.exp(logw[v])
    for _ in range(n - ell):
        M = M @ A
    out = [0.0, 0.0, 0.0]
    for u0 in range(k):
        if start_filter is not None and not start_filter(states[u0]):
            continue
        loc0 = idx.loc[states[u0][0]]
        for ue in range(k):
            if M[u0, ue] == 0.0:
                continue
            if end_filter is not None and not end_filter(states[ue]):
                continue
            if closed and idx.col[states[ue][-1]] != loc0:
                continue
            for slot, t in enumerate(tails[ue]):
                out[slot] += M[u0, ue] * math.exp(t)
    return out[0], out[1], out[2]


def fixed_tiles(
    rule: SubdivisionRule,
    n: int,
    phi: Potential | None = None,
    enumerate_words: bool = False,
) -> FixedTileSet:
    """Tiles of level n that contain a fixed point of f^n.

    The sum bracket [L_n, U_n] encloses sum_p w_n(p) e^{S_n phi(p)} for any
    admissible weights w_n in [1, deg]: L_n divides the inf-sum by
    2 * m * maxdeg, U_n is the sup-sum.
    """
    phi = phi or thermo.zero_potential()
    count = _fixed_count(rule, n)
    lo, hi, mid = _weighted_path_sums(rule, phi, n, closed=True)
    denom = 2 * rule.m * max_local_degree(rule)
    words = None
    if enumerate_words:
        idx = rule.index
        words = [
            cells.word_ids(rule, w)
            for w in cells.enumerate_tiles(rule, n)
            if idx.col[w[-1]] == idx.loc[w[0]]
        ]
        assert len(words) == count
    return FixedTileSet(
        n=n,
        count=count,
        words=words,
        sum_bracket=(lo / denom, hi),
        midpoint_sum=mid,
    )


def periodic_pressure(
    rule: SubdivisionRule, phi: Potential, n: int
) -> PressureEstimate:
    """(1/n) log of the fixed-tile sum with per-tile bracket midpoints."""
    fx = fixed_tiles(rule, n, phi)
    lo, hi = fx.sum_bracket
    return PressureEstimate(
        method="periodic",
        value=math.log(fx.midpoint_sum) / n,
        bracket=(math.log(lo) / n, math.log(hi) / n),
        n=n,
    )


# ---------------------------------------------------------------------------
# preimages


@dataclass
class Preimage:
    word: cells.TileWord | None
    vertex_word: cells.TileWord | None
    image_vertex: int | None
    weight: int
    bracket: tuple[float, float]


@dataclass
class PreimageSet:
    n: int
    base: tuple[str, int]
    count: int
    total_weight: int
    preimages: list[Preimage] | None
    sum_bracket: tuple[float, float]
    midpoint_sum: float


def preimage_sums(
    rule: SubdivisionRule,
    n: int,
    base: tuple[str, int] = ("generic", 0),
    phi: Potential | None = None,
    enumerate_points: bool = False,
) -> PreimageSet:
    """Weighted Birkhoff sums over f^{-n} of a base point.

    ``base`` is ("generic", color) for a point in the open face of that
    color (one weight-1 preimage per n-tile of that color) or ("vertex", v)
    for the 0-vertex v (preimages are n-vertices, weighted by local degree).
    """
    phi = phi or thermo.zero_potential()
    kind, c = base
    idx = rule.index
    if kind == "generic":
        lo, hi, mid = _weighted_path_sums(
            rule, phi, n, end_filter=lambda s: idx.col[s[-1]] == c
        )
        cnt = [0, 0]
        for t in range(idx.n_tiles):
            cnt[idx.col[t]] += 1
        for _ in range(n - 1):
            nxt = [0, 0]
            for t in range(idx.n_tiles):
                nxt[idx.col[t]] += cnt[idx.loc[t]]
            cnt = nxt
        count = cnt[c]
        pts = None
        if enumerate_points:
            pts = []
            for w in cells.enumerate_tiles(rule, n):
                if idx.col[w[-1]] != c:
                    continue
                b = thermo.birkhoff_bracket(rule, phi, w)
                pts.append(
                    Preimage(
                        word=cells.word_ids(rule, w),
                        vertex_word=None,
                        image_vertex=None,
                        weight=1,
                        bracket=(float(b[0]), float(b[1])),
                    )
                )
        return PreimageSet(
            n=n,
            base=base,
            count=count,
            total_weight=count,
            preimages=pts,
            sum_bracket=(lo, hi),
            midpoint_sum=mid,
        )
    if kind != "vertex":
        raise ValueError(f"unknown base kind {kind!r}")
    # preimages of the 0-vertex c are the n-vertex classes with image c
    seen: set[Word] = set()
    pts = []
    s_lo = s_hi = s_mid = 0.0
    total = 0
    for w in cells.enumerate_tiles(rule, n):
        if w in seen:
            continue
        fl = cells.flower(rule, w, c)
        for fw in fl:
            seen.add(fw)
        deg = len(fl) // 2
        total += deg
        br_lo = min(float(thermo.birkhoff_bracket(rule, phi, fw)[0]) for fw in fl)
        br_hi = max(float(thermo.birkhoff_bracket(rule, phi, fw)[1]) for fw in fl)
        s_lo += deg * math.exp(br_lo)
        s_hi += deg * math.exp(br_hi)
        s_mid += deg * math.exp((br_lo + br_hi) / 2)
        if enumerate_points:
            pts.append(
                Preimage(
                    word=None,
                    vertex_word=cells.word_ids(rule, min(fl)),
                    image_vertex=c,
                    weight=deg,
                    bracket=(br_lo, br_hi),
                )
            )
    return PreimageSet(
        n=n,
        base=base,
        count=len(pts) if enumerate_points else total,
        total_weight=total,
        preimages=pts if enumerate_points else None,
        sum_bracket=(s_lo, s_hi),
        midpoint_sum=s_mid,
    )


def preimage_pressure(
    rule: SubdivisionRule,
    phi: Potential,
    n: int,
    base: tuple[str, int] = ("generic", 0),
) -> PressureEstimate:
    ps = preimage_sums(rule, n, base, phi)
    lo, hi = ps.sum_bracket
    return PressureEstimate(
        method="preimage",
        value=math.log(ps.midpoint_sum) / n,
        bracket=(math.log(lo) / n, math.log(hi) / n),
        n=n,
    )


# ---------------------------------------------------------------------------
# critical orbits


@dataclass
class CriticalVertex:
    rep_tile: str
    image_vertex: int
    local_degree: int
    on_curve: bool
    zero_vertex: int | None
    orbit: list[int]
    periodic: bool


@dataclass
class CriticalOrbitReport:
    vertices: list[CriticalVertex]
    vertex_map: list[int]  # image 0-vertex of each 0-vertex
    has_periodic_critical_point: bool
    periodic_critical_vertex: int | None = None
    periodic_critical_degree: int | None = None


def critical_orbits(rule: SubdivisionRule) -> CriticalOrbitReport:
    """Local degrees of all 1-vertices and the forward orbits of the
    critical ones through the 0-vertex dynamics."""
    idx = rule.index
    m = rule.m
    sigma = []
    anchor_reps: list[tuple[int, int]] = []
    for v, (tid, pos) in enumerate(rule.vertex_anchors):
        ti = idx.tile_pos[tid]
        img = rule.tiles[ti].corners[pos]
        sigma.append(img)
        anchor_reps.append((ti, img))

    sk = cells.skeleton(rule, 1)
    # map anchor classes: the 0-vertex v sits in the vertex class whose
    # flower contains (anchor tile, corner with the anchor's image index)
    vertices: list[CriticalVertex] = []
    has_periodic = False
    per_vertex = None
    per_deg = None
    anchor_class: dict[tuple[Word, int], int] = {}
    for v, (ti, img) in enumerate(anchor_reps):
        fl = cells.flower(rule, (ti,), img)
        anchor_class[(min(fl), img)] = v
    for vr in sk.vertices:
        if vr.local_degree < 2:
            continue
        rep_word = cells.word_from_ids(rule, vr.word)
        zero_v = anchor_class.get((rep_word, vr.image_vertex))
        orbit = [vr.image_vertex]
        seen = {orbit[-1]}
        while True:
            nxt = sigma[orbit[-1]]
            if nxt in seen:
                orbit.append(nxt)
                break
            orbit.append(nxt)
            seen.add(nxt)
        periodic = zero_v is not None and _is_sigma_periodic(sigma, zero_v)
        if periodic and not has_periodic:
            has_periodic = True
            per_vertex = zero_v
            per_deg = vr.local_degree
        vertices.append(
            CriticalVertex(
                rep_tile=vr.word.letters[0],
                image_vertex=vr.image_vertex,
                local_degree=vr.local_degree,
                on_curve=vr.on_curve,
                zero_vertex=zero_v,
                orbit=orbit,
                periodic=periodic,
            )
        )
    return CriticalOrbitReport(
        vertices=vertices,
        vertex_map=sigma,
        has_periodic_critical_point=has_periodic,
        periodic_critical_vertex=per_vertex,
        periodic_critical_degree=per_deg,
    )


def _is_sigma_periodic(sigma: list[int], v: int) -> bool:
    cur = sigma[v]
    for _ in range(len(sigma) + 1):
        if cur == v:
            return True
        cur = sigma[cur]
    return False
