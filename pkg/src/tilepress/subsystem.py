"""Subsystems: subshifts spanned by a set of level-L words.

A subsystem of the L-th iterate is given by an alphabet of admissible
L-words; its n-tiles are admissible n-symbol sequences over that alphabet
(equivalently (n*L)-tiles of the original map all of whose length-L blocks
lie in the alphabet).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Iterator, Sequence

from tilepress import cells
from tilepress.cells import Word
from tilepress.measures import (
    MarkovMeasure,
    ReducibleChainError,
    equilibrium_markov,
    strongly_connected_components,
)
from tilepress.rule import COLORS, SubdivisionRule


@dataclass
class Subsystem:
    rule: SubdivisionRule
    level: int
    alphabet: list[Word]
    name: str = ""

    locations: list[int] = field(init=False)
    colors: list[int] = field(init=False)

    def __post_init__(self) -> None:
        if not self.alphabet:
            raise ValueError("subsystem alphabet is empty")
        seen = set()
        for w in self.alphabet:
            if len(w) != self.level:
                raise ValueError("alphabet words must all have the subsystem level")
            if not cells.is_admissible(self.rule, w):
                raise ValueError(f"inadmissible alphabet word {w}")
            if w in seen:
                raise ValueError(f"duplicate alphabet word {w}")
            seen.add(w)
        self.locations = [cells.word_location(self.rule, w) for w in self.alphabet]
        self.colors = [cells.word_color(self.rule, w) for w in self.alphabet]

    def successors(self, i: int) -> list[int]:
        c = self.colors[i]
        return [j for j in range(len(self.alphabet)) if self.locations[j] == c]

    def concat(self, symbols: Sequence[int]) -> Word:
        out: list[int] = []
        for s in symbols:
            out.extend(self.alphabet[s])
        return tuple(out)


def make_subsystem(
    rule: SubdivisionRule,
    level: int = 1,
    exclude_tiles: Sequence[str] = (),
    words: Sequence[Word] | None = None,
    predicate: Callable[[Word], bool] | None = None,
    name: str = "",
) -> Subsystem:
    """Build a subsystem from explicit words or by filtering all L-words."""
    if words is not None:
        alphabet = [tuple(w) for w in words]
    else:
        banned = {rule.index.tile_pos[t] for t in exclude_tiles}
        alphabet = [
            w
            for w in cells.enumerate_tiles(rule, level)
            if not (banned and any(t in banned for t in w))
            and (predicate is None or predicate(w))
        ]
    return Subsystem(rule=rule, level=level, alphabet=alphabet, name=name)


@dataclass
class TileMatrix:
    """2x2 count matrix of alphabet words by [location][color]."""

    counts: list[list[int]]

    @property
    def spectral_radius(self) -> float:
        (a, b), (c, d) = self.counts
        return ((a + d) + math.sqrt((a - d) ** 2 + 4 * b * c)) / 2


def tile_matrix(sub: Subsystem) -> TileMatrix:
    counts = [[0, 0], [0, 0]]
    for loc, col in zip(sub.locations, sub.colors):
        counts[loc][col] += 1
    return TileMatrix(counts)


def subsystem_entropy(sub: Subsystem) -> float:
    """Topological entropy of the subsystem (per symbol): log of the
    spectral radius of its 2x2 tile matrix."""
    rho = tile_matrix(sub).spectral_radius
    if rho <= 0:
        return float("-inf")
    return math.log(rho)


def subsystem_tiles(sub: Subsystem, n: int) -> int:
    """Exact number of n-tiles of the subsystem (n-symbol sequences)."""
    if n < 1:
        raise ValueError("n must be >= 1")
    cnt = [0, 0]
    for col in sub.colors:
        cnt[col] += 1
    for _ in range(n - 1):
        nxt = [0, 0]
        for loc, col in zip(sub.locations, sub.colors):
            nxt[col] += cnt[loc]
        cnt = nxt
    return cnt[0] + cnt[1]


def enumerate_subsystem_words(sub: Subsystem, n: int) -> Iterator[tuple[int, ...]]:
    stack: list[tuple[int, ...]] = [(i,) for i in reversed(range(len(sub.alphabet)))]
    while stack:
        w = stack.pop()
        if len(w) == n:
            yield w
        else:
            for j in reversed(sub.successors(w[-1])):
                stack.append(w + (j,))


@dataclass
class LimitSetCover:
    """Cover of the subsystem's limit set by its level-n tiles."""

    n: int
    count: int
    words: list[cells.TileWord]


def limit_set_cover(sub: Subsystem, n: int) -> LimitSetCover:
    words = [
        cells.word_ids(sub.rule, sub.concat(sym))
        for sym in enumerate_subsystem_words(sub, n)
    ]
    return LimitSetCover(n=n, count=len(words), words=words)


@dataclass
class PrimitivityCertificate:
    kind: str  # "stronglyPrimitive" | "primitive" | "neither-up-to-cap"
    cap: int
    witness_n: int | None = None
    witnesses: dict[tuple[str, str], cells.TileWord] = field(default_factory=dict)


def _matrix_power_positive(sub: Subsystem, n: int) -> bool:
    (a, b), (c, d) = tile_matrix(sub).counts
    cur = [[a, b], [c, d]]
    for _ in range(n - 1):
        cur = [
            [cur[0][0] * a + cur[0][1] * c, cur[0][0] * b + cur[0][1] * d],
            [cur[1][0] * a + cur[1][1] * c, cur[1][0] * b + cur[1][1] * d],
        ]
    return all(x > 0 for row in cur for x in row)


def primitivity(
    sub: Subsystem, cap: int = 6, witness_budget: int = 200_000
) -> PrimitivityCertificate:
    """Classify the subsystem up to word length ``cap``.

    Strong primitivity is certified by, for every (location, color) pair, a
    connecting word whose tile avoids the invariant curve: such a word can be
    inserted between any two subsystem tiles and keeps the join in the open
    face, which is what the measure constructions downstream need.
    """
    rule = sub.rule
    primitive_n: int | None = None
    for n in range(1, cap + 1):
        if _matrix_power_positive(sub, n):
            primitive_n = n
            break
    if primitive_n is None:
        return PrimitivityCertificate(kind="neither-up-to-cap", cap=cap)

    for n in range(1, cap + 1):
        needed = {(lc, cc) for lc in (0, 1) for cc in (0, 1)}
        found: dict[tuple[str, str], cells.TileWord] = {}
        budget = witness_budget
        for sym in enumerate_subsystem_words(sub, n):
            key = (sub.locations[sym[0]], sub.colors[sym[-1]])
            if key not in needed:
                continue
            budget -= 1
            if budget < 0:
                break
            w = sub.concat(sym)
            if not cells.interior_test(rule, w).touches_curve:
                needed.discard(key)
                found[(COLORS[key[0]], COLORS[key[1]])] = cells.word_ids(rule, w)
                if not needed:
                    return PrimitivityCertificate(
                        kind="stronglyPrimitive",
                        cap=cap,
                        witness_n=n,
                        witnesses=found,
                    )
    return PrimitivityCertificate(kind="primitive", cap=cap, witness_n=primitive_n)


def parry_equilibrium(
    sub: Subsystem,
    phi: Callable[[Word], float] | None = None,
    chain_level: int = 1,
) -> MarkovMeasure:
    """Equilibrium Markov measure on the chain of chain_level-symbol words.

    ``phi`` is evaluated on the concatenated rule word of each chain state
    and enters as the edge weight e^{phi(state)} out of that state.  With
    phi=None this is the Parry measure (measure of maximal entropy).
    """
    states = list(enumerate_subsystem_words(sub, chain_level))
    pos = {s: i for i, s in enumerate(states)}
    adj: list[list[int]] = []
    for s in states:
        nxt = []
        for j in sub.successors(s[-1]):
            t = s[1:] + (j,)
            if t in pos:
                nxt.append(pos[t])
        adj.append(nxt)
    if phi is None:
        logw = [0.0] * len(states)
        provenance = "parry"
    else:
        logw = [float(phi(sub.concat(s))) for s in states]
        provenance = "equilibrium"
    return equilibrium_markov(states, adj, logw, provenance)


__all__ = [
    "Subsystem",
    "make_subsystem",
    "TileMatrix",
    "tile_matrix",
    "subsystem_entropy",
    "subsystem_tiles",
    "enumerate_subsystem_words",
    "LimitSetCover",
    "limit_set_cover",
    "PrimitivityCertificate",
    "primitivity",
    "parry_equilibrium",
    "MarkovMeasure",
    "ReducibleChainError",
    "strongly_connected_components",
]
