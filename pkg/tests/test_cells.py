import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tilepress import cells
from tilepress.rule import builtin_rule

RULES = {name: builtin_rule(name) for name in
         ("lattes-2x2", "lattes-3x3", "triangle-2x2", "flap-2-1")}


def random_word(rule, n, seed):
    """Deterministic pseudo-random admissible word."""
    idx = rule.index
    w = [seed % idx.n_tiles]
    x = seed
    for _ in range(n - 1):
        x = (1103515245 * x + 12345) % (1 << 31)
        succ = idx.successors[idx.col[w[-1]]]
        w.append(succ[x % len(succ)])
    return tuple(w)


@pytest.mark.parametrize("name", list(RULES))
@pytest.mark.parametrize("n", [1, 2, 3])
def test_counts_and_ramification(name, n):
    rule = RULES[name]
    d = rule.degree
    sk = cells.skeleton(rule, n)
    assert sk.tiles == 2 * d**n
    assert len(sk.edges) == rule.m * d**n
    assert len(sk.vertices) <= rule.m * d**n
    assert sum(v.local_degree - 1 for v in sk.vertices) == 2 * (d**n - 1)


@pytest.mark.parametrize("name", list(RULES))
def test_tile_count_matches_enumeration(name):
    rule = RULES[name]
    for n in (1, 2, 3, 4):
        assert cells.tile_count(rule, n) == 2 * rule.degree**n
        if rule.degree**n <= 1500:
            assert sum(1 for _ in cells.enumerate_tiles(rule, n)) == 2 * rule.degree**n


@given(name=st.sampled_from(list(RULES)), n=st.integers(1, 5),
       seed=st.integers(0, 10**9), e=st.integers(0, 3))
@settings(max_examples=120, deadline=None)
def test_neighbor_involution(name, n, seed, e):
    rule = RULES[name]
    e %= rule.m
    w = random_word(rule, n, seed)
    v = cells.neighbor(rule, w, e)
    assert cells.is_admissible(rule, v)
    assert cells.neighbor(rule, v, e) == w
    assert v != w


@given(name=st.sampled_from(list(RULES)), n=st.integers(1, 4),
       seed=st.integers(0, 10**9), v=st.integers(0, 3))
@settings(max_examples=60, deadline=None)
def test_flower_even_and_closed(name, n, seed, v):
    rule = RULES[name]
    v %= rule.m
    w = random_word(rule, n, seed)
    img = rule.tiles[w[-1]].corners[0]  # flower takes an image vertex
    flw = cells.flower(rule, w, (img + v) % rule.m)
    assert len(flw) % 2 == 0
    assert w in flw
    assert len(set(flw)) == len(flw)


def test_neighbor_crosses_curve_iff_location_flips():
    rule = RULES["lattes-2x2"]
    for w in cells.enumerate_tiles(rule, 3):
        for e in range(rule.m):
            v = cells.neighbor(rule, w, e)
            flips = rule.index.loc[w[0]] != rule.index.loc[v[0]]
            assert flips == cells.side_on_curve(rule, w, e)


@pytest.mark.parametrize("name", list(RULES))
@pytest.mark.parametrize("n", [1, 2, 3])
def test_pairs_partition_tiles(name, n):
    rule = RULES[name]
    pairs = cells.enumerate_pairs(rule, n)
    assert len(pairs) == rule.degree**n
    seen = set()
    for pr in pairs:
        a = cells.word_from_ids(rule, pr.first)
        b = cells.word_from_ids(rule, pr.second)
        assert cells.word_color(rule, a) != cells.word_color(rule, b)
        assert a not in seen and b not in seen
        seen.update((a, b))
    assert len(seen) == 2 * rule.degree**n


def test_partner_is_involution():
    rule = RULES["triangle-2x2"]
    for w in cells.enumerate_tiles(rule, 3):
        assert cells.partner(rule, cells.partner(rule, w)) == w


def test_deep_words_no_recursion_limit():
    rule = RULES["lattes-2x2"]
    w = random_word(rule, 5000, 7)
    v = cells.neighbor(rule, w, 2)
    assert cells.neighbor(rule, v, 2) == w


def test_vertex_flower_periodic_critical_growth():
    rule = RULES["flap-2-1"]
    for n in range(1, 6):
        assert len(cells.vertex_flower(rule, "w00", 0, n)) == 2 * 2**n


def test_vertex_flower_regular_vertex_stays_flat():
    rule = RULES["lattes-2x2"]
    # the face-center vertex is critical with a regular image, so its
    # local degree stays 2 at every depth: flowers keep 4 tiles
    for n in range(1, 5):
        assert len(cells.vertex_flower(rule, "w00", 2, n)) == 4


def test_interior_pair_search_lattes():
    report = cells.interior_pair_search(RULES["lattes-3x3"])
    assert report.found
    assert set(report.pairs) == {"white", "black"}
