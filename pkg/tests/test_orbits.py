import math

import numpy as np
import pytest

from tilepress import cells, orbits
from tilepress.rule import builtin_rule
from tilepress.thermo import indicator_potential, spectral_pressure, zero_potential

RULES = {name: builtin_rule(name) for name in
         ("lattes-2x2", "lattes-3x3", "triangle-2x2", "flap-2-1")}


def trace_oracle(rule, n):
    """Number of n-words whose last color matches their first location,
    via the letter adjacency matrix."""
    idx = rule.index
    k = idx.n_tiles
    A = np.zeros((k, k), dtype=object)
    for a in range(k):
        for b in range(k):
            if idx.col[a] == idx.loc[b]:
                A[a, b] = 1
    return int(np.trace(np.linalg.matrix_power(A, n)))


@pytest.mark.parametrize("name", list(RULES))
@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_fixed_counts_match_trace(name, n):
    rule = RULES[name]
    assert orbits.fixed_tiles(rule, n).count == trace_oracle(rule, n)


def test_fixed_words_enumerate_consistently():
    rule = RULES["lattes-2x2"]
    fx = orbits.fixed_tiles(rule, 4, enumerate_words=True)
    assert len(fx.words) == fx.count == trace_oracle(rule, 4)


def test_preimage_count_is_degree_power():
    rule = RULES["triangle-2x2"]
    for n in (1, 2, 3):
        ps = orbits.preimage_sums(rule, n)
        assert ps.count == rule.degree**n


def test_preimage_pressure_brackets_spectral():
    rule = RULES["lattes-2x2"]
    phi = indicator_potential(rule)
    spec = spectral_pressure(rule, phi).value
    est = orbits.preimage_pressure(rule, phi, 10)
    lo, hi = est.bracket
    assert lo - 0.02 <= spec <= hi + 0.02
    assert abs(est.value - spec) < 0.03


def test_lattes_critical_vertices():
    report = orbits.critical_orbits(RULES["lattes-2x2"])
    crit = [v for v in report.vertices if v.local_degree > 1]
    # Riemann-Hurwitz: six simple branch vertices, none periodic
    assert len(crit) == 6
    assert all(v.local_degree == 2 for v in crit)
    assert not report.has_periodic_critical_point


def test_flap_has_periodic_critical_vertex():
    report = orbits.critical_orbits(RULES["flap-2-1"])
    assert report.has_periodic_critical_point
    assert report.periodic_critical_degree == 2
    v0 = report.periodic_critical_vertex
    assert report.vertex_map[v0] == v0


@pytest.mark.parametrize("name", list(RULES))
def test_ramification_totals(name):
    rule = RULES[name]
    report = orbits.critical_orbits(rule)
    total = sum(v.local_degree - 1 for v in report.vertices)
    assert total == 2 * rule.degree - 2


def test_vertex_map_is_zero_vertex_dynamics():
    rule = RULES["lattes-2x2"]
    report = orbits.critical_orbits(rule)
    assert sorted(report.vertex_map) == sorted(
        rule.tiles[rule.index.tile_pos[tid]].corners[pos]
        for tid, pos in rule.vertex_anchors
    )
