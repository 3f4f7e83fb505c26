import math

import numpy as np
import pytest

from tilepress.rule import builtin_rule
from tilepress.subsystem import (
    enumerate_subsystem_words,
    make_subsystem,
    parry_equilibrium,
    primitivity,
    subsystem_entropy,
    subsystem_tiles,
    tile_matrix,
)


@pytest.fixture(scope="module")
def carpet():
    return make_subsystem(builtin_rule("lattes-3x3"), exclude_tiles=("w11", "b11"))


@pytest.fixture(scope="module")
def gasket():
    return make_subsystem(builtin_rule("triangle-2x2"), exclude_tiles=("w-mid", "b-mid"))


def test_carpet_matrix_and_entropy(carpet):
    assert tile_matrix(carpet).counts == [[4, 4], [4, 4]]
    assert abs(subsystem_entropy(carpet) - math.log(8)) < 1e-12


def test_carpet_is_strongly_primitive(carpet):
    assert primitivity(carpet).kind == "stronglyPrimitive"


def test_gasket_entropy_and_no_primitivity(gasket):
    assert abs(subsystem_entropy(gasket) - math.log(3)) < 1e-12
    assert primitivity(gasket).kind.startswith("neither")


@pytest.mark.parametrize("name", ["lattes-2x2", "lattes-3x3", "triangle-2x2", "flap-2-1"])
def test_full_subsystem_entropy_is_log_degree(name):
    rule = builtin_rule(name)
    sub = make_subsystem(rule)
    assert abs(subsystem_entropy(sub) - math.log(rule.degree)) < 1e-12


def test_word_counts_match_matrix_powers(carpet):
    A = np.array(tile_matrix(carpet).counts, dtype=object)
    one = np.ones(2, dtype=object)
    for n in range(1, 9):
        expected = int(one @ np.linalg.matrix_power(A, n) @ one)
        assert subsystem_tiles(carpet, n) == expected
    assert subsystem_tiles(carpet, 3) == sum(
        1 for _ in enumerate_subsystem_words(carpet, 3)
    )


def test_subsystem_words_avoid_excluded_letters(carpet):
    rule = carpet.rule
    banned = {rule.index.tile_pos["w11"], rule.index.tile_pos["b11"]}
    for w in enumerate_subsystem_words(carpet, 2):
        word = carpet.concat(w)
        assert not set(word) & banned


def test_parry_measure_is_stationary_and_maximal(carpet):
    mm = parry_equilibrium(carpet)
    pi = np.asarray(mm.pi, dtype=float)
    P = mm.P.toarray() if hasattr(mm.P, "toarray") else np.asarray(mm.P, dtype=float)
    assert abs(pi.sum() - 1.0) < 1e-10
    assert np.allclose(pi @ P, pi, atol=1e-10)
    assert np.allclose(P.sum(axis=1), 1.0, atol=1e-10)
    assert abs(mm.entropy() - math.log(8)) < 1e-9


def test_exclusion_of_unknown_tile_fails():
    rule = builtin_rule("lattes-2x2")
    with pytest.raises(KeyError):
        make_subsystem(rule, exclude_tiles=("nope",))
