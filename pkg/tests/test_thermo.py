import math
from fractions import Fraction

import pytest

from tilepress import cells
from tilepress.rule import builtin_rule
from tilepress.thermo import (
    Potential,
    birkhoff_bracket,
    cylinder_mass,
    distortion,
    equilibrium_state,
    gibbs_report,
    indicator_potential,
    legendre_rate,
    measure_stats,
    pressure,
    spectral_pressure,
    zero_potential,
)

R22 = builtin_rule("lattes-2x2")


def level2_potential(rule):
    """A fixed two-word potential used across pressure tests."""
    words = []
    for w in cells.enumerate_tiles(rule, 2):
        words.append(w)
        if len(words) == 2:
            break
    return Potential(
        level=2, values={words[0]: Fraction(1, 2), words[1]: Fraction(-1, 3)}
    )


@pytest.mark.parametrize("name", ["lattes-2x2", "lattes-3x3", "triangle-2x2", "flap-2-1"])
def test_zero_pressure_is_log_degree(name):
    rule = builtin_rule(name)
    est = spectral_pressure(rule, zero_potential())
    assert abs(est.value - math.log(rule.degree)) < 1e-10


@pytest.mark.parametrize("t", [1, 2, Fraction(-1, 2)])
def test_indicator_pressure_closed_form(t):
    """One marked tile per face out of four gives row sums 3 + e^t."""
    phi = indicator_potential(R22).scaled(t)
    est = spectral_pressure(R22, phi)
    assert abs(est.value - math.log(3 + math.exp(float(t)))) < 1e-10


@pytest.mark.parametrize("phi_name", ["zero", "indicator", "level2"])
def test_partition_sum_brackets_spectral(phi_name):
    phi = {
        "zero": zero_potential(),
        "indicator": indicator_potential(R22),
        "level2": level2_potential(R22),
    }[phi_name]
    n = 8
    spec = spectral_pressure(R22, phi).value
    zn = pressure(R22, phi, method="Zn", n=n).value
    bound = (float(distortion(R22, phi, n)) + math.log(2)) / n
    assert abs(spec - zn) <= bound + 1e-9


def test_level1_distortion_vanishes():
    assert distortion(R22, indicator_potential(R22), 6) == 0


def test_level2_distortion_positive_and_level_free():
    phi = level2_potential(R22)
    d4 = distortion(R22, phi, 4)
    d7 = distortion(R22, phi, 7)
    assert d4 > 0
    assert d4 == d7  # locally constant potentials have bounded distortion


def test_periodic_and_preimage_agree_with_spectral():
    phi = indicator_potential(R22)
    spec = spectral_pressure(R22, phi).value
    for method in ("periodic", "preimage"):
        est = pressure(R22, phi, method=method, n=10)
        assert abs(est.value - spec) < 0.03


def test_equilibrium_cylinders_uniform_for_zero_potential():
    mm = equilibrium_state(R22, zero_potential())
    for w in cells.enumerate_tiles(R22, 3):
        assert abs(cylinder_mass(R22, mm, w) - 0.5 * 4 ** -3) < 1e-12


@pytest.mark.parametrize("n", range(1, 9))
def test_gibbs_ratio_is_exactly_half_for_mme(n):
    rep = gibbs_report(R22, zero_potential(), n)
    assert abs(rep.min_ratio - 0.5) < 1e-9
    assert abs(rep.max_ratio - 0.5) < 1e-9


def test_gibbs_ratios_bounded_for_indicator():
    phi = indicator_potential(R22)
    C = 10.0
    for n in range(1, 9):
        rep = gibbs_report(R22, phi, n)
        assert 1 / C <= rep.min_ratio <= rep.max_ratio <= C


def test_free_energy_zero_only_at_equilibrium():
    phi = indicator_potential(R22)
    mm = equilibrium_state(R22, phi)
    stats = measure_stats(mm, phi=phi)
    P = spectral_pressure(R22, phi).value
    assert abs(stats.entropy + stats.phi_mean - P) < 1e-9
    mme = equilibrium_state(R22, zero_potential())
    other = measure_stats(mme, phi=phi)
    assert other.entropy + other.phi_mean < P - 1e-6


def test_bracket_encloses_all_extension_sums():
    """Brute-force oracle: the bracket of S_n phi over a word equals the
    min/max of the exact sums over all deeper extensions."""
    phi = level2_potential(R22)
    idx = R22.index
    for w in list(cells.enumerate_tiles(R22, 3))[::17]:
        lo, hi = birkhoff_bracket(R22, phi, w)
        sums = []
        for a in idx.successors[idx.col[w[-1]]]:
            for b in idx.successors[idx.col[a]]:
                ext = w + (a, b)
                s = sum(phi.value(ext[i:i + 2]) for i in range(3))
                sums.append(s)
        assert min(sums) == lo and max(sums) == hi


def test_legendre_rate_matches_binomial_kl():
    """For the MME and the 1-of-4 indicator the Birkhoff mean is
    Binomial(n, 1/4)/n, so K is the binomial KL divergence."""
    phi, psi = zero_potential(), indicator_potential(R22)
    xs = [0.1, 0.25, 0.5, 0.75, 0.9]
    curve = legendre_rate(R22, phi, psi, xs)

    def kl(x):
        return x * math.log(4 * x) + (1 - x) * math.log(4 * (1 - x) / 3)

    for x, v in zip(curve.xs, curve.values):
        assert abs(v - kl(x)) < 1e-7
    assert abs(curve.mean - 0.25) < 1e-9


def test_pressure_method_validation():
    with pytest.raises(ValueError):
        pressure(R22, zero_potential(), method="Zn")
    with pytest.raises(ValueError):
        pressure(R22, zero_potential(), method="magic")
