#!/usr/bin/env python3
"""Finite-level deviation rates against the Legendre rate function.

For the 2x2 checkerboard rule, the measure of maximal entropy, and the
tile-indicator observable, prints the exact tail probabilities
P(S_n >= n/2), the finite-n rates, the fitted asymptotic rate, and the
Legendre value K(1/2) = (1/2)log 2 + (1/2)log(2/3).
"""

import math

from tilepress import ldp, thermo
from tilepress.rule import builtin_rule


def main() -> None:
    rule = builtin_rule("lattes-2x2")
    phi = thermo.zero_potential()
    psi = thermo.indicator_potential(rule)
    curve = ldp.deviation_curve(rule, phi, psi, 0.5, "birkhoff", range(12, 61, 8))
    k_half = 0.5 * math.log(2) + 0.5 * math.log(2 / 3)
    print(f"{'n':>4} {'P(S_n >= n/2)':>16} {'rate_n':>10}")
    for e in curve.entries:
        print(f"{e.n:>4} {float(e.xi):>16.6e} {e.rate:>10.6f}")
    print(f"fitted asymptotic rate  {curve.asymptotic_rate:.6f}")
    print(f"Legendre value K(1/2)   {k_half:.6f}")
    print(f"gap                     {abs(curve.asymptotic_rate - k_half):.2e}")

    grid = [i / 16 for i in range(1, 16)]
    leg = thermo.legendre_rate(rule, phi, psi, grid)
    print("\nrate function on [1/16, 15/16]:")
    for x, v in zip(grid, leg.values):
        print(f"  K({x:.4f}) = {v:.6f}")


if __name__ == "__main__":
    main()
