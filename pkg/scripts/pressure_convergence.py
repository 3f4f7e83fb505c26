#!/usr/bin/env python3
"""Compare the four pressure estimators as the level grows.

Prints, for the 2x2 checkerboard rule and the tile-indicator potential, the
partition-function, periodic-point, and preimage estimates at levels 2..12
next to the spectral value log(3+e), together with the distortion-based error
bound for the partition-function estimate.
"""

import math

from tilepress import thermo
from tilepress.rule import builtin_rule


def main() -> None:
    rule = builtin_rule("lattes-2x2")
    phi = thermo.indicator_potential(rule)
    spectral = thermo.spectral_pressure(rule, phi).value
    print(f"spectral pressure  {spectral:.10f}   (closed form log(3+e) = "
          f"{math.log(3 + math.e):.10f})")
    print(f"{'n':>3} {'Zn':>14} {'Zn bound':>10} {'periodic':>14} {'preimage':>14}")
    for n in range(2, 13):
        zn = thermo.pressure(rule, phi, method="Zn", n=n).value
        bound = (float(thermo.distortion(rule, phi, n)) + math.log(2)) / n
        per = thermo.pressure(rule, phi, method="periodic", n=n).value
        pre = thermo.pressure(rule, phi, method="preimage", n=n).value
        print(f"{n:>3} {zn:>14.10f} {bound:>10.6f} {per:>14.10f} {pre:>14.10f}")


if __name__ == "__main__":
    main()
