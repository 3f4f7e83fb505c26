#!/usr/bin/env python3
"""Entropy drop at a periodic branch vertex of the flap rule.

Tracks the growth of vertex-flower subsystems F_n at the fixed critical
vertex of flap-2-1: h_top(F_n) = log(2·2^n) exactly, the per-level rates
(1/n) log(2·2^n) decrease strictly toward log 2 from above, and the
coarse-cylinder mass escaping the flower cylinder shrinks with n.
"""

import math

from tilepress import ldp
from tilepress.rule import builtin_rule


def main() -> None:
    rule = builtin_rule("flap-2-1")
    report = ldp.usc_experiment(rule, range(1, 8), coarse=2)
    print(f"critical vertex: tile {report.vertex.rep_tile}, "
          f"local degree {report.vertex.local_degree}")
    print(f"{'n':>3} {'#words':>8} {'h_top':>10} {'rate_n':>10} {'mass_outside':>13}")
    for e in report.entries:
        print(f"{e.n:>3} {e.h_top_exact:>8} {e.h_top:>10.6f} "
              f"{e.rate_n:>10.6f} {e.mass_outside:>13.6f}")
    print(f"limit log 2 = {math.log(2):.6f}")


if __name__ == "__main__":
    main()
