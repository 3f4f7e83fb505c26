"""tilepress: two-tile subdivision rules on the pillow sphere.

Combinatorial tile dynamics (tiles, flowers, pairs), subshift subsystems and
their entropies, thermodynamic pressure for word potentials, and
large-deviation / equidistribution experiments, with a `tilepress` CLI.
"""

from tilepress.rule import (
    SubdivisionRule,
    Tile,
    Side,
    parse_rule,
    serialize_rule,
    validate_rule,
    builtin_rule,
)

__all__ = [
    "SubdivisionRule",
    "Tile",
    "Side",
    "parse_rule",
    "serialize_rule",
    "validate_rule",
    "builtin_rule",
]

__version__ = "0.1.0"
