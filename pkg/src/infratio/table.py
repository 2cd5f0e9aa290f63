"""The published table of copy specifications and improved bounds."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .copylemma import CopySpec, parse_copy_chain

Q_ALIASES = {"t": ("0", "4"), "v": ("2", "6")}


@dataclass(frozen=True)
class TableRow:
    structure: str
    copies: str
    without_symmetry: Fraction
    with_symmetry: Fraction
    aliases: tuple = ()
    export_only: bool = False

    def specs(self) -> list[CopySpec]:
        return parse_copy_chain(self.copies, dict(self.aliases))

    def expected(self, symmetric: bool) -> Fraction:
        return self.with_symmetry if symmetric else self.without_symmetry


TABLE = [
    TableRow("A", "0,3,4,7|1,2,5,6", Fraction(135, 119), Fraction(57, 50)),
    TableRow("A*", "5,6-copy(0,3|1,2,4,7) and 0,0',3,3'-copy(1,2|4,5,6,7)",
             Fraction(33, 29), Fraction(52, 45)),
    TableRow("F", "0,2,4,6|1,3,5,7", Fraction(26, 23), Fraction(17, 15)),
    TableRow("F*", "3,7-copy(0,4|1,2,5,6) and 0,0',4',5-copy(1,4|2,3,6,7)",
             Fraction(42, 37), Fraction(8, 7)),
    TableRow("Fhat", "2,6-copy(0,4|1,3,5,7) and 0,0',4',5-copy(1,4|2,3,6,7)",
             Fraction(42, 37), Fraction(23, 20)),
    TableRow("Q", "0,2,4,6-copy(t,v|1,3,5,7) and 0,2,4,6,t',v'-copy(t,v|1,3,5,7)",
             Fraction(17, 15), Fraction(17, 15), tuple(Q_ALIASES.items()), export_only=True),
    TableRow("Q*", "3,7-copy(0,4|1,2,5,6) and 0,0',4,4'-copy(1,5|2,3,6,7)",
             Fraction(33, 29), Fraction(8, 7)),
]


def table_row(structure: str) -> TableRow:
    for row in TABLE:
        if row.structure == structure:
            return row
    raise KeyError(structure)
