"""Small LP builders shared by the tests."""

from fractions import Fraction

from infratio.entropy import Constraint, GroundSet, LinExpr, Relation, Tag
from infratio.lp import LpProblem, RowBlock


def make_problem(rows, ncols):
    """LpProblem minimising column 0 over columns 0..ncols-1.

    ``rows`` holds (terms, constant, relation) meaning terms.h + constant >= 0 or = 0.
    Inequalities go to one block and equalities to another, in input order.
    """
    n = max(1, (ncols - 1).bit_length())
    ge, eq = [], []
    for terms, const, rel in rows:
        expr = LinExpr({k: Fraction(v) for k, v in terms.items()}, Fraction(const))
        if rel == ">=":
            ge.append(Constraint(expr, Relation.GE, Tag.ELEMENTAL))
        else:
            eq.append(Constraint(expr, Relation.EQ, Tag.COPY))
    blocks = [RowBlock(Tag.ELEMENTAL, ge), RowBlock(Tag.COPY, eq)]
    return LpProblem(GroundSet.standard(n - 1), 0, list(range(ncols)), blocks, {"structure": "test"})
