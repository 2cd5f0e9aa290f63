import re
from pathlib import Path

import pytest
from hypothesis import given
from hypothesis import strategies as st

from infratio.copylemma import (CopySpec, apply_chain, apply_copy, copy_equality_count,
                                parse_copy_chain, parse_copy_notation)
from infratio.entropy import ContractError, GroundSet, LinExpr, Tag, cmi, entropy
from infratio.table import Q_ALIASES

GOLDEN = Path(__file__).parent / "data" / "copy_golden.txt"
LETTERS = {"a": 0, "b": 1, "c": 2, "d": 3, "e": 4, "d'": 5, "e'": 6}


def _mask(names):
    return sum(1 << LETTERS[s.strip()] for s in names.split(","))


def golden_exprs():
    out = []
    for line in GOLDEN.read_text().splitlines():
        if not line or line.startswith("#"):
            continue
        h = re.fullmatch(r"H\((.*)\)=H\((.*)\)", line)
        if h:
            out.append(entropy(_mask(h[1])) - entropy(_mask(h[2])))
            continue
        i = re.fullmatch(r"I\((.*):(.*)\|(.*)\)=0", line)
        out.append(cmi(_mask(i[1]), _mask(i[2]), _mask(i[3])))
    return out


def test_matches_golden_block():
    ground = GroundSet.standard(4)  # a..e as 0..4
    spec = CopySpec(Z=("3", "4"), X=("0", "1"), Y=("2",))
    g2, rows = apply_copy(ground, spec)
    assert g2.names[5:] == ("3'", "4'")
    want = golden_exprs()
    assert len(want) == 13 and len(rows) == 13
    assert [r.expr for r in rows] == want
    assert all(r.tag is Tag.COPY for r in rows)


def test_single_element_copy_over_nothing():
    g2, rows = apply_copy(GroundSet(["0"]), CopySpec(Z=("0",)))
    assert [r.expr for r in rows] == [LinExpr({1: 1, 2: -1}), LinExpr({1: 1, 2: 1, 3: -1})]


def test_table_row_counts():
    g2, rows = apply_copy(GroundSet.standard(7), parse_copy_notation("0,3,4,7|1,2,5,6"))
    assert len(g2) == 12
    assert len(rows) == 241


def test_parse_examples():
    s = parse_copy_notation("0,3,4,7|1,2,5,6")
    assert (s.Z, s.X, s.Y) == (("0", "3", "4", "7"), ("1", "2", "5", "6"), ())
    s = parse_copy_notation("5,6-copy(0,3|1,2,4,7)")
    assert (s.Y, s.Z, s.X) == (("5", "6"), ("0", "3"), ("1", "2", "4", "7"))
    s = parse_copy_notation("0,0',4',5-copy(1,4|2,3,6,7)")
    assert (s.Y, s.Z, s.X) == (("0", "0'", "4'", "5"), ("1", "4"), ("2", "3", "6", "7"))


def test_parse_errors():
    for bad in ("", "0,1", "copy(0|1)", "-copy(0|1)", "0|1|2", "0,1|1", "0,a b|1"):
        with pytest.raises(ContractError):
            parse_copy_notation(bad)


def test_unknown_label_at_application_time():
    with pytest.raises(ContractError):
        apply_copy(GroundSet.standard(7), parse_copy_notation("0,9'|1"))


def test_chain_refers_to_earlier_primes():
    specs = parse_copy_chain("3,7-copy(0,4|1,2,5,6) and 0,0',4',5-copy(1,4|2,3,6,7)")
    g, rows = apply_chain(GroundSet.standard(7), specs)
    assert g.names[8:] == ("0'", "4'", "1'", "4''")
    assert len(rows) == (16 * 3 + 1) * 2


def test_q_chain_uses_four_new_elements_per_application():
    specs = parse_copy_chain("0,2,4,6-copy(t,v|1,3,5,7) and 0,2,4,6,t',v'-copy(t,v|1,3,5,7)",
                             Q_ALIASES)
    assert specs[0].Z == ("0", "4", "2", "6")
    assert specs[1].Y == ("0'", "4'", "2'", "6'")
    g, rows = apply_chain(GroundSet.standard(7), specs)
    assert len(g) == 16
    assert g.names[12:] == ("0''", "4''", "2''", "6''")


def test_chain_leaves_earlier_rows_unchanged():
    ground = GroundSet.standard(7)
    first = parse_copy_notation("5,6-copy(0,3|1,2,4,7)")
    g1, rows1 = apply_copy(ground, first)
    _, rows_all = apply_chain(ground, [first, parse_copy_notation("0,0',3,3'-copy(1,2|4,5,6,7)")])
    assert rows_all[:len(rows1)] == rows1


def test_json_round_trip():
    s = parse_copy_notation("0,0',4',5-copy(1,4|2,3,6,7)")
    assert CopySpec.from_json(s.to_json()) == s
    assert parse_copy_notation(s.notation()) == s


def _swap(expr, z_masks):
    """Apply the Z <-> Z' substitution bit by bit."""
    out = {}
    for S, c in expr.terms.items():
        T = S
        for a, b in z_masks:
            if S >> a & 1 and not S >> b & 1:
                T = T & ~(1 << a) | (1 << b)
        out[T] = out.get(T, 0) + c
    return out


@given(st.integers(1, 4), st.integers(0, 4), st.integers(0, 3))
def test_counts_and_sides_differ_only_by_the_copy(nz, nx, ny):
    if nz + nx + ny > 9:
        return
    ground = GroundSet.standard(nz + nx + ny - 1) if nz + nx + ny > 1 else GroundSet(["0"])
    names = list(ground.names)
    spec = CopySpec(Z=tuple(names[:nz]), X=tuple(names[nz:nz + nx]),
                    Y=tuple(names[nz + nx:nz + nx + ny]))
    g2, rows = apply_copy(ground, spec)
    eqs = rows[:-1]
    assert len(eqs) == copy_equality_count(spec) == 2 ** nx * (2 ** nz - 1)
    pairs = [(ground.index(z), g2.index(z2)) for z, z2 in zip(spec.Z, g2.names[len(ground):])]
    for r in eqs:
        plus = [S for S, c in r.expr.terms.items() if c == 1]
        minus = [S for S, c in r.expr.terms.items() if c == -1]
        assert len(plus) == len(minus) == 1
        assert _swap(LinExpr({plus[0]: 1}), pairs) == {minus[0]: 1}
