import json

import pytest
from hypothesis import given
from hypothesis import strategies as st

from infratio.access import (CATALOG_SETS, AccessStructure, automorphism_group, catalog,
                             catalog_names, format_set, is_authorized, parse_set,
                             published_group, scheme_constraints)
from infratio.entropy import ContractError, Tag, mask_of

A = catalog("A")


def m(*idx):
    return mask_of(idx)


def test_authorization_examples():
    assert is_authorized(A, m(1, 2, 3))
    assert not is_authorized(A, m(1, 2))
    assert is_authorized(A, m(1, 2, 3, 4))


def test_authorization_rejects_secret_and_copies():
    with pytest.raises(ContractError):
        is_authorized(A, m(0, 1, 2, 3))
    with pytest.raises(ContractError):
        is_authorized(A, m(1, 8))


def test_no_minimal_set_inside_12():
    assert all(s & m(1, 2) != s for s in A.minimal_sets)


def test_scheme_constraint_shapes():
    rows = scheme_constraints(A)
    assert len(rows) == 127
    assert all(r.tag is Tag.SCHEME for r in rows)
    auth = [r for r in rows if m(0, 1, 2, 3) in r.expr.terms]
    assert auth[0].expr.terms == {m(0, 1, 2, 3): 1, m(1, 2, 3): -1}
    unauth = [r for r in rows if m(0, 1, 2) in r.expr.terms][0]
    assert unauth.expr.terms == {m(0, 1, 2): 1, m(1, 2): -1, m(0): -1}
    assert len({frozenset(r.expr.terms) for r in rows}) == 127


def test_catalog_contents():
    assert catalog_names() == ["A", "A*", "F", "F*", "Fhat", "Q", "Q*"]
    assert len(catalog("A").minimal_sets) == 8
    assert len(catalog("Q").minimal_sets) == 12
    assert {"123", "145", "167", "246"} <= set(catalog("A").minimal_strings())
    for name in catalog_names():
        s = catalog(name)
        assert s.parties == 7 and s.name == name


def test_unknown_catalog_name():
    with pytest.raises(ContractError):
        catalog("Z")


def test_antichain_is_enforced():
    with pytest.raises(ContractError):
        AccessStructure.from_strings(7, ["257", "1257"])
    with pytest.raises(ContractError):
        AccessStructure.from_strings(3, [])
    with pytest.raises(ContractError):
        parse_set("18", 7)


@pytest.mark.parametrize("name,order", [("A", 24), ("A*", 24), ("F", 8), ("F*", 8),
                                        ("Fhat", 4), ("Q", 4), ("Q*", 4)])
def test_automorphism_orders_and_published_generators(name, order):
    G = automorphism_group(catalog(name))
    assert G.order() == order
    assert published_group(name) == G


def test_json_round_trip(tmp_path):
    s = AccessStructure.from_strings(4, ["12", "23", "34"], "path")
    data = s.to_json()
    assert AccessStructure.from_json(json.dumps(data)) == s
    path = tmp_path / "s.json"
    path.write_text(json.dumps({"parties": 4, "minimal_sets": ["12", "23", "34"]}))
    assert AccessStructure.from_json(path) == s
    with pytest.raises(ContractError):
        AccessStructure.from_json({"parties": 4})


@given(st.integers(1, 255))
def test_authorization_is_monotone(J):
    J &= ~1
    if not J:
        return
    if is_authorized(A, J):
        for extra in range(1, 8):
            assert is_authorized(A, J | 1 << extra)


@given(st.integers(2, 254).filter(lambda x: x % 2 == 0))
def test_authorized_iff_superset_of_minimal(J):
    want = any(set(s) <= set(format_set(J)) for s in CATALOG_SETS["F*"])
    assert is_authorized(catalog("F*"), J) == want
