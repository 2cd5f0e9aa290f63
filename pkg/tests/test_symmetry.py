import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from infratio.access import automorphism_group, catalog
from infratio.entropy import ContractError, Tag, mask_of
from infratio.symmetry import (Group, Permutation, act, close, orbit_quotient, orbits,
                               symmetry_equalities)


def m(*idx):
    return mask_of(idx)


perms7 = st.permutations(range(1, 8)).map(lambda im: Permutation((0,) + tuple(im)))


def test_act_examples():
    assert act(Permutation.parse("(12)(56)", 7), m(1, 5)) == m(2, 6)
    assert act(Permutation.parse("(12)(4576)", 7), m(0)) == m(0)
    assert act(Permutation.parse("(12)(4576)", 7), m(4, 6)) == m(4, 5)


def test_act_fixes_copy_elements():
    p = Permutation.parse("(1234567)", 7)
    assert p.act(m(1, 8, 11)) == m(2, 8, 11)


@given(st.sampled_from(["()", "(12)", "(12)(56)", "(4576)", "(1234567)", "(17)(2345)"]))
def test_cycle_notation_round_trips(text):
    p = Permutation.parse(text, 7)
    assert str(p) == text
    assert Permutation.parse(str(p), 7) == p


def test_parse_errors():
    for bad in ("(1", "(18)", "(11)", "(12)(23)", "12"):
        with pytest.raises(ContractError):
            Permutation.parse(bad, 7)


def test_act_respects_composition_randomised():
    rng = random.Random(7)
    for _ in range(1000):
        p = Permutation((0,) + tuple(rng.sample(range(1, 8), 7)))
        q = Permutation((0,) + tuple(rng.sample(range(1, 8), 7)))
        S = rng.randrange(1, 1 << 12)
        assert act(p @ q, S) == act(p, act(q, S))


@given(perms7, perms7)
def test_inverse_and_identity(p, q):
    e = Permutation.identity(7)
    assert p @ p.inverse() == e
    assert (p @ q).inverse() == q.inverse() @ p.inverse()


def test_closure_orders():
    assert close([Permutation.parse("(12)", 2)]).order() == 2
    assert close([Permutation.parse("(12)", 7), Permutation.parse("(1234567)", 7)]).order() == 5040


def burnside(G, r):
    """Number of orbits on nonempty subsets of {0..r}: average of fixed-point counts."""
    total = 0
    for g in G:
        cycles = len(g.cycles()) + sum(1 for i in range(1, r + 1) if g.images[i] == i)
        # the secret is a fixed point too; subtract the empty set
        total += 2 ** (cycles + 1) - 1
    assert total % G.order() == 0
    return total // G.order()


@pytest.mark.parametrize("name", ["A", "A*", "F", "F*", "Fhat", "Q", "Q*"])
def test_orbit_counts_against_burnside(name):
    G = automorphism_group(catalog(name))
    orbs = orbits(G, 7)
    assert len(orbs) == burnside(G, 7)
    assert sorted(S for o in orbs for S in o) == list(range(1, 256))
    assert len(symmetry_equalities(G, 8, 7)) == 255 - len(orbs)


def test_symmetry_equalities_examples():
    assert symmetry_equalities(Group.trivial(7), 8, 7) == []
    G = close([Permutation.parse("(12)", 2)])
    rows = symmetry_equalities(G, 3, 2)
    assert {frozenset(r.expr.terms.items()) for r in rows} == {
        frozenset({(m(1), 1), (m(2), -1)}), frozenset({(m(0, 1), 1), (m(0, 2), -1)})}
    assert all(r.tag is Tag.SYMMETRY for r in rows)


def test_symmetry_rows_never_touch_copy_coordinates():
    G = automorphism_group(catalog("A"))
    for row in symmetry_equalities(G, 12, 7):
        assert all(S < 256 for S in row.expr.terms)


def test_orbit_quotient_examples():
    G = close([Permutation.parse("(12)", 2)])
    assert orbit_quotient(G, 3, 2)[m(2)] == m(1)
    trivial = orbit_quotient(Group.trivial(7), 8, 7)
    assert all(S == T for S, T in trivial.items())
    rep = orbit_quotient(automorphism_group(catalog("A")), 12, 7)
    assert rep[m(5)] == m(3)
    assert rep[m(6)] == m(3)
    assert rep[m(5, 8)] == m(5, 8)


def test_orbit_representative_is_invariant():
    G = automorphism_group(catalog("F"))
    rep = orbit_quotient(G, 8, 7)
    for S in range(1, 256):
        assert all(rep[g.act(S)] == rep[S] for g in G)
        assert rep[S] <= S
