import math
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from entropy_oracle import binary_distributions, direct_cmi, entropy_vector
from infratio.entropy import (ContractError, GroundSet, LinExpr, cmi, coord_index, coord_subset,
                              entropy, mask_of, subsets)


def m(*idx):
    return mask_of(idx)


def test_coord_index_examples():
    assert coord_index(m(0), 3) == 1
    assert coord_index(m(0, 1, 2), 3) == 7
    assert coord_index(m(2), 3) == 4


def test_coord_index_rejects_empty_and_oversized():
    with pytest.raises(ContractError):
        coord_index(0, 3)
    with pytest.raises(ContractError):
        coord_index(m(3), 3)


def test_coord_index_round_trips_exhaustively():
    n = 12
    seen = set()
    for S in range(1, 1 << n):
        i = coord_index(S, n)
        assert 1 <= i <= (1 << n) - 1
        assert coord_subset(i, n) == S
        seen.add(i)
    assert len(seen) == (1 << n) - 1


def test_entropy_expressions():
    assert entropy(m(1, 2)).terms == {m(1, 2): 1}
    assert entropy(0).is_zero()
    assert entropy(m(0)).terms == {1: 1}


def test_cmi_examples():
    assert cmi(m(1), m(2)).terms == {m(1): 1, m(2): 1, m(1, 2): -1}
    assert cmi(m(1), m(2), m(3)).terms == {m(1, 3): 1, m(2, 3): 1, m(3): -1, m(1, 2, 3): -1}
    assert cmi(m(1), m(1)).terms == {m(1): 1}


def test_cmi_symmetric_in_first_two_arguments():
    n = 5
    full = (1 << n) - 1
    for A in range(1, full + 1):
        for B in range(1, full + 1):
            for C in range(full + 1):
                assert cmi(A, B, C) + cmi(B, A, C) == cmi(A, B, C).scale(2)


def test_cmi_never_stores_zero_coefficients():
    for A in range(1, 16):
        for B in range(1, 16):
            for C in range(16):
                e = cmi(A, B, C)
                assert 0 not in e.terms and all(v for v in e.terms.values())


masks3 = st.integers(1, 7)


@given(st.lists(st.integers(0, 20), min_size=8, max_size=8).filter(any), masks3, masks3,
       st.integers(0, 7))
def test_cmi_matches_brute_force_distribution(weights, A, B, C):
    dist = binary_distributions(3, weights)
    v = [0.0] + entropy_vector(dist, 3)
    got = float(cmi(A, B, C).evaluate(v))
    idx = lambda S: [i for i in range(3) if S >> i & 1]
    want = direct_cmi(dist, idx(A), idx(B), idx(C))
    assert math.isclose(got, want, abs_tol=1e-9)


coeffs = st.fractions(min_value=-5, max_value=5, max_denominator=7)
exprs = st.builds(LinExpr, st.dictionaries(st.integers(1, 31), coeffs, max_size=6), coeffs)


@given(exprs, exprs, exprs)
def test_linexpr_addition_is_associative_and_commutative(a, b, c):
    assert (a + b) + c == a + (b + c)
    assert a + b == b + a
    assert (a - a).is_zero()


@given(exprs, coeffs)
def test_linexpr_scaling_has_no_zero_terms(a, q):
    s = a.scale(q)
    assert all(v != 0 for v in s.terms.values())
    if q == 0:
        assert s.is_zero()
    assert s.constant == a.constant * q


def test_linexpr_keeps_exact_rationals():
    e = LinExpr({1: Fraction(1, 3)}) + LinExpr({1: Fraction(2, 3)})
    assert e.terms == {1: 1}
    assert LinExpr({1: Fraction(1, 3)}) + LinExpr({1: Fraction(-1, 3)}) == LinExpr()


def test_ground_set_extension_is_stable():
    g = GroundSet.standard(7)
    assert g.names == tuple(str(i) for i in range(8))
    g2 = g.extended(["0'", "3'"])
    assert len(g2) == 10
    assert all(g2.index(s) == g.index(s) for s in g.names)
    assert g2.index("3'") == 9
    assert g2.mask(["0", "0'"]) == (1 | 1 << 8)
    assert g2.fresh_label("0") == "0''"


def test_ground_set_rejects_duplicates_and_bad_labels():
    with pytest.raises(ContractError):
        GroundSet(["0", "1", "1"])
    with pytest.raises(ContractError):
        GroundSet(["0", "a b"])


def test_ground_set_size_limit():
    with pytest.raises(ContractError):
        GroundSet(str(i) for i in range(21))


def test_subsets_enumerates_submasks():
    assert list(subsets(0b101)) == [0, 1, 4, 5]
    assert list(subsets(0b101, include_empty=False)) == [1, 4, 5]
