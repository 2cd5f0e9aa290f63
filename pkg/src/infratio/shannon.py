"""Elemental Shannon inequalities.

The elemental family for an n-element ground set is

* H(X_i | X_rest) >= 0 for every i, and
* I(X_i : X_j | X_K) >= 0 for every pair i < j and every K avoiding i, j,

which generates the whole Shannon cone.  Rows come out in a fixed order:
the conditional entropies by i, then the mutual informations by
(i, j, K as an integer).  Row k can be computed directly from its position,
which keeps the n = 16 family (almost two million rows) out of memory.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Iterator, Sequence

import numpy as np

from .entropy import MAX_GROUND, Constraint, ContractError, LinExpr, Relation, Tag


def elemental_count(n: int) -> int:
    _check_n(n)
    return n + math.comb(n, 2) * (1 << (n - 2)) if n >= 2 else n


def _check_n(n: int) -> None:
    if not 1 <= n <= MAX_GROUND:
        raise ContractError(f"ground-set size must be in [1, {MAX_GROUND}], got {n}")


def _deposit(t: int, rest: int) -> int:
    """Spread the bits of ``t`` over the set bits of ``rest`` (pdep)."""
    out = 0
    while t:
        low = rest & -rest
        if t & 1:
            out |= low
        rest ^= low
        t >>= 1
    return out


def _pairs(n: int) -> list[tuple[int, int]]:
    return [(i, j) for i in range(n) for j in range(i + 1, n)]


def elemental_terms(n: int, k: int) -> dict[int, int]:
    """Coefficient map of elemental row ``k`` (0-based, canonical order)."""
    full = (1 << n) - 1
    if k < n:
        rest = full ^ (1 << k)
        return {full: 1, rest: -1} if rest else {full: 1}
    k -= n
    block = 1 << (n - 2)
    p, t = divmod(k, block)
    # p-th pair in lexicographic order
    i = 0
    while p >= n - 1 - i:
        p -= n - 1 - i
        i += 1
    j = i + 1 + p
    bi, bj = 1 << i, 1 << j
    K = _deposit(t, full ^ bi ^ bj)
    terms = {K | bi: 1, K | bj: 1, K | bi | bj: -1}
    if K:
        terms[K] = -1
    return terms


def iter_elemental_terms(n: int) -> Iterator[dict[int, int]]:
    _check_n(n)
    full = (1 << n) - 1
    for i in range(n):
        rest = full ^ (1 << i)
        yield {full: 1, rest: -1} if rest else {full: 1}
    for i, j in _pairs(n):
        bi, bj = 1 << i, 1 << j
        rest = full ^ bi ^ bj
        K = 0
        while True:
            terms = {K | bi: 1, K | bj: 1, K | bi | bj: -1}
            if K:
                terms[K] = -1
            yield terms
            K = (K - rest) & rest
            if K == 0:
                break


def iter_elemental(n: int) -> Iterator[Constraint]:
    for terms in iter_elemental_terms(n):
        yield Constraint(LinExpr._raw(terms), Relation.GE, Tag.ELEMENTAL)


def elemental_inequalities(n: int) -> list[Constraint]:
    """All elemental inequalities for ``n`` variables, canonical order."""
    return list(iter_elemental(n))


class ElementalRows(Sequence):
    """Read-only, lazily materialised view of the elemental family."""

    def __init__(self, n: int):
        _check_n(n)
        self.n = n
        self._len = elemental_count(n)

    def __len__(self) -> int:
        return self._len

    def __getitem__(self, k):
        if isinstance(k, slice):
            return [self[i] for i in range(*k.indices(self._len))]
        if k < 0:
            k += self._len
        if not 0 <= k < self._len:
            raise IndexError(k)
        return Constraint(LinExpr._raw(elemental_terms(self.n, k)), Relation.GE, Tag.ELEMENTAL)

    def __iter__(self) -> Iterator[Constraint]:
        return iter_elemental(self.n)


def elemental_arrays(n: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """COO triplets ``(row, column_mask, coefficient)`` of the elemental family.

    Same row order as :func:`iter_elemental`; within a row the entries are
    listed as ``h_full, -h_rest`` or ``h_Ki, h_Kj, -h_Kij, -h_K``.
    """
    _check_n(n)
    full = (1 << n) - 1
    rows, cols, vals = [], [], []
    single = np.arange(n, dtype=np.int64)
    rest = full ^ (1 << single)
    rows.append(single)
    cols.append(np.full(n, full, dtype=np.int64))
    vals.append(np.ones(n, dtype=np.int8))
    keep = rest != 0
    rows.append(single[keep])
    cols.append(rest[keep])
    vals.append(-np.ones(int(keep.sum()), dtype=np.int8))
    if n >= 2:
        block = 1 << (n - 2)
        t = np.arange(block, dtype=np.int64)
        offset = n
        for i, j in _pairs(n):
            bi, bj = 1 << i, 1 << j
            # insert zero bits at positions i and j (i < j) into t
            low = t & (bi - 1)
            mid = (t >> i) & ((1 << (j - 1 - i)) - 1)
            high = t >> (j - 1)
            K = low | (mid << (i + 1)) | (high << (j + 1))
            r = offset + t
            rows += [r, r, r]
            cols += [K | bi, K | bj, K | bi | bj]
            vals += [np.ones(block, np.int8), np.ones(block, np.int8), -np.ones(block, np.int8)]
            nz = K != 0
            rows.append(r[nz])
            cols.append(K[nz])
            vals.append(-np.ones(int(nz.sum()), np.int8))
            offset += block
    return np.concatenate(rows), np.concatenate(cols), np.concatenate(vals)


def is_shannon_feasible(v: Sequence, n: int | None = None) -> bool:
    """Exact check of every elemental inequality.

    ``v`` has length 2**n - 1 with ``v[S - 1]`` holding h_S.
    """
    size = len(v)
    if n is None:
        n = (size + 1).bit_length() - 1
    _check_n(n)
    if size != (1 << n) - 1:
        raise ContractError(f"expected {(1 << n) - 1} coordinates, got {size}")
    fr = [Fraction(x) for x in v]
    den = math.lcm(*(f.denominator for f in fr)) if fr else 1
    ints = [f.numerator * (den // f.denominator) for f in fr]
    h = [0] + ints
    if max(map(abs, ints), default=0) < 1 << 58:
        arr = np.asarray(h, dtype=np.int64)
        rows, cols, vals = elemental_arrays(n)
        lhs = np.zeros(elemental_count(n), dtype=np.int64)
        np.add.at(lhs, rows, arr[cols] * vals)
        return bool((lhs >= 0).all())
    return all(sum(c * h[m] for m, c in terms.items()) >= 0 for terms in iter_elemental_terms(n))
