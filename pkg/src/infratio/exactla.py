"""Exact solution of sparse rational linear systems.

Singleton equations are peeled off in pure Python; what remains is solved
with FLINT: a modular rank profile picks a nonsingular square block and the
block is solved over the rationals.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Mapping, Sequence

import flint

_PRIME = 2 ** 61 - 1


def _peel(cols: list[dict[int, Fraction]], rhs: dict[int, Fraction], m: int):
    """Fix variables forced by equations that mention exactly one free variable."""
    by_eq: dict[int, set[int]] = {i: set() for i in range(m)}
    for j, col in enumerate(cols):
        for i in col:
            by_eq[i].add(j)
    rhs = dict(rhs)
    fixed: dict[int, Fraction] = {}
    stack = [i for i, js in by_eq.items() if len(js) == 1]
    while stack:
        i = stack.pop()
        js = by_eq[i]
        if len(js) != 1:
            continue
        (j,) = js
        v = Fraction(rhs.get(i, 0)) / cols[j][i]
        fixed[j] = v
        for e, a in cols[j].items():
            by_eq[e].discard(j)
            rhs[e] = rhs.get(e, 0) - a * v
            if len(by_eq[e]) == 1:
                stack.append(e)
    return fixed, rhs, by_eq


def _pivots(rows: list[list[int]], ncols: int) -> list[int]:
    """Pivot columns of the row-reduced form modulo a large prime."""
    if not rows or not ncols:
        return []
    M = flint.nmod_mat(rows, _PRIME)
    R, rank = M.rref()
    out = []
    tab = R.tolist()
    for k in range(rank):
        row = tab[k]
        for c in range(ncols):
            if int(row[c]):
                out.append(c)
                break
    return out


def solve_sparse_system(cols: Sequence[Mapping[int, Fraction]], rhs: Mapping[int, Fraction],
                        m: int) -> dict[int, Fraction] | None:
    """Some exact solution of ``sum_j y_j cols[j] = rhs`` (m equations).

    Returns None when no solution exists.  Free directions are set to zero.
    """
    cols = [{i: Fraction(v) for i, v in c.items() if v} for c in cols]
    fixed, rest, by_eq = _peel(cols, {i: Fraction(v) for i, v in rhs.items()}, m)
    live_vars = sorted({j for js in by_eq.values() for j in js} - set(fixed))
    live_eqs = sorted(i for i in range(m) if by_eq[i])
    sol = dict(fixed)
    if live_vars:
        vidx = {j: k for k, j in enumerate(live_vars)}
        eidx = {i: k for k, i in enumerate(live_eqs)}
        # integer columns: scale each variable by its denominator LCM
        scale = [math.lcm(*(cols[j][i].denominator for i in cols[j] if i in eidx) or [1])
                 for j in live_vars]
        dense = [[0] * len(live_vars) for _ in live_eqs]
        for j in live_vars:
            k = vidx[j]
            for i, a in cols[j].items():
                if i in eidx:
                    dense[eidx[i]][k] = int(a * scale[k])
        var_piv = _pivots([[x % _PRIME for x in r] for r in dense], len(live_vars))
        sub_t = [[dense[e][k] % _PRIME for e in range(len(live_eqs))] for k in var_piv]
        eq_piv = _pivots(sub_t, len(live_eqs))
        if len(eq_piv) != len(var_piv):
            return None
        A = flint.fmpq_mat([[dense[e][k] for k in var_piv] for e in eq_piv])
        b = flint.fmpq_mat([[_fmpq(rest.get(live_eqs[e], 0))] for e in eq_piv])
        x = A.solve(b)
        for t, k in enumerate(var_piv):
            q = x[t, 0]
            v = Fraction(int(q.p), int(q.q)) * scale[k]
            if v:
                sol[live_vars[k]] = v
    # exact residual check of every original equation
    resid = {i: Fraction(v) for i, v in rhs.items() if v}
    for j, v in sol.items():
        for i, a in cols[j].items():
            r = resid.get(i, 0) - a * v
            if r:
                resid[i] = r
            else:
                resid.pop(i, None)
    return sol if not resid else None


def _fmpq(q: Fraction):
    q = Fraction(q)
    return flint.fmpq(q.numerator, q.denominator)
