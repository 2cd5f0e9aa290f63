"""Independent dense tableau simplex over Fractions, used only as a test oracle.

Deliberately naive: free variables are split as x = x+ - x-, every row gets
a surplus or artificial column, two phases, Bland's rule throughout.  It
shares no code with the package solver.
"""

from fractions import Fraction


def dense_simplex(c, rows):
    """Minimise c.x over free x subject to rows.

    ``rows`` holds (coeffs, relation, rhs) with relation ">=" or "=", meaning
    coeffs.x >= rhs or coeffs.x = rhs.  Returns ("optimal", value, x),
    ("infeasible", None, None) or ("unbounded", None, None).
    """
    nv = len(c)
    m = len(rows)
    nsur = sum(1 for _, rel, _ in rows if rel == ">=")
    ncol = 2 * nv + nsur + m          # x+, x-, surplus, artificial
    T = []
    s = 0
    for i, (a, rel, b) in enumerate(rows):
        row = [Fraction(0)] * (ncol + 1)
        for j in range(nv):
            row[j] = Fraction(a[j])
            row[nv + j] = -Fraction(a[j])
        if rel == ">=":
            row[2 * nv + s] = Fraction(-1)
            s += 1
        row[-1] = Fraction(b)
        if row[-1] < 0:
            row = [-v for v in row]
        row[2 * nv + nsur + i] = Fraction(1)
        T.append(row)
    basis = [2 * nv + nsur + i for i in range(m)]
    art = set(basis)

    def pivot(r, q):
        pv = T[r][q]
        T[r] = [v / pv for v in T[r]]
        for i in range(m):
            if i != r and T[i][q]:
                f = T[i][q]
                T[i] = [a - f * b for a, b in zip(T[i], T[r])]
        basis[r] = q

    def optimise(cost, allowed):
        while True:
            red = []
            for j in range(ncol):
                d = cost[j] - sum(cost[basis[i]] * T[i][j] for i in range(m))
                red.append(d)
            q = next((j for j in range(ncol) if j in allowed and j not in basis and red[j] < 0), None)
            if q is None:
                return True
            best = None
            for i in range(m):
                if T[i][q] > 0:
                    t = T[i][-1] / T[i][q]
                    if best is None or t < best[0] or (t == best[0] and basis[i] < basis[best[1]]):
                        best = (t, i)
            if best is None:
                return False
            pivot(best[1], q)

    allc = set(range(ncol))
    phase1 = [Fraction(0)] * ncol
    for j in art:
        phase1[j] = Fraction(1)
    optimise(phase1, allc)
    if sum(T[i][-1] for i in range(m) if basis[i] in art) > 0:
        return "infeasible", None, None
    for i in range(m):
        if basis[i] in art:
            q = next((j for j in range(ncol) if j not in art and T[i][j] != 0), None)
            if q is not None:
                pivot(i, q)
    cost = [Fraction(0)] * ncol
    for j in range(nv):
        cost[j] = Fraction(c[j])
        cost[nv + j] = -Fraction(c[j])
    if not optimise(cost, allc - art):
        return "unbounded", None, None
    val = [Fraction(0)] * ncol
    for i in range(m):
        val[basis[i]] = T[i][-1]
    x = [val[j] - val[nv + j] for j in range(nv)]
    return "optimal", sum(Fraction(ci) * xi for ci, xi in zip(c, x)), x


def problem_rows(p):
    """Dense (c, rows) for an ``LpProblem`` (columns in ``p.columns`` order)."""
    from infratio.entropy import Relation

    index = {col: k for k, col in enumerate(p.columns)}
    c = [0] * len(p.columns)
    c[index[0]] = 1
    rows = []
    for _, row in p.iter_rows():
        a = [0] * len(p.columns)
        for col, v in row.expr.terms.items():
            a[index[col]] = v
        rel = ">=" if row.relation is Relation.GE else "="
        rows.append((a, rel, -Fraction(row.expr.constant)))
    return c, rows
