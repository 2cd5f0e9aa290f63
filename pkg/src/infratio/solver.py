"""Exact LP solving and certificate checking.

``solve_exact`` works in three stages:

1. presolve: every equality row is used to eliminate one column (Gaussian
   substitution), inequality rows are rewritten over the remaining free
   columns and syntactic duplicates dropped;
2. the reduced program ``min c.z  s.t.  a_i.z + k_i >= 0`` is solved through
   its dual ``max -k.y  s.t.  sum y_i a_i = c, y >= 0`` with a two-phase
   revised simplex in exact rational arithmetic;
3. postsolve maps the dual back to weights on the original rows, so the
   returned certificate can be checked against the unreduced problem.

Every phase-2 basis is dual feasible, so a run that hits its time budget
still returns a valid (if weaker) bound.
"""

from __future__ import annotations

import enum
import math
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping

import flint

from .entropy import X_COL, Constraint, LinExpr, Relation
from .lp import Certificate, LpProblem, SolverOutput, import_solution


class Status(str, enum.Enum):
    OPTIMAL = "optimal"
    INFEASIBLE = "infeasible"
    UNBOUNDED = "unbounded"
    BUDGET = "budget_exceeded"


class PivotRule(str, enum.Enum):
    BLAND = "bland"
    DANTZIG = "dantzig"


@dataclass
class SolveResult:
    status: Status
    value: Fraction | None
    primal: dict[int, Fraction] | None
    certificate: Certificate | None
    iterations: int = 0
    reduced_size: tuple[int, int] = (0, 0)

    @property
    def ok(self) -> bool:
        return self.status is Status.OPTIMAL


class SolverError(RuntimeError):
    pass


# --- presolve ------------------------------------------------------------

@dataclass
class Reduced:
    """The free-column program left after eliminating equalities."""

    rows: list[dict[int, Fraction]]          # reduced inequality terms
    consts: list[Fraction]                   # reduced inequality constants k_i
    origin: list[tuple[str, Fraction]]       # (original row, scale s): reduced = G'/s
    objective: dict[int, Fraction]
    obj_const: Fraction
    subst: dict[int, dict[int, Fraction]]    # L_c terms (coefficient 1 on c)
    subst_const: dict[int, Fraction]
    mu: dict[int, dict[str, Fraction]]       # L_c as a combination of equality rows
    order: list[int]                         # elimination order
    infeasible: Certificate | None = None
    reduced_of: dict[str, int] = field(default_factory=dict)

    @property
    def free_columns(self) -> list[int]:
        cols = set(self.objective)
        for r in self.rows:
            cols.update(r)
        return sorted(cols)


def _axpy(dst: dict, a, src: Mapping) -> None:
    """dst += a * src, dropping zeros."""
    for k, v in src.items():
        s = dst.get(k, 0) + a * v
        if s:
            dst[k] = s
        else:
            dst.pop(k, None)


def _reduce(terms: Mapping[int, Fraction], const, subst, subst_const):
    out = dict(terms)
    c = const
    for col in [k for k in out if k in subst]:
        coef = out.get(col)
        if not coef:
            continue
        del out[col]
        _axpy(out, -coef, subst[col])
        c -= coef * subst_const[col]
    return out, c


def _pick_pivot(terms: Mapping[int, Fraction]) -> int:
    cands = [k for k in terms if k != X_COL] or list(terms)
    unit = [k for k in cands if abs(terms[k]) == 1]
    return max(unit or cands)


def presolve(p: LpProblem) -> Reduced:
    subst: dict[int, dict[int, Fraction]] = {}
    subst_const: dict[int, Fraction] = {}
    mu: dict[int, dict[str, Fraction]] = {}
    uses: dict[int, set[int]] = {}
    order: list[int] = []
    ge_rows: list[tuple[str, Constraint]] = []
    infeasible = None

    for name, row in p.iter_rows():
        if row.relation is Relation.GE:
            ge_rows.append((name, row))
            continue
        if infeasible is not None:
            continue
        terms = dict(row.expr.terms)
        const = Fraction(row.expr.constant)
        comb: dict[str, Fraction] = {name: Fraction(1)}
        for col in [k for k in terms if k in subst]:
            coef = terms.get(col)
            if coef:
                _axpy(terms, -coef, subst[col])
                const -= coef * subst_const[col]
                _axpy(comb, -coef, mu[col])
        if not terms:
            if const:
                # sum(comb * E) is the nonzero constant `const`; scale it to -1
                infeasible = Certificate(
                    Fraction(0), {k: -v / const for k, v in comb.items()}, "infeasible")
            continue
        c = _pick_pivot(terms)
        piv = terms[c]
        inv = 1 / Fraction(piv)
        L = {k: v * inv for k, v in terms.items()}
        Lc = const * inv
        m = {k: v * inv for k, v in comb.items()}
        # keep every stored L free of the new pivot
        for d in list(uses.get(c, ())):
            Ld = subst[d]
            coef = Ld.get(c)
            if not coef:
                continue
            _axpy(Ld, -coef, L)
            subst_const[d] -= coef * Lc
            _axpy(mu[d], -coef, m)
            for k in L:
                if k != c:
                    uses.setdefault(k, set()).add(d)
        uses.pop(c, None)
        L_rest = {k: v for k, v in L.items() if k != c}
        subst[c] = L  # includes c itself with coefficient 1
        subst_const[c] = Lc
        mu[c] = m
        for k in L_rest:
            uses.setdefault(k, set()).add(c)
        order.append(c)

    # subst[c] currently stores L_c including c; the reduction needs c -> rest
    rest = {c: {k: v for k, v in L.items() if k != c} for c, L in subst.items()}

    rows: list[dict[int, Fraction]] = []
    consts: list[Fraction] = []
    origin: list[tuple[str, Fraction]] = []
    reduced_of: dict[str, int] = {}
    seen: dict[tuple, int] = {}
    for name, row in ge_rows:
        terms, const = _reduce(row.expr.terms, Fraction(row.expr.constant), rest, subst_const)
        if not terms:
            if const < 0 and infeasible is None:
                infeasible = _trivial_farkas(name, const, row, rest, subst_const, mu)
            continue
        lead = terms[min(terms)]
        s = abs(Fraction(lead))
        norm = {k: Fraction(v) / s for k, v in terms.items()}
        nconst = const / s
        key = (tuple(sorted(norm.items())), nconst)
        if key in seen:
            reduced_of[name] = seen[key]
            continue
        seen[key] = len(rows)
        reduced_of[name] = len(rows)
        rows.append(norm)
        consts.append(nconst)
        origin.append((name, s))

    obj, obj_const = _reduce({X_COL: Fraction(1)}, Fraction(0), rest, subst_const)
    red = Reduced(rows, consts, origin, obj, obj_const, rest, subst_const, mu, order,
                  infeasible, reduced_of)
    return red


def _trivial_farkas(name, const, row, rest, subst_const, mu) -> Certificate:
    # G reduces to the negative constant: G - sum G(c) L_c = const
    weights = {name: Fraction(1)}
    for col, coef in row.expr.terms.items():
        if col in rest:
            _axpy(weights, -coef, mu[col])
    scale = 1 / abs(const)
    return Certificate(Fraction(0), {k: v * scale for k, v in weights.items()}, "infeasible")


def postsolve(p: LpProblem, red: Reduced, weights: Mapping[int, Fraction],
              kind: str = "bound") -> Certificate:
    """Lift reduced-row weights to a certificate on the original rows."""
    W: dict[str, Fraction] = {}
    for i, w in weights.items():
        if w:
            name, s = red.origin[i]
            W[name] = W.get(name, 0) + Fraction(w) / s
    return complete_equalities(p, red, W, kind)


def complete_equalities(p: LpProblem, red: Reduced, W: Mapping[str, Fraction],
                        kind: str = "bound") -> Certificate:
    """Add equality-row weights so every eliminated column cancels."""
    total = LinExpr()
    for name, w in W.items():
        total = total + p.row(name).expr.scale(w)
    target = {X_COL: 1} if kind == "bound" else {}
    diff = dict(total.terms)
    _axpy(diff, -1, target)
    weights: dict[str, Fraction] = dict(W)
    for col, coef in diff.items():
        if col in red.mu:
            _axpy(weights, -coef, red.mu[col])
    cert = Certificate(Fraction(0), {k: v for k, v in weights.items() if v}, kind)
    combo = combine(p, cert.dual_weights)
    cert.bound = -Fraction(combo.constant) if kind == "bound" else Fraction(0)
    return cert


# --- the exact revised simplex --------------------------------------------

@dataclass
class _DualLp:
    """min cost.y  s.t.  M y = rhs, y >= 0 (M given by sparse columns)."""

    cols: list[dict[int, Fraction]]
    cost: list[Fraction]
    rhs: list[Fraction]


class _Budget(Exception):
    pass


def _num(q):
    q = Fraction(q)
    return flint.fmpq(q.numerator, q.denominator)


def _frac(q) -> Fraction:
    return Fraction(int(q.p), int(q.q))


def _phase1_cost(nreal: int, m: int) -> list:
    return [_num(0)] * nreal + [_num(1)] * m


def _phase2_cost(dlp: "_DualLp", m: int) -> list:
    return [_num(c) for c in dlp.cost] + [_num(0)] * m


class _Simplex:
    def __init__(self, lp: _DualLp, rule: PivotRule, deadline: float | None,
                 degenerate_switch: int = 50):
        self.lp = lp
        self.m = len(lp.rhs)
        self.rule = rule
        self.deadline = deadline
        self.degenerate_switch = degenerate_switch
        self.iterations = 0
        self.sign = [1 if b >= 0 else -1 for b in lp.rhs]
        nreal = len(lp.cols)
        self.nreal = nreal
        one = _num(1)
        # equations with negative rhs are negated; column j of M is flipped accordingly
        self.cols = [{r: _num(v * self.sign[r]) for r, v in col.items()} for col in lp.cols]
        for r in range(self.m):
            self.cols.append({r: one})  # artificial for equation r
        self.beta = [_num(abs(b)) for b in lp.rhs]
        self.basis = list(range(nreal, nreal + self.m))
        self.where = {j: k for k, j in enumerate(self.basis)}
        self.binv: list[dict] = [{r: one} for r in range(self.m)]
        self.seen_bases: set | None = None

    def _check_time(self):
        if self.deadline is not None and time.monotonic() > self.deadline:
            raise _Budget

    def _prices(self, cost):
        pi: dict[int, Fraction] = {}
        for k, j in enumerate(self.basis):
            cj = cost[j]
            if cj:
                _axpy(pi, cj, self.binv[k])
        return pi

    def _direction(self, j):
        col = self.cols[j]
        u = []
        for k in range(self.m):
            row = self.binv[k]
            s = 0
            for r, v in col.items():
                b = row.get(r)
                if b:
                    s += b * v
            u.append(s)
        return u

    def _pivot(self, k, j, u):
        piv = u[k]
        inv = 1 / piv
        rowk = {r: v * inv for r, v in self.binv[k].items()}
        self.binv[k] = rowk
        bk = self.beta[k] * inv
        self.beta[k] = bk
        for i in range(self.m):
            ui = u[i]
            if i != k and ui:
                _axpy(self.binv[i], -ui, rowk)
                self.beta[i] -= ui * bk
        old = self.basis[k]
        del self.where[old]
        self.basis[k] = j
        self.where[j] = k
        self.iterations += 1

    def run(self, cost, allowed) -> str:
        """Minimise ``cost``; returns 'optimal' or 'unbounded' (ray kept)."""
        degenerate = 0
        while True:
            self._check_time()
            pi = self._prices(cost)
            use_bland = self.rule is PivotRule.BLAND or degenerate >= self.degenerate_switch
            enter, best = None, 0
            for j in allowed:
                if j in self.where:
                    continue
                d = cost[j]
                for r, v in self.cols[j].items():
                    pr = pi.get(r)
                    if pr:
                        d -= pr * v
                if d < 0:
                    if use_bland:
                        enter = j
                        break
                    if d < best:
                        best, enter = d, j
            if enter is None:
                return "optimal"
            u = self._direction(enter)
            leave, ratio = None, None
            for k in range(self.m):
                if u[k] > 0:
                    t = self.beta[k] / u[k]
                    if (ratio is None or t < ratio or
                            (t == ratio and self.basis[k] < self.basis[leave])):
                        ratio, leave = t, k
            if leave is None:
                self.ray = (enter, u)
                return "unbounded"
            degenerate = degenerate + 1 if ratio == 0 else 0
            if self.seen_bases is not None:
                key = frozenset(self.basis)
                if key in self.seen_bases:
                    raise SolverError("cycling detected: a basis repeated")
                self.seen_bases.add(key)
            self._pivot(leave, enter, u)

    def drive_out_artificials(self):
        for k in range(self.m):
            j = self.basis[k]
            if j < self.nreal:
                continue
            row = self.binv[k]
            for q in range(self.nreal):
                if q in self.where:
                    continue
                s = 0
                for r, v in self.cols[q].items():
                    b = row.get(r)
                    if b:
                        s += b * v
                if s:
                    self._pivot(k, q, self._direction(q))
                    break

    def ray_weights(self) -> dict[int, Fraction]:
        enter, u = self.ray
        ray = {enter: Fraction(1)}
        for k, j in enumerate(self.basis):
            if u[k] and j < self.nreal:
                ray[j] = -_frac(u[k])
        return ray

    def values(self) -> dict[int, Fraction]:
        return {j: _frac(self.beta[k]) for k, j in enumerate(self.basis)
                if j < self.nreal and self.beta[k]}


def _build_dual(red: Reduced) -> tuple[_DualLp, list[int]]:
    free = red.free_columns
    index = {c: i for i, c in enumerate(free)}
    cols = [{index[c]: Fraction(v) for c, v in row.items()} for row in red.rows]
    cost = [Fraction(k) for k in red.consts]  # min k.y  ==  max -k.y
    rhs = [Fraction(red.objective.get(c, 0)) for c in free]
    return _DualLp(cols, cost, rhs), free


def solve_exact(p: LpProblem, budget: float | None = None,
                rule: PivotRule | str = PivotRule.DANTZIG, check_cycles: bool = False) -> SolveResult:
    """Exact optimum, primal point and verified certificate of ``p``.

    ``budget`` is a wall-clock limit in seconds.  With the Dantzig rule the
    solver falls back to Bland's rule after a run of degenerate pivots, so
    termination is guaranteed under either rule.
    """
    rule = PivotRule(rule)
    deadline = None if budget is None else time.monotonic() + budget
    red = presolve(p)
    size = (len(red.rows), len(red.free_columns))
    if red.infeasible is not None:
        return SolveResult(Status.INFEASIBLE, None, None, red.infeasible, 0, size)
    dlp, free = _build_dual(red)
    sx = _Simplex(dlp, rule, deadline)
    if check_cycles:
        sx.seen_bases = set()
    nreal = sx.nreal
    try:
        sx.run(_phase1_cost(nreal, sx.m), range(nreal + sx.m))
        if any(sx.beta[k] for k, j in enumerate(sx.basis) if j >= nreal):
            # no dual solution: the primal is unbounded or infeasible
            return _unbounded_or_infeasible(p, red, size, sx.iterations, budget, deadline)
        sx.drive_out_artificials()
        cost = _phase2_cost(dlp, sx.m)
        status = sx.run(cost, range(nreal))
    except _Budget:
        return _partial(p, red, sx, size)
    if status == "unbounded":
        ray = sx.ray_weights()
        cert = postsolve(p, red, ray, "infeasible")
        cert = _normalize_farkas(p, cert)
        return SolveResult(Status.INFEASIBLE, None, None, cert, sx.iterations, size)
    y = sx.values()
    cert = postsolve(p, red, y)
    value = red.obj_const - sum(dlp.cost[j] * v for j, v in y.items())
    pi = sx._prices(cost)
    z = {c: -sx.sign[i] * _frac(pi[i]) if i in pi else Fraction(0) for i, c in enumerate(free)}
    primal = _expand_primal(p, red, z)
    if cert.bound != value:
        raise SolverError(f"certificate bound {cert.bound} differs from optimum {value}")
    return SolveResult(Status.OPTIMAL, value, primal, cert, sx.iterations, size)


def _partial(p, red, sx, size) -> SolveResult:
    nreal = sx.nreal
    if any(j >= nreal and sx.beta[k] for k, j in enumerate(sx.basis)):
        return SolveResult(Status.BUDGET, None, None, None, sx.iterations, size)
    y = sx.values()
    cert = postsolve(p, red, y)
    return SolveResult(Status.BUDGET, cert.bound, None, cert, sx.iterations, size)


def _unbounded_or_infeasible(p, red, size, iterations, budget, deadline) -> SolveResult:
    # With a zero objective the dual is feasible (y = 0); it is unbounded
    # exactly when the primal is infeasible.
    zero = Reduced(red.rows, red.consts, red.origin, {}, Fraction(0), red.subst,
                   red.subst_const, red.mu, red.order, None, red.reduced_of)
    dlp, _ = _build_dual(zero)
    sx = _Simplex(dlp, PivotRule.DANTZIG, deadline)
    nreal = sx.nreal
    try:
        sx.run(_phase1_cost(nreal, sx.m), range(nreal + sx.m))
        sx.drive_out_artificials()
        status = sx.run(_phase2_cost(dlp, sx.m), range(nreal))
    except _Budget:
        return SolveResult(Status.BUDGET, None, None, None, iterations, size)
    if status == "unbounded":
        ray = sx.ray_weights()
        cert = _normalize_farkas(p, postsolve(p, zero, ray, "infeasible"))
        return SolveResult(Status.INFEASIBLE, None, None, cert, iterations + sx.iterations, size)
    return SolveResult(Status.UNBOUNDED, None, None, None, iterations + sx.iterations, size)


def _normalize_farkas(p: LpProblem, cert: Certificate) -> Certificate:
    c = combine(p, cert.dual_weights).constant
    if c < 0:
        s = 1 / abs(Fraction(c))
        cert.dual_weights = {k: v * s for k, v in cert.dual_weights.items()}
    return cert


def _expand_primal(p: LpProblem, red: Reduced, z: dict[int, Fraction]) -> dict[int, Fraction]:
    vals = {c: Fraction(0) for c in p.columns}
    vals.update(z)
    # a column eliminated later only references columns still free at that point
    for c in reversed(red.order):
        v = -red.subst_const[c]
        for k, a in red.subst[c].items():
            v -= a * vals[k]
        vals[c] = v
    return vals


# --- verification --------------------------------------------------------

@dataclass
class Verification:
    ok: bool
    reason: str = ""

    def __bool__(self) -> bool:
        return self.ok


def combine(p: LpProblem, weights: Mapping[str, Fraction]) -> LinExpr:
    """sum of weight * row expression."""
    terms: dict[int, Fraction] = {}
    const = Fraction(0)
    for name, w in weights.items():
        if not w:
            continue
        row = p.row(name)
        _axpy(terms, w, row.expr.terms)
        const += w * row.expr.constant
    return LinExpr._raw(terms, const)


def _check_signs(p: LpProblem, weights: Mapping[str, Fraction]) -> Verification:
    for name, w in weights.items():
        if not p.has_row(name):
            return Verification(False, f"unknown row {name!r}")
        if w < 0 and p.row(name).relation is Relation.GE:
            return Verification(False, f"negative weight {w} on inequality row {name}")
    return Verification(True)


def verify_certificate(p: LpProblem, c: Certificate) -> Verification:
    """Exact check that the weighted rows add up to ``x - bound``."""
    try:
        weights = {k: Fraction(v) for k, v in c.dual_weights.items()}
    except (TypeError, ValueError) as exc:
        return Verification(False, f"non-rational weight: {exc}")
    v = _check_signs(p, weights)
    if not v:
        return v
    combo = combine(p, weights)
    if c.kind == "infeasible":
        for col, coef in sorted(combo.terms.items()):
            return Verification(False, f"column {p.column_name(col)} does not cancel ({coef})")
        if combo.constant >= 0:
            return Verification(False, "combination is not contradictory")
        return Verification(True, "infeasibility proven")
    for col, coef in sorted(combo.terms.items()):
        if col == X_COL:
            continue
        return Verification(False, f"column {p.column_name(col)} does not cancel ({coef})")
    if combo.terms.get(X_COL, 0) != 1:
        return Verification(False, f"coefficient of x is {combo.terms.get(X_COL, 0)}, expected 1")
    if -combo.constant != Fraction(c.bound):
        return Verification(False, f"combination proves x >= {-combo.constant}, not {c.bound}")
    return Verification(True, f"x >= {c.bound}")


# --- hybrid: float duals from an external solver, made exact --------------

class HybridError(SolverError):
    pass


def hybrid_solve(p: LpProblem, solution, cap: int = 10 ** 6,
                 tolerances: Iterable[float] = (1e-9, 1e-12, 1e-7),
                 red: Reduced | None = None) -> Certificate:
    """Turn an external float solution into an exactly verified certificate.

    First the rationalised duals are tried as they are; otherwise the exact
    dual is recomputed on the support of the float dual.
    """
    out = solution if isinstance(solution, SolverOutput) else import_solution(p, solution, cap)
    if not out.dual:
        raise HybridError("solver output carries no dual values")
    weights = {k: v for k, v in out.dual.items() if v}
    combo = combine(p, weights)
    direct = Certificate(-Fraction(combo.constant), weights)
    if _check_signs(p, weights) and verify_certificate(p, direct):
        return direct
    if red is None:
        red = presolve(p)
    if red.infeasible is not None:
        raise HybridError("presolve proves the problem infeasible")
    peak = max((abs(v) for v in out.raw_dual.values()), default=0.0) or 1.0
    last = "no tolerance tried"
    for tol in tolerances:
        support = sorted({red.reduced_of[name] for name, v in out.raw_dual.items()
                          if abs(v) > tol * peak and name in red.reduced_of})
        try:
            y = solve_support(red, support)
        except HybridError as exc:
            last = str(exc)
            continue
        cert = postsolve(p, red, y)
        check = verify_certificate(p, cert)
        if check:
            return cert
        last = check.reason
    raise HybridError(f"could not repair the float dual: {last}")


def solve_support(red: Reduced, support: list[int]) -> dict[int, Fraction]:
    """Exact y >= 0 on ``support`` with sum y_i a_i = c over the free columns."""
    from .exactla import solve_sparse_system

    free = red.free_columns
    index = {c: i for i, c in enumerate(free)}
    cols = [{index[c]: v for c, v in red.rows[i].items()} for i in support]
    rhs = {index[c]: Fraction(v) for c, v in red.objective.items()}
    sol = solve_sparse_system(cols, rhs, len(free))
    if sol is None:
        raise HybridError(f"support system with {len(support)} rows is inconsistent")
    y = {support[k]: v for k, v in sol.items() if v}
    neg = [v for v in y.values() if v < 0]
    if neg:
        raise HybridError(f"exact support dual has {len(neg)} negative entries")
    return y


def decimal6(q: Fraction) -> str:
    """Six decimals, truncated toward zero; "..." marks an inexact rendering."""
    q = Fraction(q)
    sign = "-" if q < 0 else ""
    a = abs(q)
    scaled = a * 10 ** 6
    whole = math.floor(scaled)
    tail = "" if whole == scaled else "..."
    return f"{sign}{whole // 10 ** 6}.{whole % 10 ** 6:06d}{tail}"
