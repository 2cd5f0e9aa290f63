"""Assembly and file exchange for the information-ratio linear program.

The program minimises the ratio variable x (column 0) subject to

    x - h_i >= 0                 for every party i       (objective-link)
    elemental Shannon inequalities on the extended ground set
    scheme equalities            (one per nonempty party set)
    h_secret = 1                 (normalization)
    copy-lemma equalities
    symmetry equalities          (optional)

Rows are ``expr >= 0`` / ``expr = 0`` with exact coefficients.  Row names
are a tag code plus the index inside the block (``el123``, ``sc5``); column
names spell the sorted element labels (``h_0_3_4p``) with primes written as
``p``.
"""

from __future__ import annotations

import enum
import io
import json
import math
import re
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import IO, Iterator, Mapping, Sequence

import numpy as np

from .access import AccessStructure, automorphism_group, catalog, scheme_constraints
from .copylemma import CopySpec, apply_chain, parse_copy_chain
from .entropy import X_COL, Constraint, ContractError, GroundSet, LinExpr, Relation, Tag
from .shannon import ElementalRows, elemental_arrays
from .symmetry import Group, Permutation, close, orbit_quotient, symmetry_equalities


class SymmetryMode(str, enum.Enum):
    NONE = "none"
    EQUALITIES = "equalities"
    QUOTIENT = "quotient"


TAG_CODES = {
    Tag.OBJECTIVE_LINK: "sh",
    Tag.ELEMENTAL: "el",
    Tag.SCHEME: "sc",
    Tag.NORMALIZATION: "nm",
    Tag.COPY: "cp",
    Tag.SYMMETRY: "sy",
}
CODE_TAGS = {v: k for k, v in TAG_CODES.items()}
_ROW_RE = re.compile(r"^([a-z]{2})(\d+)$")


class NotASubgroupError(ContractError):
    """The requested symmetry group is not contained in the automorphism group."""


@dataclass
class RowBlock:
    tag: Tag
    rows: Sequence[Constraint]

    @property
    def code(self) -> str:
        return TAG_CODES[self.tag]


@dataclass
class LpProblem:
    ground: GroundSet
    parties: int
    columns: list[int]
    blocks: list[RowBlock]
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        self._colnames: dict[int, str] | None = None
        self._colindex: dict[str, int] | None = None
        self._blockmap = {b.code: b for b in self.blocks}

    @property
    def n(self) -> int:
        return len(self.ground)

    def num_rows(self) -> int:
        return sum(len(b.rows) for b in self.blocks)

    def tag_counts(self) -> dict[Tag, int]:
        c: Counter = Counter()
        for b in self.blocks:
            c[b.tag] += len(b.rows)
        return dict(c)

    def iter_rows(self) -> Iterator[tuple[str, Constraint]]:
        for b in self.blocks:
            code = b.code
            for k, row in enumerate(b.rows):
                yield f"{code}{k}", row

    def row_names(self) -> Iterator[str]:
        for b in self.blocks:
            for k in range(len(b.rows)):
                yield f"{b.code}{k}"

    def row(self, name: str) -> Constraint:
        m = _ROW_RE.match(name)
        if not m or m[1] not in self._blockmap:
            raise KeyError(name)
        rows = self._blockmap[m[1]].rows
        k = int(m[2])
        if k >= len(rows):
            raise KeyError(name)
        return rows[k]

    def has_row(self, name: str) -> bool:
        try:
            self.row(name)
        except KeyError:
            return False
        return True

    def block(self, tag: Tag) -> Sequence[Constraint]:
        b = self._blockmap.get(TAG_CODES[tag])
        return b.rows if b else []

    # --- column naming -------------------------------------------------
    def column_name(self, col: int) -> str:
        if col == X_COL:
            return "x"
        return "h_" + "_".join(lab.replace("'", "p") for lab in self.ground.labels(col))

    def column_names(self) -> dict[int, str]:
        if self._colnames is None:
            self._colnames = {c: self.column_name(c) for c in self.columns}
        return self._colnames

    def column_of(self, name: str) -> int:
        if self._colindex is None:
            self._colindex = {v: k for k, v in self.column_names().items()}
        try:
            return self._colindex[name]
        except KeyError:
            raise KeyError(f"unknown column {name!r}") from None

    def objective(self) -> LinExpr:
        return LinExpr._raw({X_COL: 1})

    def summary(self) -> dict:
        counts = self.tag_counts()
        return {"n": self.n, "columns": len(self.columns), "rows": self.num_rows(),
                **{t.value: counts.get(t, 0) for t in TAG_CODES}}


def share_rows(parties: int) -> list[Constraint]:
    return [Constraint(LinExpr._raw({X_COL: 1, 1 << i: -1}), Relation.GE, Tag.OBJECTIVE_LINK)
            for i in range(1, parties + 1)]


def normalization_row() -> Constraint:
    return Constraint(LinExpr._raw({1: 1}, -1), Relation.EQ, Tag.NORMALIZATION)


def _resolve_group(A: AccessStructure, group, override: bool) -> Group:
    if group is None or group == "auto":
        return automorphism_group(A)
    if isinstance(group, Group):
        G = group
    else:
        gens = [g if isinstance(g, Permutation) else Permutation.parse(g, A.parties) for g in group]
        G = close(gens, A.parties)
    if not override and not G.is_subgroup_of(automorphism_group(A)):
        raise NotASubgroupError(
            "symmetry group is not a subgroup of the automorphism group of the structure")
    return G


def assemble(A: AccessStructure, copies: Sequence[CopySpec] = (),
             sym: SymmetryMode | str = SymmetryMode.NONE, group=None,
             override: bool = False) -> LpProblem:
    """Build the lower-bound program for ``A``.

    ``group`` is ``None``/``"auto"`` (full automorphism group), a ``Group``,
    or a list of cycle strings; it must lie inside the automorphism group
    unless ``override`` is set.
    """
    sym = SymmetryMode(sym)
    r = A.parties
    ground0 = GroundSet.standard(r)
    ground, copy_rows = apply_chain(ground0, list(copies))
    n = len(ground)

    blocks = [
        RowBlock(Tag.OBJECTIVE_LINK, share_rows(r)),
        RowBlock(Tag.ELEMENTAL, ElementalRows(n)),
        RowBlock(Tag.SCHEME, scheme_constraints(A)),
        RowBlock(Tag.NORMALIZATION, [normalization_row()]),
        RowBlock(Tag.COPY, copy_rows),
    ]
    meta = {"structure": A.name, "access": A.to_json(),
            "copies": [c.notation() for c in copies], "symmetry": sym.value,
            "normalization": ground.names[0]}
    columns = [X_COL] + list(range(1, 1 << n))

    if sym is SymmetryMode.NONE:
        return LpProblem(ground, r, columns, blocks, meta)

    G = _resolve_group(A, group, override)
    meta["group"] = [str(g) for g in G.generators]
    meta["group_order"] = G.order()
    if sym is SymmetryMode.EQUALITIES:
        blocks.append(RowBlock(Tag.SYMMETRY, symmetry_equalities(G, n, r)))
        return LpProblem(ground, r, columns, blocks, meta)

    rep = orbit_quotient(G, n, r)
    seen: set = set()
    new_blocks = []
    for b in blocks:
        kept = []
        for row in b.rows:
            expr = row.expr.substitute(rep)
            if not expr.terms and (expr.constant == 0 or
                                   (row.relation is Relation.GE and expr.constant > 0)):
                continue
            key = (expr.key(), row.relation)
            if key in seen:
                continue
            seen.add(key)
            kept.append(Constraint(expr, row.relation, row.tag))
        new_blocks.append(RowBlock(b.tag, kept))
    live = [X_COL] + sorted(S for S, t in rep.items() if S == t)
    return LpProblem(ground, r, live, new_blocks, meta)


# --- problem-spec JSON -----------------------------------------------------

def structure_from_spec(value) -> AccessStructure:
    if isinstance(value, str):
        return catalog(value)
    return AccessStructure.from_json(value)


def copies_from_spec(items, aliases=None) -> list[CopySpec]:
    out: list[CopySpec] = []
    for item in items or []:
        if isinstance(item, str):
            out.extend(parse_copy_chain(item, aliases))
        else:
            out.append(CopySpec.from_json(item))
    return out


def assemble_from_spec(spec: Mapping | str | Path) -> LpProblem:
    """Problem-spec JSON: structure, copies, symmetry, group, override."""
    if isinstance(spec, Path) or (isinstance(spec, str) and not spec.lstrip().startswith("{")):
        spec = json.loads(Path(spec).read_text())
    elif isinstance(spec, str):
        spec = json.loads(spec)
    A = structure_from_spec(spec["structure"])
    copies = copies_from_spec(spec.get("copies"), spec.get("aliases"))
    return assemble(A, copies, spec.get("symmetry", "none"), spec.get("group", "auto"),
                    bool(spec.get("override", False)))


# --- exact number formatting -----------------------------------------------

def _terminates(q: Fraction) -> bool:
    d = q.denominator
    for p in (2, 5):
        while d % p == 0:
            d //= p
    return d == 1


def exact_decimal(q) -> str:
    """Exact decimal text of a terminating rational."""
    q = Fraction(q)
    if q.denominator == 1:
        return str(q.numerator)
    if not _terminates(q):
        raise ValueError(f"{q} has no finite decimal expansion")
    d = q.denominator
    k = 0
    while (10 ** k) % d:
        k += 1
    digits = abs(q.numerator) * (10 ** k // d)
    s = str(digits).rjust(k + 1, "0")
    out = (s[:-k] + "." + s[-k:]).rstrip("0").rstrip(".")
    return ("-" if q < 0 else "") + out


def row_scale(row: Constraint) -> int:
    """Positive integer multiplier applied to ``row`` on export."""
    vals = [Fraction(v) for v in row.expr.terms.values()] + [Fraction(row.expr.constant)]
    if all(v.denominator == 1 for v in vals):
        return 1
    if all(_terminates(v) for v in vals):
        return 1
    return math.lcm(*(v.denominator for v in vals))


def _fmt(v) -> str:
    return exact_decimal(v)


# --- LP-text and MPS writers -----------------------------------------------

def _row_lp(name: str, row: Constraint, cn: Mapping[int, str]) -> str:
    s = row_scale(row)
    parts = []
    for col in sorted(row.expr.terms):
        c = Fraction(row.expr.terms[col]) * s
        mag = _fmt(abs(c))
        sign = "-" if c < 0 else "+"
        term = cn[col] if mag == "1" else f"{mag} {cn[col]}"
        parts.append(f"{sign} {term}")
    body = " ".join(parts) if parts else "0 x"
    if body.startswith("+ "):
        body = body[2:]
    op = ">=" if row.relation is Relation.GE else "="
    rhs = _fmt(-Fraction(row.expr.constant) * s)
    return f" {name}: {body} {op} {rhs}\n"


def _elemental_lp_lines(p: LpProblem, rows: ElementalRows, cn) -> Iterator[str]:
    for k, row in enumerate(rows):
        parts = []
        for col in sorted(row.expr.terms):
            parts.append(("- " if row.expr.terms[col] < 0 else "+ ") + cn[col])
        body = " ".join(parts)
        yield f" el{k}: {body[2:] if body.startswith('+ ') else body} >= 0\n"


def write_lp(p: LpProblem, out: IO[str]) -> None:
    cn = p.column_names()
    out.write(f"\\ structure {p.metadata.get('structure', '')}, n = {p.n}\n")
    out.write("Minimize\n obj: x\nSubject To\n")
    for b in p.blocks:
        if isinstance(b.rows, ElementalRows):
            out.writelines(_elemental_lp_lines(p, b.rows, cn))
            continue
        for k, row in enumerate(b.rows):
            out.write(_row_lp(f"{b.code}{k}", row, cn))
    out.write("Bounds\n")
    for col in p.columns:
        out.write(f" {cn[col]} free\n")
    out.write("End\n")


def _scaled_entries(p: LpProblem):
    """Per non-elemental row: name, relation, scaled integer/decimal terms, rhs."""
    for b in p.blocks:
        if isinstance(b.rows, ElementalRows):
            continue
        for k, row in enumerate(b.rows):
            s = row_scale(row)
            terms = {c: Fraction(v) * s for c, v in row.expr.terms.items()}
            yield f"{b.code}{k}", row.relation, terms, -Fraction(row.expr.constant) * s


def write_mps(p: LpProblem, out: IO[str]) -> None:
    """MPS with whitespace-separated fields (names exceed the 8-column limit)."""
    cn = p.column_names()
    out.write(f"NAME          {p.metadata.get('structure', 'problem')}\n")
    out.write("ROWS\n N  obj\n")
    entries: dict[int, list[tuple[str, Fraction]]] = {c: [] for c in p.columns}
    rhs: list[tuple[str, Fraction]] = []
    entries[X_COL].append(("obj", Fraction(1)))
    el_block = None
    for b in p.blocks:
        if isinstance(b.rows, ElementalRows):
            el_block = b
            out.writelines(f" G  el{k}\n" for k in range(len(b.rows)))
            continue
        for k, row in enumerate(b.rows):
            kind = "G" if row.relation is Relation.GE else "E"
            out.write(f" {kind}  {b.code}{k}\n")
    for name, rel, terms, r in _scaled_entries(p):
        for c, v in terms.items():
            entries[c].append((name, v))
        if r:
            rhs.append((name, r))
    out.write("COLUMNS\n")
    if el_block is not None:
        rows_a, cols_a, vals_a = elemental_arrays(el_block.rows.n)
        order = np.lexsort((rows_a, cols_a))
        rows_a, cols_a, vals_a = rows_a[order], cols_a[order], vals_a[order]
        bounds = np.searchsorted(cols_a, np.asarray(p.columns, dtype=np.int64), side="left")
        ends = np.searchsorted(cols_a, np.asarray(p.columns, dtype=np.int64), side="right")
    for idx, col in enumerate(p.columns):
        name = cn[col]
        lines = [f"    {name}  {rn}  {_fmt(v)}\n" for rn, v in entries[col]]
        if el_block is not None:
            lo, hi = bounds[idx], ends[idx]
            lines.extend(f"    {name}  el{rk}  {vk}\n"
                         for rk, vk in zip(rows_a[lo:hi].tolist(), vals_a[lo:hi].tolist()))
        out.writelines(lines)
    out.write("RHS\n")
    for rn, v in rhs:
        out.write(f"    rhs  {rn}  {_fmt(v)}\n")
    out.write("BOUNDS\n")
    for col in p.columns:
        out.write(f" FR bnd  {cn[col]}\n")
    out.write("ENDATA\n")


def export_lp(p: LpProblem, fmt: str = "lp", path: str | Path | None = None) -> bytes | None:
    """Serialise ``p`` as ``"lp"`` (CPLEX LP text) or ``"mps"``.

    Returns the bytes when ``path`` is None, otherwise writes the file.
    """
    writer = {"lp": write_lp, "mps": write_mps}.get(fmt.lower())
    if writer is None:
        raise ContractError(f"unknown export format {fmt!r}")
    if path is None:
        buf = io.StringIO()
        writer(p, buf)
        return buf.getvalue().encode()
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        writer(p, fh)
    return None


# --- readers -------------------------------------------------------------

@dataclass
class ParsedLp:
    """A problem read back from a file: names, rows and relation kinds."""

    columns: list[str]
    rows: dict[str, tuple[str, dict[str, Fraction], Fraction]]  # name -> (kind, terms, rhs)
    objective: dict[str, Fraction]
    free: set[str]


def read_mps(stream: IO[str] | str | Path) -> ParsedLp:
    if isinstance(stream, (str, Path)):
        with open(stream) as fh:
            return read_mps(fh)
    section = None
    kinds: dict[str, str] = {}
    objname = None
    rows: dict[str, tuple[str, dict, Fraction]] = {}
    columns: list[str] = []
    objective: dict[str, Fraction] = {}
    free: set[str] = set()
    for line in stream:
        if not line.strip() or line.startswith("*"):
            continue
        if not line[0].isspace():
            section = line.split()[0]
            if section == "ENDATA":
                break
            continue
        f = line.split()
        if section == "ROWS":
            kind, name = f
            if kind == "N":
                objname = name
            else:
                kinds[name] = kind
                rows[name] = (kind, {}, Fraction(0))
        elif section == "COLUMNS":
            col = f[0]
            if not columns or columns[-1] != col:
                columns.append(col)
            for rn, val in zip(f[1::2], f[2::2]):
                if rn == objname:
                    objective[col] = Fraction(val)
                else:
                    rows[rn][1][col] = Fraction(val)
        elif section == "RHS":
            for rn, val in zip(f[1::2], f[2::2]):
                kind, terms, _ = rows[rn]
                rows[rn] = (kind, terms, Fraction(val))
        elif section == "BOUNDS":
            if f[0] == "FR":
                free.add(f[2])
            else:
                raise ContractError(f"unsupported bound type {f[0]}")
        else:
            raise ContractError(f"unexpected MPS section {section!r}")
    return ParsedLp(columns, rows, objective, free)


_LP_TERM_RE = re.compile(r"([+-])?\s*([0-9.]+)?\s*([A-Za-z_][A-Za-z0-9_]*)")


def read_lp(stream: IO[str] | str | Path) -> ParsedLp:
    if isinstance(stream, (str, Path)):
        with open(stream) as fh:
            return read_lp(fh)
    section = None
    rows: dict[str, tuple[str, dict, Fraction]] = {}
    objective: dict[str, Fraction] = {}
    free: set[str] = set()
    cols: dict[str, None] = {}

    def terms_of(text: str) -> dict[str, Fraction]:
        out: dict[str, Fraction] = {}
        for sign, coef, var in _LP_TERM_RE.findall(text):
            c = Fraction(coef) if coef else Fraction(1)
            out[var] = out.get(var, 0) + (-c if sign == "-" else c)
            cols.setdefault(var)
        return out

    for line in stream:
        s = line.strip()
        if not s or s.startswith("\\"):
            continue
        low = s.lower()
        if low in ("minimize", "maximize", "subject to", "bounds", "end"):
            section = low
            continue
        if section == "minimize":
            objective = terms_of(s.split(":", 1)[1])
        elif section == "subject to":
            name, body = s.split(":", 1)
            for op, kind in ((">=", "G"), ("=", "E")):
                if op in body:
                    lhs, r = body.split(op)
                    rows[name.strip()] = (kind, terms_of(lhs), Fraction(r.strip()))
                    break
        elif section == "bounds":
            var, what = s.split()
            if what != "free":
                raise ContractError(f"unsupported bound {s!r}")
            free.add(var)
    return ParsedLp(list(cols), rows, objective, free)


def problem_from_parsed(parsed: ParsedLp, like: LpProblem) -> LpProblem:
    """Rebuild an ``LpProblem`` from a parsed file, using ``like`` for names."""
    colof = {like.column_name(c): c for c in like.columns}
    by_tag: dict[Tag, list[Constraint]] = {}
    order: list[Tag] = []
    for name, (kind, terms, rhs) in parsed.rows.items():
        m = _ROW_RE.match(name)
        if not m or m[1] not in CODE_TAGS:
            raise ContractError(f"unrecognised row name {name!r}")
        tag = CODE_TAGS[m[1]]
        expr = LinExpr({colof[c]: v for c, v in terms.items()}, -rhs)
        rel = Relation.GE if kind == "G" else Relation.EQ
        if tag not in by_tag:
            by_tag[tag] = []
            order.append(tag)
        by_tag[tag].append(Constraint(expr, rel, tag))
    blocks = [RowBlock(t, by_tag[t]) for t in order]
    return LpProblem(like.ground, like.parties, list(like.columns), blocks, dict(like.metadata))


# --- solutions and certificates -------------------------------------------

RESERVED = {"status", "objective"}


@dataclass
class SolverOutput:
    status: str
    objective: Fraction | None
    primal: dict[int, Fraction]
    dual: dict[str, Fraction]
    raw_dual: dict[str, float]


def rationalize(text: str, cap: int = 10 ** 6) -> Fraction:
    """Nearest fraction with denominator at most ``cap`` (continued fractions)."""
    return Fraction(text).limit_denominator(cap)


def import_solution(p: LpProblem, stream: IO[str] | str | Path, cap: int = 10 ** 6) -> SolverOutput:
    """Read ``<name> <value>`` lines written by an external solver.

    Column names give primal values; row names give duals for the exported
    (possibly integer-scaled) rows, rescaled here to the original rows.
    """
    if isinstance(stream, Path) or (isinstance(stream, str) and "\n" not in stream
                                    and Path(stream).exists()):
        with open(stream) as fh:
            return import_solution(p, fh, cap)
    if isinstance(stream, str):
        stream = io.StringIO(stream)
    status, objective = "unknown", None
    primal: dict[int, Fraction] = {}
    dual: dict[str, Fraction] = {}
    raw: dict[str, float] = {}
    seen_any = False
    for lineno, line in enumerate(stream, 1):
        s = line.strip()
        if not s or s.startswith("#"):
            continue
        f = s.split()
        if len(f) != 2:
            raise ContractError(f"line {lineno}: expected '<name> <value>', got {s!r}")
        name, val = f
        seen_any = True
        if name == "status":
            status = val
            continue
        try:
            q = rationalize(val, cap)
        except (ValueError, ZeroDivisionError):
            raise ContractError(f"line {lineno}: bad number {val!r}") from None
        if name == "objective":
            objective = q
        elif name == "x" or name.startswith("h_"):
            try:
                primal[p.column_of(name)] = q
            except KeyError:
                raise ContractError(f"line {lineno}: unknown column {name!r}") from None
        elif p.has_row(name):
            raw[name] = float(val)
            dual[name] = q * row_scale(p.row(name)) if q else q
        else:
            raise ContractError(f"line {lineno}: unknown name {name!r}")
    if not seen_any:
        raise ContractError("empty solver output")
    return SolverOutput(status, objective, primal, dual, raw)


@dataclass
class Certificate:
    """Dual weights proving ``x >= bound``."""

    bound: Fraction
    dual_weights: dict[str, Fraction]
    kind: str = "bound"  # or "infeasible" for a Farkas combination

    def to_json(self) -> dict:
        return {"kind": self.kind, "bound": _frac_str(self.bound),
                "dual_weights": {k: _frac_str(v) for k, v in sorted(
                    self.dual_weights.items(), key=lambda kv: _row_sort_key(kv[0]))}}

    @classmethod
    def from_json(cls, data: Mapping) -> "Certificate":
        return cls(Fraction(data["bound"]),
                   {k: Fraction(v) for k, v in data["dual_weights"].items()},
                   data.get("kind", "bound"))

    def save(self, path: str | Path) -> None:
        Path(path).write_text(json.dumps(self.to_json(), indent=1) + "\n")

    @classmethod
    def load(cls, path: str | Path) -> "Certificate":
        return cls.from_json(json.loads(Path(path).read_text()))


def _frac_str(q: Fraction) -> str:
    q = Fraction(q)
    return f"{q.numerator}/{q.denominator}"


def _row_sort_key(name: str):
    m = _ROW_RE.match(name)
    return (m[1], int(m[2])) if m else (name, 0)


def row_index_map(p: LpProblem) -> dict[str, int]:
    return {name: i for i, name in enumerate(p.row_names())}


def describe(p: LpProblem) -> str:
    s = p.summary()
    return (f"n={s['n']} columns={s['columns']} rows={s['rows']} "
            f"(elemental={s['elemental']} scheme={s['scheme']} copy={s['copy']} "
            f"share={s['objective-link']} normalization={s['normalization']} "
            f"symmetry={s['symmetry']})")


__all__ = [
    "SymmetryMode", "LpProblem", "RowBlock", "Certificate", "SolverOutput", "ParsedLp",
    "NotASubgroupError", "assemble", "assemble_from_spec", "export_lp", "import_solution",
    "read_lp", "read_mps", "problem_from_parsed", "row_scale", "exact_decimal",
    "rationalize", "describe",
]
