"""Copy-lemma extensions of the ground set.

A Y-copy of the tuple Z over X adds fresh elements Z' with

    H(A, B) = H(A, B')   for every A within X and nonempty B within Z,
    I(Z' : Y, Z | X) = 0,

where B' is the primed image of B.  Text notation: ``Z|X`` (Y empty) or
``Y-copy(Z|X)``, elements separated by commas, several applications joined
by ``and``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Mapping, Sequence

from .entropy import Constraint, ContractError, GroundSet, LinExpr, Relation, Tag, mask_of

_TOKEN_RE = re.compile(r"^[0-9A-Za-z]+'*$")
_YCOPY_RE = re.compile(r"^(?P<y>.*?)-copy\((?P<z>[^|()]*)\|(?P<x>[^|()]*)\)$")
_BARE_RE = re.compile(r"^(?P<z>[^|()]*)\|(?P<x>[^|()]*)$")


@dataclass(frozen=True)
class CopySpec:
    """One copy-lemma application, by element label."""

    Z: tuple[str, ...]
    X: tuple[str, ...] = ()
    Y: tuple[str, ...] = ()
    new_labels: tuple[str, ...] | None = None

    def __post_init__(self):
        for name in ("Z", "X", "Y"):
            object.__setattr__(self, name, tuple(getattr(self, name)))
        if self.new_labels is not None:
            object.__setattr__(self, "new_labels", tuple(self.new_labels))
        if not self.Z:
            raise ContractError("a copy needs at least one element to copy")
        for name in ("Z", "X", "Y"):
            vals = getattr(self, name)
            if len(set(vals)) != len(vals):
                raise ContractError(f"repeated element in {name}: {vals}")
        if set(self.Z) & set(self.X):
            raise ContractError(f"Z and X overlap: {sorted(set(self.Z) & set(self.X))}")
        # Y elements already in Z or X add nothing to I(Z' : Y, Z | X).
        y = tuple(e for e in self.Y if e not in self.Z and e not in self.X)
        object.__setattr__(self, "Y", y)
        if self.new_labels is not None and len(self.new_labels) != len(self.Z):
            raise ContractError("need one new label per copied element")

    @classmethod
    def from_json(cls, data: Mapping) -> "CopySpec":
        try:
            return cls(Z=tuple(map(str, data["Z"])), X=tuple(map(str, data.get("X", ()))),
                       Y=tuple(map(str, data.get("Y", ()))),
                       new_labels=data.get("labels"))
        except (KeyError, TypeError):
            raise ContractError(f"bad copy spec {data!r}") from None

    def to_json(self) -> dict:
        d = {"Y": list(self.Y), "Z": list(self.Z), "X": list(self.X)}
        if self.new_labels is not None:
            d["labels"] = list(self.new_labels)
        return d

    def notation(self) -> str:
        core = f"{','.join(self.Z)}|{','.join(self.X)}"
        return f"{','.join(self.Y)}-copy({core})" if self.Y else core

    def labels_for(self, ground: GroundSet) -> tuple[str, ...]:
        if self.new_labels is not None:
            return self.new_labels
        out: list[str] = []
        for z in self.Z:
            out.append(ground.fresh_label(z, out))
        return tuple(out)


def _tokens(text: str, aliases: Mapping[str, Sequence[str]]) -> list[str]:
    out = []
    for raw in text.split(","):
        tok = raw.strip()
        if not tok:
            continue
        base = tok.rstrip("'")
        primes = tok[len(base):]
        if base in aliases:
            out.extend(a + primes for a in aliases[base])
        elif _TOKEN_RE.match(tok):
            out.append(tok)
        else:
            raise ContractError(f"bad element token {tok!r}")
    return out


def parse_copy_notation(text: str, aliases: Mapping[str, Sequence[str]] | None = None) -> CopySpec:
    """Parse ``Z|X`` or ``Y-copy(Z|X)``; ``aliases`` expands tuple names like ``t``."""
    aliases = aliases or {}
    s = text.strip()
    m = _YCOPY_RE.match(s)
    if m:
        y = _tokens(m["y"], aliases)
        if not y:
            raise ContractError(f"empty Y in {text!r}")
    else:
        m = _BARE_RE.match(s)
        if not m:
            raise ContractError(f"malformed copy notation {text!r}")
        y = []
    z = _tokens(m["z"], aliases)
    x = _tokens(m["x"], aliases)
    return CopySpec(Z=tuple(z), X=tuple(x), Y=tuple(y))


def parse_copy_chain(text: str, aliases: Mapping[str, Sequence[str]] | None = None) -> list[CopySpec]:
    """Several applications joined by ``and`` (or ``;``)."""
    parts = [p for p in re.split(r"\s+and\s+|;", text) if p.strip()]
    return [parse_copy_notation(p, aliases) for p in parts]


def copy_equality_count(spec: CopySpec) -> int:
    return (1 << len(spec.X)) * ((1 << len(spec.Z)) - 1)


def apply_copy(ground: GroundSet, spec: CopySpec) -> tuple[GroundSet, list[Constraint]]:
    """Extend ``ground`` by the copies of Z and return the defining rows.

    Rows come as the marginal equalities (B outer in Z order, A inner in
    X order) followed by the conditional independence.
    """
    z = [ground.index(e) for e in spec.Z]
    x = [ground.index(e) for e in spec.X]
    y = [ground.index(e) for e in spec.Y]
    labels = spec.labels_for(ground)
    new_ground = ground.extended(labels)
    zp = [new_ground.index(e) for e in labels]

    rows = []
    for b in range(1, 1 << len(z)):
        B = mask_of(z[i] for i in range(len(z)) if b >> i & 1)
        Bp = mask_of(zp[i] for i in range(len(z)) if b >> i & 1)
        for a in range(1 << len(x)):
            A = mask_of(x[i] for i in range(len(x)) if a >> i & 1)
            rows.append(Constraint(LinExpr._raw({A | B: 1, A | Bp: -1}), Relation.EQ, Tag.COPY))

    Zm, Zpm, Xm, Ym = mask_of(z), mask_of(zp), mask_of(x), mask_of(y)
    terms: dict[int, int] = {}
    for m, c in ((Zpm | Xm, 1), (Ym | Zm | Xm, 1), (Xm, -1), (Zpm | Ym | Zm | Xm, -1)):
        if m:
            s = terms.get(m, 0) + c
            if s:
                terms[m] = s
            else:
                del terms[m]
    rows.append(Constraint(LinExpr._raw(terms), Relation.EQ, Tag.COPY))
    return new_ground, rows


def apply_chain(ground: GroundSet, specs: Sequence[CopySpec]) -> tuple[GroundSet, list[Constraint]]:
    rows: list[Constraint] = []
    for spec in specs:
        ground, new_rows = apply_copy(ground, spec)
        rows.extend(new_rows)
    return ground, rows
