"""Entropy coordinates, linear expressions and constraints.

A coordinate h_S is addressed by the bit pattern of S: element i of the
ground set is bit i, so the nonempty subsets of an n-element ground set map
onto the integers 1 .. 2**n - 1.  Appending elements never renumbers
existing coordinates.

Coefficients are exact rationals (``int`` or ``fractions.Fraction``); no
floating point value ever enters a ``LinExpr``.
"""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational
from typing import Iterable, Iterator, Mapping

MAX_GROUND = 20

# Column 0 is never an entropy coordinate (h_empty = 0), so LP rows use it
# for the information-ratio variable x.
X_COL = 0

_LABEL_RE = re.compile(r"^[0-9]+'*$")


class ContractError(ValueError):
    """Raised when an operation is called outside its precondition."""


def mask_of(indices: Iterable[int]) -> int:
    m = 0
    for i in indices:
        if i < 0:
            raise ContractError(f"negative element index {i}")
        m |= 1 << i
    return m


def elements(mask: int) -> list[int]:
    """Indices of the set bits of ``mask``, ascending."""
    out = []
    i = 0
    while mask:
        if mask & 1:
            out.append(i)
        mask >>= 1
        i += 1
    return out


def subsets(mask: int, include_empty: bool = True) -> Iterator[int]:
    """All submasks of ``mask`` in ascending integer order."""
    sub = 0
    if include_empty:
        yield 0
    while True:
        sub = (sub - mask) & mask
        if sub == 0:
            return
        yield sub


def coord_index(S: int, n: int | None = None) -> int:
    """Coordinate index of the nonempty subset ``S`` (its bit pattern)."""
    if S <= 0:
        raise ContractError("the empty set has no entropy coordinate")
    if n is not None and S >> n:
        raise ContractError(f"subset {S:#b} exceeds a ground set of size {n}")
    return S


def coord_subset(index: int, n: int | None = None) -> int:
    """Inverse of :func:`coord_index`."""
    return coord_index(index, n)


class GroundSet:
    """Ordered, append-only list of element labels.

    Labels are digit strings optionally followed by primes (``"0"``,
    ``"3'"``, ``"4''"``); the secret is element 0.
    """

    __slots__ = ("_names", "_index")

    def __init__(self, names: Iterable[str] = ()):
        self._names: tuple[str, ...] = ()
        self._index: dict[str, int] = {}
        for name in names:
            self._add(name)

    @classmethod
    def standard(cls, parties: int) -> "GroundSet":
        return cls(str(i) for i in range(parties + 1))

    def _add(self, name: str) -> None:
        if not _LABEL_RE.match(name):
            raise ContractError(f"bad element label {name!r}")
        if name in self._index:
            raise ContractError(f"duplicate element label {name!r}")
        if len(self._names) >= MAX_GROUND:
            raise ContractError(f"ground set limited to {MAX_GROUND} elements")
        self._index[name] = len(self._names)
        self._names = self._names + (name,)

    def extended(self, names: Iterable[str]) -> "GroundSet":
        g = GroundSet(self._names)
        for name in names:
            g._add(name)
        return g

    def fresh_label(self, base: str, taken: Iterable[str] = ()) -> str:
        """First unused label of the form base', base'', ..."""
        taken = set(taken)
        root = base.rstrip("'")
        k = len(base) - len(root) + 1
        while True:
            cand = root + "'" * k
            if cand not in self._index and cand not in taken:
                return cand
            k += 1

    @property
    def names(self) -> tuple[str, ...]:
        return self._names

    def __len__(self) -> int:
        return len(self._names)

    def __contains__(self, name: object) -> bool:
        return name in self._index

    def index(self, name: str) -> int:
        try:
            return self._index[name]
        except KeyError:
            raise ContractError(f"unknown element label {name!r}") from None

    def mask(self, names: Iterable[str]) -> int:
        return mask_of(self.index(s) for s in names)

    def labels(self, mask: int) -> list[str]:
        return [self._names[i] for i in elements(mask)]

    def __eq__(self, other: object) -> bool:
        return isinstance(other, GroundSet) and other._names == self._names

    def __hash__(self) -> int:
        return hash(self._names)

    def __repr__(self) -> str:
        return f"GroundSet({list(self._names)!r})"


def _as_rational(c) -> Rational:
    if isinstance(c, bool) or not isinstance(c, Rational):
        raise TypeError(f"coefficient must be an exact rational, got {type(c).__name__}")
    if isinstance(c, Fraction) and c.denominator == 1:
        return c.numerator
    return c


class LinExpr:
    """Sparse linear form ``sum(coef * h_S) + constant`` with exact coefficients.

    Instances are treated as immutable; arithmetic returns new objects.
    Zero coefficients are never stored.
    """

    __slots__ = ("terms", "constant")

    def __init__(self, terms: Mapping[int, Rational] | None = None, constant: Rational = 0):
        clean = {}
        if terms:
            for k, v in terms.items():
                if v:
                    clean[k] = _as_rational(v)
        self.terms: dict[int, Rational] = clean
        self.constant: Rational = _as_rational(constant)

    @classmethod
    def _raw(cls, terms: dict[int, Rational], constant: Rational = 0) -> "LinExpr":
        # trusted constructor: ``terms`` already free of zeros
        e = object.__new__(cls)
        e.terms = terms
        e.constant = constant
        return e

    def __add__(self, other: "LinExpr") -> "LinExpr":
        if not isinstance(other, LinExpr):
            return NotImplemented
        out = dict(self.terms)
        for k, v in other.terms.items():
            s = out.get(k, 0) + v
            if s:
                out[k] = s
            else:
                out.pop(k, None)
        return LinExpr._raw(out, self.constant + other.constant)

    def __neg__(self) -> "LinExpr":
        return LinExpr._raw({k: -v for k, v in self.terms.items()}, -self.constant)

    def __sub__(self, other: "LinExpr") -> "LinExpr":
        if not isinstance(other, LinExpr):
            return NotImplemented
        return self + (-other)

    def scale(self, c: Rational) -> "LinExpr":
        c = _as_rational(c)
        if not c:
            return LinExpr()
        return LinExpr._raw({k: v * c for k, v in self.terms.items()}, self.constant * c)

    __mul__ = scale
    __rmul__ = scale

    def substitute(self, mapping: Mapping[int, int]) -> "LinExpr":
        """Rename columns through ``mapping`` (missing keys map to themselves)."""
        out: dict[int, Rational] = {}
        for k, v in self.terms.items():
            k2 = mapping.get(k, k)
            s = out.get(k2, 0) + v
            if s:
                out[k2] = s
            else:
                out.pop(k2, None)
        return LinExpr._raw(out, self.constant)

    def evaluate(self, values) -> Rational:
        """Value at ``values`` (anything indexable by column)."""
        total = self.constant
        for k, v in self.terms.items():
            total += v * values[k]
        return total

    def is_zero(self) -> bool:
        return not self.terms and not self.constant

    def key(self) -> tuple:
        """Hashable canonical form."""
        return tuple(sorted(self.terms.items())), self.constant

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, LinExpr):
            return NotImplemented
        return self.terms == other.terms and self.constant == other.constant

    def __hash__(self) -> int:
        return hash(self.key())

    def __repr__(self) -> str:
        parts = [f"{v}*h[{k:#b}]" for k, v in sorted(self.terms.items())]
        if self.constant or not parts:
            parts.append(str(self.constant))
        return "LinExpr(" + " + ".join(parts) + ")"


class Relation(enum.Enum):
    GE = ">="
    EQ = "="


class Tag(enum.Enum):
    ELEMENTAL = "elemental"
    SCHEME = "scheme"
    COPY = "copy"
    SYMMETRY = "symmetry"
    NORMALIZATION = "normalization"
    OBJECTIVE_LINK = "objective-link"


@dataclass(frozen=True)
class Constraint:
    """``expr >= 0`` or ``expr = 0`` with a provenance tag."""

    expr: LinExpr
    relation: Relation
    tag: Tag

    def holds(self, values) -> bool:
        v = self.expr.evaluate(values)
        return v >= 0 if self.relation is Relation.GE else v == 0


def entropy(S: int) -> LinExpr:
    """H(X_S); the empty set gives the zero expression."""
    if S == 0:
        return LinExpr()
    return LinExpr._raw({S: 1})


def cond_entropy(A: int, C: int = 0) -> LinExpr:
    """H(X_A | X_C) = H(A u C) - H(C)."""
    return entropy(A | C) - entropy(C)


def cmi(A: int, B: int, C: int = 0) -> LinExpr:
    """I(X_A : X_B | X_C) expanded with union semantics."""
    if not A or not B:
        raise ContractError("mutual information needs nonempty arguments")
    out: dict[int, int] = {}
    for m, c in ((A | C, 1), (B | C, 1), (C, -1), (A | B | C, -1)):
        if m:
            s = out.get(m, 0) + c
            if s:
                out[m] = s
            else:
                del out[m]
    return LinExpr._raw(out)
