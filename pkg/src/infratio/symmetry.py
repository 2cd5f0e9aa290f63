"""Party permutations, subset orbits and symmetry constraints.

A permutation moves parties 1..r and fixes the secret (element 0) and
every element appended by the copy lemma.  Cycle notation uses one digit
per party, e.g. ``(12)(4576)``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable, Sequence

from .entropy import Constraint, ContractError, LinExpr, Relation, Tag

_CYCLE_RE = re.compile(r"\(([0-9]*)\)")


@dataclass(frozen=True, order=True)
class Permutation:
    """``images[i]`` is the image of element i, for i in 0..r."""

    images: tuple[int, ...]

    def __post_init__(self):
        im = tuple(self.images)
        object.__setattr__(self, "images", im)
        if not im or im[0] != 0:
            raise ContractError("permutations must fix the secret (element 0)")
        if sorted(im) != list(range(len(im))):
            raise ContractError(f"{im} is not a bijection")

    @property
    def r(self) -> int:
        return len(self.images) - 1

    @classmethod
    def identity(cls, r: int) -> "Permutation":
        return cls(tuple(range(r + 1)))

    @classmethod
    def from_cycles(cls, cycles: Iterable[Sequence[int]], r: int) -> "Permutation":
        im = list(range(r + 1))
        seen = set()
        for cyc in cycles:
            for a in cyc:
                if not 1 <= a <= r:
                    raise ContractError(f"element {a} is not a party in 1..{r}")
                if a in seen:
                    raise ContractError(f"element {a} appears in two cycles")
                seen.add(a)
            for a, b in zip(cyc, tuple(cyc[1:]) + tuple(cyc[:1])):
                im[a] = b
        return cls(tuple(im))

    @classmethod
    def parse(cls, text: str, r: int) -> "Permutation":
        """Parse disjoint-cycle notation; ``()``, ``e`` and ``id`` are the identity."""
        s = text.replace(" ", "")
        if s in ("", "e", "id", "()"):
            return cls.identity(r)
        if _CYCLE_RE.sub("", s):
            raise ContractError(f"malformed cycle notation {text!r}")
        cycles = [tuple(int(c) for c in body) for body in _CYCLE_RE.findall(s)]
        return cls.from_cycles([c for c in cycles if c], r)

    def cycles(self) -> list[tuple[int, ...]]:
        out, seen = [], set()
        for start in range(1, len(self.images)):
            if start in seen or self.images[start] == start:
                continue
            cyc = [start]
            seen.add(start)
            nxt = self.images[start]
            while nxt != start:
                cyc.append(nxt)
                seen.add(nxt)
                nxt = self.images[nxt]
            out.append(tuple(cyc))
        return out

    def __str__(self) -> str:
        cyc = self.cycles()
        return "".join("(" + "".join(map(str, c)) + ")" for c in cyc) or "()"

    def compose(self, other: "Permutation") -> "Permutation":
        """``self o other``: apply ``other`` first."""
        if other.r != self.r:
            raise ContractError("permutations act on different party sets")
        return Permutation(tuple(self.images[i] for i in other.images))

    __matmul__ = compose

    def inverse(self) -> "Permutation":
        inv = [0] * len(self.images)
        for i, j in enumerate(self.images):
            inv[j] = i
        return Permutation(tuple(inv))

    def is_identity(self) -> bool:
        return all(i == j for i, j in enumerate(self.images))

    def act(self, S: int) -> int:
        """Image of the subset ``S``; bits above r are fixed."""
        r1 = len(self.images)
        low = S & ((1 << r1) - 1)
        out = S ^ low
        i = 0
        while low:
            if low & 1:
                out |= 1 << self.images[i]
            low >>= 1
            i += 1
        return out


def act(p: Permutation, S: int) -> int:
    return p.act(S)


class Group:
    """Finite permutation group kept as an explicit, sorted element list."""

    def __init__(self, elements: Sequence[Permutation], generators: Sequence[Permutation], r: int):
        self.elements: tuple[Permutation, ...] = tuple(sorted(set(elements)))
        self.generators: tuple[Permutation, ...] = tuple(g for g in generators if not g.is_identity())
        self.r = r

    @classmethod
    def from_elements(cls, elements: Sequence[Permutation], generators=None) -> "Group":
        if not elements:
            raise ContractError("a group has at least the identity")
        r = elements[0].r
        if generators is None:
            generators = generating_set(elements)
        return cls(elements, generators, r)

    @classmethod
    def trivial(cls, r: int) -> "Group":
        return cls([Permutation.identity(r)], [], r)

    def order(self) -> int:
        return len(self.elements)

    def __len__(self) -> int:
        return len(self.elements)

    def __iter__(self):
        return iter(self.elements)

    def __contains__(self, p: object) -> bool:
        return p in set(self.elements)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Group) and set(self.elements) == set(other.elements)

    def __hash__(self):
        return hash(self.elements)

    def is_subgroup_of(self, other: "Group") -> bool:
        return set(self.elements) <= set(other.elements)

    def __repr__(self) -> str:
        gens = ", ".join(map(str, self.generators)) or "()"
        return f"Group(order={self.order()}, generators=<{gens}>)"


def close(generators: Sequence[Permutation], r: int | None = None) -> Group:
    """Smallest group containing ``generators``."""
    gens = list(generators)
    if r is None:
        if not gens:
            raise ContractError("cannot infer r from an empty generator list")
        r = gens[0].r
    for g in gens:
        if g.r != r:
            raise ContractError("generators act on different party sets")
    e = Permutation.identity(r)
    seen = {e}
    frontier = [e]
    while frontier:
        nxt = []
        for p in frontier:
            for g in gens:
                q = g.compose(p)
                if q not in seen:
                    seen.add(q)
                    nxt.append(q)
        frontier = nxt
    return Group(list(seen), gens, r)


def generating_set(elements: Sequence[Permutation]) -> list[Permutation]:
    """Greedy generating set: scan in sorted order, keep what enlarges the span."""
    pool = sorted(set(elements))
    if not pool:
        return []
    r = pool[0].r
    gens: list[Permutation] = []
    span = {Permutation.identity(r)}
    for p in pool:
        if p not in span:
            gens.append(p)
            span = set(close(gens, r).elements)
    return gens


class _UnionFind:
    def __init__(self):
        self.parent: dict[int, int] = {}

    def find(self, a: int) -> int:
        root = a
        while self.parent.get(root, root) != root:
            root = self.parent[root]
        while a != root:
            self.parent[a], a = root, self.parent.get(a, a)
        return root

    def union(self, a: int, b: int) -> bool:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return False
        if rb < ra:
            ra, rb = rb, ra
        self.parent[rb] = ra
        return True


def _check_sizes(G: Group, n: int, r: int) -> None:
    if G.r != r:
        raise ContractError(f"group acts on {G.r} parties, expected {r}")
    if n < r + 1:
        raise ContractError("ground set smaller than secret plus parties")


def orbits(G: Group, r: int) -> list[list[int]]:
    """Orbits of nonempty subsets of {0..r}, each sorted, ordered by minimum."""
    uf = _UnionFind()
    top = 1 << (r + 1)
    for g in G.generators:
        for S in range(1, top):
            uf.union(S, g.act(S))
    groups: dict[int, list[int]] = {}
    for S in range(1, top):
        groups.setdefault(uf.find(S), []).append(S)
    return sorted(groups.values(), key=lambda o: o[0])


def symmetry_equalities(G: Group, n: int, r: int) -> list[Constraint]:
    """Rows h_S - h_{g S} = 0 for generators g, one per orbit merge.

    Only subsets of the secret and parties are touched; duplicates are
    pruned so an orbit of size k contributes k - 1 rows.
    """
    _check_sizes(G, n, r)
    uf = _UnionFind()
    out = []
    top = 1 << (r + 1)
    for g in G.generators:
        for S in range(1, top):
            T = g.act(S)
            if T != S and uf.union(S, T):
                out.append(Constraint(LinExpr._raw({S: 1, T: -1}), Relation.EQ, Tag.SYMMETRY))
    return out


def orbit_quotient(G: Group, n: int, r: int) -> dict[int, int]:
    """Map every coordinate to the smallest member of its orbit.

    Coordinates that involve a copy element map to themselves.
    """
    _check_sizes(G, n, r)
    rep = {S: S for S in range(1, 1 << n)}
    for orb in orbits(G, r):
        for S in orb:
            rep[S] = orb[0]
    return rep
