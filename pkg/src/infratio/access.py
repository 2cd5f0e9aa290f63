"""Access structures, scheme equalities and the built-in catalog.

Parties are elements 1..r of the ground set; the secret is element 0.
Minimal authorized sets are written as digit strings ("1247").
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from pathlib import Path

from .entropy import Constraint, ContractError, LinExpr, Relation, Tag, elements, mask_of
from .symmetry import Group, Permutation, close, generating_set

SECRET = 0

# Minimal authorized sets of the seven matroid-port structures.
CATALOG_SETS: dict[str, list[str]] = {
    "A": ["123", "145", "167", "246", "257", "347", "356", "1247"],
    "A*": ["123", "145", "167", "246", "257", "347", "1356", "2356", "3456", "3567"],
    "F": ["123", "145", "167", "246", "257", "347", "356", "1247", "1256"],
    "F*": ["123", "145", "167", "246", "257", "1347", "1356",
           "2347", "2356", "3456", "3457", "3467", "3567"],
    "Fhat": ["123", "145", "167", "246", "257", "347",
             "1256", "1356", "2356", "3456", "3567"],
    # 1256, not 1257: the latter would contain 257 and break the antichain.
    "Q": ["123", "145", "167", "246", "257", "347",
          "1247", "1256", "1356", "2356", "3456", "3567"],
    "Q*": ["123", "145", "167", "246", "257", "1247", "1347",
           "1356", "2347", "2356", "3456", "3457", "3467", "3567"],
}

# Generators of the symmetry groups as published alongside the catalog.
PUBLISHED_GENERATORS: dict[str, list[str]] = {
    "A": ["(12)(56)", "(14)(36)", "(17)(35)"],
    "A*": ["(12)(56)", "(14)(36)", "(17)(35)"],
    "F": ["(12)(4576)", "(46)(57)"],
    "F*": ["(12)(4576)", "(46)(57)"],
    "Q": ["(12)(47)", "(12)(56)"],
    "Fhat": ["(12)(47)", "(12)(56)"],
    "Q*": ["(12)(47)", "(12)(56)"],
}


def parse_set(text: str, parties: int) -> int:
    """Digit string to party mask ("1247" -> {1,2,4,7})."""
    if not text or not text.isdigit():
        raise ContractError(f"bad party set {text!r}")
    idx = [int(c) for c in text]
    if len(set(idx)) != len(idx):
        raise ContractError(f"repeated party in {text!r}")
    for i in idx:
        if not 1 <= i <= parties:
            raise ContractError(f"party {i} out of range 1..{parties}")
    return mask_of(idx)


def format_set(mask: int) -> str:
    return "".join(str(i) for i in elements(mask))


@dataclass(frozen=True)
class AccessStructure:
    parties: int
    minimal_sets: tuple[int, ...]
    name: str = field(default="custom", compare=False)

    def __post_init__(self):
        if not 1 <= self.parties <= 9:
            raise ContractError("party count must be in 1..9")
        if not self.minimal_sets:
            raise ContractError("an access structure needs at least one minimal set")
        allowed = ((1 << (self.parties + 1)) - 1) ^ 1
        for m in self.minimal_sets:
            if m == 0 or m & ~allowed:
                raise ContractError(f"minimal set {m:#b} is not a nonempty set of parties")
        for a, b in itertools.permutations(self.minimal_sets, 2):
            if a & b == a:
                raise ContractError(
                    f"not an antichain: {format_set(a)} is contained in {format_set(b)}")
        object.__setattr__(self, "minimal_sets", tuple(sorted(set(self.minimal_sets))))

    @classmethod
    def from_strings(cls, parties: int, sets, name: str = "custom") -> "AccessStructure":
        return cls(parties, tuple(parse_set(s, parties) for s in sets), name)

    @classmethod
    def from_json(cls, data) -> "AccessStructure":
        if isinstance(data, (str, Path)) and Path(data).exists():
            data = json.loads(Path(data).read_text())
        elif isinstance(data, str):
            data = json.loads(data)
        try:
            parties = data["parties"]
            sets = data["minimal_sets"]
        except (KeyError, TypeError):
            raise ContractError("structure JSON needs 'parties' and 'minimal_sets'") from None
        return cls.from_strings(int(parties), sets, data.get("name", "custom"))

    def to_json(self) -> dict:
        return {"parties": self.parties, "minimal_sets": self.minimal_strings()}

    def minimal_strings(self) -> list[str]:
        return sorted((format_set(m) for m in self.minimal_sets), key=lambda s: (len(s), s))

    @property
    def party_mask(self) -> int:
        return ((1 << (self.parties + 1)) - 1) ^ 1

    def is_authorized(self, J: int) -> bool:
        if J & ~self.party_mask:
            raise ContractError("authorization is only defined for sets of parties")
        return any(m & J == m for m in self.minimal_sets)


def is_authorized(A: AccessStructure, J: int) -> bool:
    return A.is_authorized(J)


def scheme_constraints(A: AccessStructure) -> list[Constraint]:
    """One equality per nonempty party set J.

    Authorized: H(s_0 | s_J) = 0.  Unauthorized: H(s_0 | s_J) = H(s_0).
    """
    s = 1 << SECRET
    out = []
    for J in range(2, A.party_mask + 1, 2):
        terms = {J | s: 1, J: -1}
        if not A.is_authorized(J):
            terms[s] = -1
        out.append(Constraint(LinExpr._raw(terms), Relation.EQ, Tag.SCHEME))
    return out


def catalog_names() -> list[str]:
    return list(CATALOG_SETS)


def catalog(name: str) -> AccessStructure:
    try:
        sets = CATALOG_SETS[name]
    except KeyError:
        raise ContractError(
            f"unknown structure {name!r}; choose from {', '.join(CATALOG_SETS)}") from None
    return AccessStructure.from_strings(7, sets, name)


def published_group(name: str) -> Group:
    r = catalog(name).parties
    return close([Permutation.parse(g, r) for g in PUBLISHED_GENERATORS[name]])


def preserves(A: AccessStructure, p: Permutation) -> bool:
    return {p.act(m) for m in A.minimal_sets} == set(A.minimal_sets)


def automorphism_group(A: AccessStructure) -> Group:
    """All party permutations that map the minimal sets onto themselves.

    Brute force over Sym(r); r <= 9.
    """
    r = A.parties
    found = []
    for images in itertools.permutations(range(1, r + 1)):
        p = Permutation((0,) + images)
        if preserves(A, p):
            found.append(p)
    return Group.from_elements(found, generating_set(found))
