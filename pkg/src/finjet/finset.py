"""Finite sets and total maps: the ambient category.

Everything here is immutable and canonical.  Derived objects (products,
pullback apexes) get deterministic element names, so constructions that are
unique only up to isomorphism in general become literally equal here, and
the functoriality laws downstream hold as equalities of tables.
"""

from __future__ import annotations

import hashlib
import itertools
from dataclasses import dataclass
from functools import cached_property
from typing import Iterator, Mapping, Optional

from .errors import CompositionMismatch, NotCommuting, NotJointlyMonic


def pair_name(a: str, b: str) -> str:
    return f"({a},{b})"


def table_label(anchor: str, entries: tuple[tuple[str, str], ...]) -> str:
    """Deterministic short name "(anchor|hash)" for a table anchored at an element.

    Entries must already be in canonical order.  Collisions are caught by the
    uniqueness check of the FinSet the labels end up in.
    """
    blob = ";".join(f"{k}:{v}" for k, v in entries)
    digest = hashlib.sha256(blob.encode("utf-8")).hexdigest()[:10]
    return f"({anchor}|{digest})"


@dataclass(frozen=True)
class FinSet:
    """A named finite set with a fixed element order."""

    name: str
    elements: tuple[str, ...]

    def __post_init__(self):
        if len(set(self.elements)) != len(self.elements):
            raise ValueError(f"duplicate elements in finite set {self.name!r}")

    @cached_property
    def index(self) -> Mapping[str, int]:
        return {e: i for i, e in enumerate(self.elements)}

    def __contains__(self, element: str) -> bool:
        return element in self.index

    def __len__(self) -> int:
        return len(self.elements)

    def __iter__(self) -> Iterator[str]:
        return iter(self.elements)

    def __repr__(self) -> str:
        return f"FinSet({self.name!r}, {list(self.elements)!r})"


# The stage used for ordinary points a: 1 -> A.
UNIT = FinSet("1", ("*",))


@dataclass(frozen=True)
class FinMap:
    """A total map between finite sets, stored as the value tuple in dom order."""

    dom: FinSet
    cod: FinSet
    values: tuple[str, ...]

    def __post_init__(self):
        if len(self.values) != len(self.dom):
            raise ValueError("map table does not cover the domain")
        for v in self.values:
            if v not in self.cod:
                raise ValueError(f"value {v!r} not in codomain {self.cod.name!r}")

    @classmethod
    def from_table(cls, dom: FinSet, cod: FinSet, table: Mapping[str, str]) -> "FinMap":
        missing = [e for e in dom if e not in table]
        if missing:
            raise ValueError(f"map table missing {missing[0]!r}")
        return cls(dom, cod, tuple(table[e] for e in dom))

    @classmethod
    def identity(cls, a: FinSet) -> "FinMap":
        return cls(a, a, a.elements)

    @classmethod
    def constant(cls, dom: FinSet, cod: FinSet, value: str) -> "FinMap":
        return cls(dom, cod, (value,) * len(dom))

    @property
    def table(self) -> dict[str, str]:
        return dict(zip(self.dom.elements, self.values))

    def __call__(self, element: str) -> str:
        return self.values[self.dom.index[element]]

    def __repr__(self) -> str:
        entries = ", ".join(f"{k}->{v}" for k, v in zip(self.dom.elements, self.values))
        return f"FinMap({self.dom.name}->{self.cod.name}: {entries})"


def element(a: FinSet, x: str) -> FinMap:
    """The point 1 -> a picking x."""
    return FinMap(UNIT, a, (x,))


def compose(g: FinMap, f: FinMap) -> FinMap:
    """g after f (maps compose right to left)."""
    if f.cod != g.dom:
        raise CompositionMismatch(
            f"cannot compose: {f.cod.name!r} is not {g.dom.name!r}"
        )
    return FinMap(f.dom, g.cod, tuple(g(v) for v in f.values))


def is_monic(f: FinMap) -> bool:
    return len(set(f.values)) == len(f.values)


@dataclass(frozen=True)
class Span:
    """Two maps out of a shared apex: left: M -> A, right: M -> X."""

    left: FinMap
    right: FinMap

    def __post_init__(self):
        if self.left.dom != self.right.dom:
            raise ValueError("span legs must share their domain")

    @property
    def apex(self) -> FinSet:
        return self.left.dom


def is_jointly_monic(s: Span) -> bool:
    seen = set()
    for m in s.apex:
        key = (s.left(m), s.right(m))
        if key in seen:
            return False
        seen.add(key)
    return True


def span_leq(s: Span, s2: Span) -> Optional[FinMap]:
    """The unique mediating map s.apex -> s2.apex commuting with both legs, if any."""
    if not is_jointly_monic(s) or not is_jointly_monic(s2):
        raise NotJointlyMonic("span_leq requires jointly monic spans")
    if s.left.cod != s2.left.cod or s.right.cod != s2.right.cod:
        raise CompositionMismatch("spans do not share their ends")
    lookup = {(s2.left(m), s2.right(m)): m for m in s2.apex}
    values = []
    for m in s.apex:
        target = lookup.get((s.left(m), s.right(m)))
        if target is None:
            return None
        values.append(target)
    return FinMap(s.apex, s2.apex, tuple(values))


@dataclass(frozen=True)
class PullbackResult:
    """Canonical pullback: apex elements are the matching pairs, named "(a,b)"."""

    apex: FinSet
    to_left: FinMap
    to_right: FinMap

    @cached_property
    def pair_index(self) -> Mapping[tuple[str, str], str]:
        return {
            (self.to_left(m), self.to_right(m)): m for m in self.apex
        }


def pullback(f: FinMap, p: FinMap) -> PullbackResult:
    """Canonical pullback of f: A -> C against p: B -> C.

    Apex elements are exactly the matching pairs, in lexicographic order of
    (index of a in A, index of b in B).
    """
    if f.cod != p.cod:
        raise CompositionMismatch(
            f"pullback legs land in {f.cod.name!r} and {p.cod.name!r}"
        )
    pairs = [
        (a, b)
        for a in f.dom
        for b in p.dom
        if f(a) == p(b)
    ]
    apex = FinSet(
        f"pb({f.dom.name},{p.dom.name})",
        tuple(pair_name(a, b) for a, b in pairs),
    )
    to_left = FinMap(apex, f.dom, tuple(a for a, _ in pairs))
    to_right = FinMap(apex, p.dom, tuple(b for _, b in pairs))
    return PullbackResult(apex, to_left, to_right)


def pair_into_pullback(a: FinMap, b: FinMap, pb: PullbackResult) -> FinMap:
    """The mediating map <a, b> into a pullback apex."""
    if a.dom != b.dom:
        raise CompositionMismatch("cone legs must share their stage")
    if a.cod != pb.to_left.cod or b.cod != pb.to_right.cod:
        raise CompositionMismatch("cone legs do not match the pullback legs")
    values = []
    for x in a.dom:
        m = pb.pair_index.get((a(x), b(x)))
        if m is None:
            raise NotCommuting(f"cone does not commute at {x!r}")
        values.append(m)
    return FinMap(a.dom, pb.apex, tuple(values))


def product(a: FinSet, b: FinSet) -> tuple[FinSet, FinMap, FinMap]:
    """Canonical product with pair-named elements in lexicographic order."""
    pairs = [(x, y) for x in a for y in b]
    carrier = FinSet(
        f"{a.name}x{b.name}", tuple(pair_name(x, y) for x, y in pairs)
    )
    fst = FinMap(carrier, a, tuple(x for x, _ in pairs))
    snd = FinMap(carrier, b, tuple(y for _, y in pairs))
    return carrier, fst, snd


def all_maps(dom: FinSet, cod: FinSet) -> Iterator[FinMap]:
    """Every map dom -> cod, in lexicographic order of value tuples."""
    if len(dom) == 0:
        yield FinMap(dom, cod, ())
        return
    if len(cod) == 0:
        return
    for values in itertools.product(cod.elements, repeat=len(dom)):
        yield FinMap(dom, cod, values)


def is_pullback_square(
    top: FinMap, left: FinMap, right: FinMap, bottom: FinMap
) -> bool:
    """Whether (top, right) exhibits top.dom as the pullback of bottom along right.

    Square:  top.dom --top--> right.dom
               |left             |right
             bottom.dom --bottom--> .
    Commutation plus bijectivity of the pairing onto the matching pairs.
    """
    if compose(right, top) != compose(bottom, left):
        return False
    seen = set()
    for m in top.dom:
        key = (left(m), top(m))
        if key in seen:
            return False
        seen.add(key)
    matching = sum(
        1 for a in bottom.dom for b in right.dom if bottom(a) == right(b)
    )
    return len(seen) == matching
