"""Stage semantics: subobjects at a stage, partial maps, membership, value.

A subobject of A at stage X is kept in canonical form as a pair-set inside
A x X; a jointly monic span embeds injectively there, and two spans are
equivalent exactly when they produce the same pair-set.  All the
change-of-stage equations then hold as strict equalities of pair-sets.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import cached_property
from typing import Callable, Iterable, Mapping, Optional

from .errors import (
    NotInSupport,
    NotJointlyMonic,
    OverMismatch,
    StageMismatch,
    SupportNotContained,
    TargetMismatch,
    UnstableLaw,
)
from .finset import (
    FinMap,
    FinSet,
    Span,
    compose,
    is_jointly_monic,
    pair_name,
    pullback,
)


@dataclass(frozen=True)
class SubobjectAtStage:
    """Canonical form of a subobject of `over` at stage `stage`.

    `pairs` is sorted by (index in over, index in stage); it is the one
    representative of the whole equivalence class of jointly monic spans.
    """

    over: FinSet
    stage: FinSet
    pairs: tuple[tuple[str, str], ...]

    def __post_init__(self):
        for a, x in self.pairs:
            if a not in self.over or x not in self.stage:
                raise ValueError(f"pair ({a},{x}) escapes {self.over.name} x {self.stage.name}")
        if self.pairs != _sort_pairs(self.over, self.stage, self.pairs):
            raise ValueError("pairs not in canonical order; use from_pairs")

    @classmethod
    def from_pairs(
        cls, over: FinSet, stage: FinSet, pairs: Iterable[tuple[str, str]]
    ) -> "SubobjectAtStage":
        return cls(over, stage, _sort_pairs(over, stage, set(pairs)))

    @classmethod
    def full(cls, over: FinSet, stage: FinSet) -> "SubobjectAtStage":
        return cls.from_pairs(over, stage, ((a, x) for a in over for x in stage))

    @classmethod
    def empty(cls, over: FinSet, stage: FinSet) -> "SubobjectAtStage":
        return cls(over, stage, ())

    @cached_property
    def pair_set(self) -> frozenset[tuple[str, str]]:
        return frozenset(self.pairs)

    @cached_property
    def span(self) -> Span:
        """The canonical representing span: apex named by the pairs themselves."""
        apex = FinSet(
            f"sub({self.over.name},{self.stage.name})",
            tuple(pair_name(a, x) for a, x in self.pairs),
        )
        left = FinMap(apex, self.over, tuple(a for a, _ in self.pairs))
        right = FinMap(apex, self.stage, tuple(x for _, x in self.pairs))
        return Span(left, right)

    @cached_property
    def apex_index(self) -> Mapping[tuple[str, str], str]:
        return {
            (a, x): name
            for (a, x), name in zip(self.pairs, self.span.apex.elements)
        }

    def __len__(self) -> int:
        return len(self.pairs)


def _sort_pairs(over, stage, pairs):
    return tuple(
        sorted(pairs, key=lambda p: (over.index[p[0]], stage.index[p[1]]))
    )


def canonicalize(s: Span) -> SubobjectAtStage:
    """Canonical pair-set of a jointly monic span A <- M -> X."""
    if not is_jointly_monic(s):
        raise NotJointlyMonic("span does not represent a subobject")
    return SubobjectAtStage.from_pairs(
        s.left.cod, s.right.cod, ((s.left(m), s.right(m)) for m in s.apex)
    )


def sub_leq(u: SubobjectAtStage, u2: SubobjectAtStage) -> bool:
    if u.over != u2.over:
        raise OverMismatch("subobjects over different objects")
    if u.stage != u2.stage:
        raise StageMismatch("subobjects at different stages")
    return u.pair_set <= u2.pair_set


def change_of_stage(u: SubobjectAtStage, alpha: FinMap) -> SubobjectAtStage:
    """Pull the stage back along alpha: Y -> X."""
    if alpha.cod != u.stage:
        raise StageMismatch(
            f"map into {alpha.cod.name!r} cannot change stage {u.stage.name!r}"
        )
    return SubobjectAtStage.from_pairs(
        u.over, alpha.dom, ((a, y) for y in alpha.dom for a in u.over if (a, alpha(y)) in u.pair_set)
    )


def counterimage(f: FinMap, u: SubobjectAtStage) -> SubobjectAtStage:
    """Pull the A-end back along f: A' -> A."""
    if f.cod != u.over:
        raise OverMismatch(
            f"map into {f.cod.name!r} cannot take counterimage over {u.over.name!r}"
        )
    return SubobjectAtStage.from_pairs(
        f.dom, u.stage, ((a2, x) for a2 in f.dom for x in u.stage if (f(a2), x) in u.pair_set)
    )


@dataclass(frozen=True)
class Witness:
    """The unique factorization through the canonical span proving membership."""

    subobject: SubobjectAtStage
    map: FinMap  # Y -> canonical apex


def member(a: FinMap, alpha: FinMap, u: SubobjectAtStage) -> Optional[Witness]:
    """Membership of the element a: Y -> A at the later stage alpha: Y -> X."""
    if a.cod != u.over:
        raise OverMismatch("element does not land in the subobject's object")
    if alpha.cod != u.stage:
        raise StageMismatch("stage change does not land in the subobject's stage")
    if a.dom != alpha.dom:
        raise StageMismatch("element and stage change defined at different stages")
    values = []
    for y in a.dom:
        key = (a(y), alpha(y))
        name = u.apex_index.get(key)
        if name is None:
            return None
        values.append(name)
    return Witness(u, FinMap(a.dom, u.span.apex, tuple(values)))


@dataclass(frozen=True)
class PartialMapAtStage:
    """A value table on the canonical apex of `support`, into `target`."""

    support: SubobjectAtStage
    target: FinSet
    values: tuple[str, ...]  # aligned with support.pairs

    def __post_init__(self):
        if len(self.values) != len(self.support.pairs):
            raise ValueError("value table does not cover the support")
        for v in self.values:
            if v not in self.target:
                raise ValueError(f"value {v!r} not in target {self.target.name!r}")

    @classmethod
    def from_table(
        cls,
        support: SubobjectAtStage,
        target: FinSet,
        table: Mapping[tuple[str, str], str],
    ) -> "PartialMapAtStage":
        if set(table) != set(support.pairs):
            raise ValueError("value table does not match the support pairs")
        return cls(support, target, tuple(table[p] for p in support.pairs))

    @cached_property
    def table(self) -> Mapping[tuple[str, str], str]:
        return dict(zip(self.support.pairs, self.values))

    @cached_property
    def leg(self) -> FinMap:
        """The value table as a map out of the canonical apex."""
        return FinMap(self.support.span.apex, self.target, self.values)


@dataclass(frozen=True)
class PartialSection:
    """A partial map that splits the bundle p: E -> A over its support."""

    underlying: PartialMapAtStage
    bundle: FinMap  # p: E -> A

    def __post_init__(self):
        if self.bundle.dom != self.underlying.target:
            raise ValueError("bundle total is not the partial map's target")
        if self.bundle.cod != self.underlying.support.over:
            raise ValueError("bundle base is not the partial map's object")
        for (a, _), e in zip(self.underlying.support.pairs, self.underlying.values):
            if self.bundle(e) != a:
                raise ValueError(f"value {e!r} is not in the fiber over {a!r}")

    @property
    def support(self) -> SubobjectAtStage:
        return self.underlying.support


def value(s: PartialMapAtStage, a: FinMap, alpha: FinMap) -> FinMap:
    """The element s(a): Y -> E, defined when a is a member of the support."""
    w = member(a, alpha, s.support)
    if w is None:
        raise NotInSupport("element is not a member of the partial map's support")
    return compose(s.leg, w.map)


def postcompose(q: FinMap, s: PartialMapAtStage) -> PartialMapAtStage:
    if q.dom != s.target:
        raise TargetMismatch("map does not start at the partial map's target")
    return PartialMapAtStage(s.support, q.cod, tuple(q(v) for v in s.values))


def precompose(s: PartialMapAtStage, f: FinMap) -> PartialMapAtStage:
    """Restrict along f: A' -> A; the support becomes the counterimage."""
    if f.cod != s.support.over:
        raise OverMismatch("map does not land in the partial map's object")
    support = counterimage(f, s.support)
    return PartialMapAtStage(
        support, s.target, tuple(s.table[(f(a2), x)] for a2, x in support.pairs)
    )


def stage_restrict(s: PartialMapAtStage, alpha: FinMap) -> PartialMapAtStage:
    """The partial map considered at the later stage alpha: Y -> X."""
    support = change_of_stage(s.support, alpha)
    return PartialMapAtStage(
        support, s.target, tuple(s.table[(a, alpha(y))] for a, y in support.pairs)
    )


def restrict_section(
    t: PartialSection, f: FinMap, u2: SubobjectAtStage
) -> PartialSection:
    """Restrict a partial section of p along f: A' -> A to the support u2.

    The result is a partial section of the canonical pullback of p along f;
    its value at (a', x) is the matching pair (a', t(f(a'), x)).
    """
    if f.cod != t.support.over:
        raise OverMismatch("map does not land in the section's base")
    if u2.over != f.dom or u2.stage != t.support.stage:
        raise StageMismatch("target support lives over the wrong ends")
    if not sub_leq(u2, counterimage(f, t.support)):
        raise SupportNotContained(
            "target support is not contained in the counterimage of the support"
        )
    square = pullback(f, t.bundle)
    table = {
        (a2, x): square.pair_index[(a2, t.underlying.table[(f(a2), x)])]
        for a2, x in u2.pairs
    }
    restricted = PartialMapAtStage.from_table(u2, square.apex, table)
    return PartialSection(restricted, square.to_left)


def extensionality_leq(u: SubobjectAtStage, u2: SubobjectAtStage) -> bool:
    """Decide containment by membership of the canonical legs.

    Containment of subobjects holds as soon as the canonical left leg of u,
    taken at the later stage given by its right leg, is a member of u2; this
    is the quantifier collapsed to its one decisive instance.
    """
    if u.over != u2.over:
        raise OverMismatch("subobjects over different objects")
    if u.stage != u2.stage:
        raise StageMismatch("subobjects at different stages")
    legs = u.span
    return member(legs.left, legs.right, u2) is not None


# Stages used to probe value laws for stability under change of stage.
_PROBE_STAGES = (FinSet("probe1", ("z1",)), FinSet("probe2", ("z1", "z2")))

ValueLaw = Callable[[FinMap, FinMap], FinMap]


def yoneda_construct(u: SubobjectAtStage, law: ValueLaw) -> PartialMapAtStage:
    """Tabulate a stable value law into the unique partial map it determines.

    The law receives an element a: Y -> A together with its stage change
    alpha: Y -> X and must return an element Y -> E.  It is evaluated once,
    on the canonical legs of u; stability under change of stage is then
    sampled along every map from a probe stage of size <= 2 into the apex.
    """
    legs = u.span
    tabulated = law(legs.left, legs.right)
    if tabulated.dom != legs.apex:
        raise ValueError("law did not return an element at the canonical stage")
    for probe in _PROBE_STAGES:
        if len(legs.apex) == 0 and len(probe) > 0:
            continue
        for values in itertools.product(legs.apex.elements, repeat=len(probe)):
            beta = FinMap(probe, legs.apex, values)
            via_composite = compose(tabulated, beta)
            via_law = law(compose(legs.left, beta), compose(legs.right, beta))
            if via_composite != via_law:
                raise UnstableLaw(
                    f"law is not stable along the probe {beta!r}"
                )
    return PartialMapAtStage(u, tabulated.cod, tabulated.values)


def law_of(s: PartialMapAtStage) -> ValueLaw:
    """The value law of an existing partial map (for roundtrip checks)."""
    return lambda a, alpha: value(s, a, alpha)
