"""Section jets over monads, jet bundles, classifying maps, and their laws."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import cached_property
from typing import Mapping

from .errors import (
    NotReflexive,
    NotVertical,
    PreservationViolated,
    ShapeMismatch,
)
from .finset import (
    FinMap,
    FinSet,
    PullbackResult,
    all_maps,
    compose,
    element,
    pair_into_pullback,
    pullback,
    table_label,
)
from .kripke import (
    PartialMapAtStage,
    PartialSection,
    stage_restrict,
    value,
    yoneda_construct,
)
from .polyfun import (
    Bundle,
    SliceMorphism,
    polynomial_product,
)
from .relations import EndoRelation, Relation, RelationMorphism, monad


@dataclass(frozen=True)
class SectionJet:
    """A partial section of the bundle whose support is exactly the monad of `at`."""

    relation: Relation  # from A to A0
    at: FinMap  # b: X -> A0
    section: PartialSection

    def __post_init__(self):
        if self.at.cod != self.relation.dst:
            raise ShapeMismatch("base element does not land in the relation's destination")
        if self.section.bundle.cod != self.relation.src:
            raise ShapeMismatch("bundle does not live over the relation's source")
        if self.section.support != monad(self.relation, self.at):
            raise ValueError("support is not the monad of the base element")

    @property
    def bundle(self) -> FinMap:
        return self.section.bundle

    @property
    def stage(self) -> FinSet:
        return self.at.dom

    @property
    def table(self) -> Mapping[tuple[str, str], str]:
        return self.section.underlying.table


def jet_from_table(
    r: Relation, b: FinMap, p: FinMap, table: Mapping[tuple[str, str], str]
) -> SectionJet:
    support = monad(r, b)
    pm = PartialMapAtStage.from_table(support, p.dom, table)
    return SectionJet(r, b, PartialSection(pm, p))


def enumerate_jets(r: Relation, b: FinMap, p: FinMap) -> tuple[SectionJet, ...]:
    """All section jets of p at b, in lexicographic order of their value tables.

    An empty monad contributes exactly one jet, the empty section.
    """
    if p.cod != r.src:
        raise ShapeMismatch("bundle does not live over the relation's source")
    support = monad(r, b)
    fibers: dict[str, tuple[str, ...]] = {}
    for a in r.src:
        fibers[a] = tuple(e for e in p.dom if p(e) == a)
    options = [fibers[a] for a, _ in support.pairs]
    jets = []
    for choice in itertools.product(*options):
        table = dict(zip(support.pairs, choice))
        jets.append(jet_from_table(r, b, p, table))
    return tuple(jets)


def restrict_jet(j: SectionJet, alpha: FinMap) -> SectionJet:
    """The jet considered at the later stage alpha: Y -> X."""
    if alpha.cod != j.stage:
        raise ShapeMismatch("stage change does not land at the jet's stage")
    moved = stage_restrict(j.section.underlying, alpha)
    return SectionJet(
        j.relation, compose(j.at, alpha), PartialSection(moved, j.bundle)
    )


def map_jet(j: SectionJet, r_map: FinMap, p: FinMap) -> SectionJet:
    """Push a jet of q forward along a vertical r_map: total(q) -> total(p)."""
    if compose(p, r_map) != j.bundle:
        raise NotVertical("map does not commute over the base")
    pm = PartialMapAtStage(
        j.section.underlying.support,
        p.dom,
        tuple(r_map(v) for v in j.section.underlying.values),
    )
    return SectionJet(j.relation, j.at, PartialSection(pm, p))


@dataclass(frozen=True)
class PhiContext:
    """A relation morphism with the canonical pullback of the bundle along f."""

    morphism: RelationMorphism
    bundle: FinMap  # p: E -> B, over the target relation's source
    square: PullbackResult  # canonical pullback of (f, p)

    def __post_init__(self):
        if self.bundle.cod != self.morphism.rel_dst.src:
            raise ShapeMismatch("bundle does not live over the target relation's source")
        if self.square != pullback(self.morphism.f, self.bundle):
            raise ShapeMismatch("square is not the canonical pullback of the bundle")

    @classmethod
    def of(cls, morphism: RelationMorphism, bundle: FinMap) -> "PhiContext":
        return cls(morphism, bundle, pullback(morphism.f, bundle))

    @property
    def pulled(self) -> FinMap:
        """p': the pulled-back bundle over the source relation's source."""
        return self.square.to_left


def phi(ctx: PhiContext, a0: FinMap, j: SectionJet) -> SectionJet:
    """Transport a jet of p at f0(a0) to a jet of the pulled-back bundle at a0.

    Built through the tabulation of the value law a |-> <a, j(f(a))>, then
    cross-checked against the direct table formula; the two must agree.
    """
    mor = ctx.morphism
    if a0.cod != mor.rel_src.dst:
        raise ShapeMismatch("base element does not land in the source relation's destination")
    if j.relation != mor.rel_dst or j.bundle != ctx.bundle:
        raise ShapeMismatch("jet does not belong to the context's target data")
    if j.at != compose(mor.f0, a0):
        raise ShapeMismatch("jet is not based at the image of the given element")
    support = monad(mor.rel_src, a0)
    for a, x in support.pairs:
        if (mor.f(a), x) not in j.section.support.pair_set:
            raise PreservationViolated(
                f"image of ({a},{x}) escapes the jet's support"
            )

    def law(a: FinMap, alpha: FinMap) -> FinMap:
        image_value = value(j.section.underlying, compose(mor.f, a), alpha)
        return pair_into_pullback(a, image_value, ctx.square)

    constructed = yoneda_construct(support, law)
    direct = {
        (a, x): ctx.square.pair_index[(a, j.table[(mor.f(a), x)])]
        for a, x in support.pairs
    }
    if constructed.table != direct:
        raise AssertionError("tabulated law disagrees with the direct formula")
    return SectionJet(
        mor.rel_src, a0, PartialSection(constructed, ctx.pulled)
    )


def phi_compose_check(
    upper: RelationMorphism, lower: RelationMorphism, p: FinMap, a0: FinMap
) -> bool:
    """Whether transporting along two stacked morphisms equals one composite step.

    The composite transport is computed with the canonical pullback along the
    composite base map and carried into the stacked apex by the comparison
    isomorphism, which the value law commutes with.
    """
    if upper.rel_dst != lower.rel_src:
        raise ShapeMismatch("relation morphisms do not chain")
    ctx_k = PhiContext.of(lower, p)
    ctx_h = PhiContext.of(upper, ctx_k.pulled)
    composite = upper.then(lower)
    ctx_whole = PhiContext.of(composite, p)
    tau = FinMap(
        ctx_whole.square.apex,
        ctx_h.square.apex,
        tuple(
            ctx_h.square.pair_index[
                (
                    ctx_whole.square.to_left(el),
                    ctx_k.square.pair_index[
                        (
                            upper.f(ctx_whole.square.to_left(el)),
                            ctx_whole.square.to_right(el),
                        )
                    ],
                )
            ]
            for el in ctx_whole.square.apex
        ),
    )
    mid_base = compose(upper.f0, a0)
    for j in enumerate_jets(lower.rel_dst, compose(lower.f0, mid_base), p):
        two_steps = phi(ctx_h, a0, phi(ctx_k, mid_base, j))
        one_step = map_jet(phi(ctx_whole, a0, j), tau, ctx_h.pulled)
        if two_steps != one_step:
            return False
    return True


@dataclass(frozen=True)
class JetBundle:
    """The bundle over A0 whose fiber at a0 collects all section jets at a0.

    Total elements are named "(a0|hash-of-table)"; the generic section jet
    lives at stage `total` and evaluates each element's own table.
    """

    relation: Relation  # from A to A0
    bundle: FinMap  # p: E -> A
    total: FinSet
    projection: FinMap  # total -> A0
    generic: PartialSection  # of bundle, at stage total

    @cached_property
    def generic_jet(self) -> SectionJet:
        return SectionJet(self.relation, self.projection, self.generic)

    @cached_property
    def fibers(self) -> Mapping[str, tuple[str, ...]]:
        out: dict[str, list[str]] = {a0: [] for a0 in self.relation.dst}
        for t in self.total:
            out[self.projection(t)].append(t)
        return {a0: tuple(ts) for a0, ts in out.items()}

    def fiber(self, a0: str) -> tuple[str, ...]:
        return self.fibers[a0]

    def table_of(self, t: str) -> dict[str, str]:
        a0 = self.projection(t)
        gen = self.generic.underlying.table
        return {
            a: gen[(a, t)]
            for a in self.relation.src
            if (a, a0) in self.relation.pair_set
        }

    @cached_property
    def _by_table(self) -> Mapping[tuple[str, tuple[tuple[str, str], ...]], str]:
        out = {}
        for t in self.total:
            a0 = self.projection(t)
            tab = tuple(sorted(self.table_of(t).items(), key=lambda kv: self.relation.src.index[kv[0]]))
            out[(a0, tab)] = t
        return out

    def element_for(self, a0: str, table: Mapping[str, str]) -> str:
        ordered = tuple(
            (a, table[a])
            for a in self.relation.src
            if (a, a0) in self.relation.pair_set
        )
        return self._by_table[(a0, ordered)]

    def point_jet(self, t: str) -> SectionJet:
        """The jet the total element t stands for, at its own base point."""
        return restrict_jet(self.generic_jet, element(self.total, t))


def jet_bundle(r: Relation, p: FinMap) -> JetBundle:
    if p.cod != r.src:
        raise ShapeMismatch("bundle does not live over the relation's source")
    fibers = {a: tuple(e for e in p.dom if p(e) == a) for a in r.src}
    names: list[str] = []
    bases: list[str] = []
    tables: dict[str, dict[str, str]] = {}
    for a0 in r.dst:
        around = tuple(a for a in r.src if (a, a0) in r.pair_set)
        for choice in itertools.product(*(fibers[a] for a in around)):
            tab = tuple(zip(around, choice))
            name = table_label(a0, tab)
            names.append(name)
            bases.append(a0)
            tables[name] = dict(tab)
    total = FinSet(f"J({p.dom.name})", tuple(names))
    projection = FinMap(total, r.dst, tuple(bases))
    support = monad(r, projection)
    generic_table = {(a, t): tables[t][a] for a, t in support.pairs}
    generic = PartialSection(
        PartialMapAtStage.from_table(support, p.dom, generic_table), p
    )
    return JetBundle(r, p, total, projection, generic)


def classify(jb: JetBundle, j: SectionJet) -> FinMap:
    """The unique map into the total whose pullback of the generic jet is j."""
    if j.relation != jb.relation or j.bundle != jb.bundle:
        raise ShapeMismatch("jet does not belong to this jet bundle")
    table = j.table
    values = []
    for x in j.stage:
        a0 = j.at(x)
        at_x = {
            a: table[(a, x)]
            for a in jb.relation.src
            if (a, a0) in jb.relation.pair_set
        }
        values.append(jb.element_for(a0, at_x))
    result = FinMap(j.stage, jb.total, tuple(values))
    if restrict_jet(jb.generic_jet, result) != j:
        raise AssertionError("classifying map does not reproduce the jet")
    return result


def jet_on_vertical(jb_q: JetBundle, jb_p: JetBundle, r_map: FinMap) -> FinMap:
    """The jet bundle functor on a vertical map between bundles over A."""
    if jb_q.relation != jb_p.relation:
        raise ShapeMismatch("jet bundles built from different relations")
    if compose(jb_p.bundle, r_map) != jb_q.bundle:
        raise NotVertical("map does not commute over the base")
    values = []
    for t in jb_q.total:
        a0 = jb_q.projection(t)
        moved = {a: r_map(e) for a, e in jb_q.table_of(t).items()}
        values.append(jb_p.element_for(a0, moved))
    arrow = FinMap(jb_q.total, jb_p.total, tuple(values))
    if compose(jb_p.projection, arrow) != jb_q.projection:
        raise AssertionError("vertical image does not commute with projections")
    return arrow


def maps_over(
    pb: PullbackResult, a0: FinMap
) -> tuple[FinMap, ...]:
    """All maps from a0's stage into a pullback apex whose left leg is a0."""
    per_point = []
    index: dict[str, list[str]] = {}
    for m in pb.apex:
        index.setdefault(pb.to_left(m), []).append(m)
    for x in a0.dom:
        per_point.append(tuple(index.get(a0(x), ())))
    out = []
    for values in itertools.product(*per_point):
        out.append(FinMap(a0.dom, pb.apex, values))
    return tuple(out)


def beck_chevalley_check(
    g: FinMap, r: Relation, q: FinMap, max_stage: int = 2
) -> bool:
    """Whether the pulled-back jet bundle represents jets along g, by construction.

    For every base element at stages of size <= max_stage, builds the two
    transposition maps between jets at the image and maps into the canonical
    pullback, and checks that they are mutually inverse and natural.
    """
    if g.cod != r.dst:
        raise ShapeMismatch("map does not land in the relation's destination")
    jb = jet_bundle(r, q)
    sq = pullback(g, jb.projection)

    def forward(a0: FinMap, j: SectionJet) -> FinMap:
        return pair_into_pullback(a0, classify(jb, j), sq)

    def backward(m: FinMap) -> SectionJet:
        return restrict_jet(jb.generic_jet, compose(sq.to_right, m))

    stages = [
        FinSet(f"stage{n}", tuple(f"x{i}" for i in range(n)))
        for n in range(max_stage + 1)
    ]
    transported: dict[tuple, FinMap] = {}
    for stage in stages:
        for a0 in all_maps(stage, g.dom):
            jets = enumerate_jets(r, compose(g, a0), q)
            over = maps_over(sq, a0)
            if len(jets) != len(over):
                return False
            seen = set()
            for j in jets:
                m = forward(a0, j)
                if m.values in seen:
                    return False
                seen.add(m.values)
                if m not in over:
                    return False
                if backward(m) != j:
                    return False
            for m in over:
                if forward(a0, backward(m)) != m:
                    return False
    # Naturality: transporting then restricting equals restricting then transporting.
    for small in stages:
        for big in stages:
            for alpha in all_maps(small, big):
                for a0 in all_maps(big, g.dom):
                    for j in enumerate_jets(r, compose(g, a0), q):
                        lhs = forward(compose(a0, alpha), restrict_jet(j, alpha))
                        rhs = compose(forward(a0, j), alpha)
                        if lhs != rhs:
                            return False
    return True


def cluex_check(
    morphism: RelationMorphism, r_map: FinMap, p: FinMap, a0: FinMap
) -> bool:
    """Whether transport commutes with pushing jets along a vertical map.

    The classical regime: one map acting on both ends of uniform
    endo-relations, a bundle p over the target, and a vertical r_map into it.
    """
    if morphism.f != morphism.f0:
        raise ShapeMismatch("classical check needs one map acting on both ends")
    q = compose(p, r_map)
    ctx_h = PhiContext.of(morphism, p)
    ctx_k = PhiContext.of(morphism, q)
    lifted = FinMap(
        ctx_k.square.apex,
        ctx_h.square.apex,
        tuple(
            ctx_h.square.pair_index[
                (ctx_k.square.to_left(el), r_map(ctx_k.square.to_right(el)))
            ]
            for el in ctx_k.square.apex
        ),
    )
    base_image = compose(morphism.f0, a0)
    for j in enumerate_jets(morphism.rel_dst, base_image, q):
        left = map_jet(phi(ctx_k, a0, j), lifted, ctx_h.pulled)
        right = phi(ctx_h, a0, map_jet(j, r_map, p))
        if left != right:
            return False
    return True


def reflexive_value(r: EndoRelation, j: SectionJet) -> FinMap:
    """The value of a jet at its own base point, available by reflexivity."""
    if not r.reflexive:
        raise NotReflexive("jet values at the base need a reflexive relation")
    if j.relation != r.base:
        raise ShapeMismatch("jet does not belong to this relation")
    return value(j.section.underlying, j.at, FinMap.identity(j.stage))


def mediating_map(morphism: RelationMorphism, p: FinMap) -> SliceMorphism:
    """The bundle-level transport f0*(J(p)) -> J'(f*(p)) induced by phi.

    Computed pointwise: each pulled-back total element names a jet at a point,
    which is transported by phi and classified again.
    """
    jb_dst = jet_bundle(morphism.rel_dst, p)
    ctx = PhiContext.of(morphism, p)
    jb_src = jet_bundle(morphism.rel_src, ctx.pulled)
    sq = pullback(morphism.f0, jb_dst.projection)
    values = []
    for el in sq.apex:
        a0 = sq.to_left(el)
        t = sq.to_right(el)
        point = element(morphism.f0.dom, a0)
        moved = phi(ctx, point, jb_dst.point_jet(t))
        values.append(classify(jb_src, moved)("*"))
    arrow = FinMap(sq.apex, jb_src.total, tuple(values))
    return SliceMorphism(
        Bundle(sq.to_left), Bundle(jb_src.projection), arrow
    )


def polynomial_iso(r: Relation, p: FinMap) -> tuple[Bundle, JetBundle, SliceMorphism]:
    """The explicit iso from the polynomial-functor bundle to the jet bundle.

    Both are computed from the same relation; the iso matches each section
    over the canonical span fibers with the jet table it encodes.
    """
    legs = r.span
    dp = polynomial_product(legs.left, legs.right, Bundle(p))
    jb = jet_bundle(r, p)
    sq_c = pullback(legs.left, p)
    values = []
    for el, a0, tab in dp.entries:
        table = {}
        for m, z in tab:
            table[legs.left(m)] = sq_c.to_right(z)
        values.append(jb.element_for(a0, table))
    arrow = FinMap(dp.result.total, jb.total, tuple(values))
    iso = SliceMorphism(dp.result, Bundle(jb.projection), arrow)
    return dp.result, jb, iso
