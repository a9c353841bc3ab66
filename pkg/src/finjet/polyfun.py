"""Slice calculus: pullback functors, dependent products, adjunction, mates.

The cleavage is fixed once and for all: pullbacks are the canonical pair-set
pullbacks and dependent products are canonical section tables.  Where two
routes produce the same object only up to re-association of pairs, the
re-association maps are constructed explicitly instead of being assumed away.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import cached_property
from typing import Iterator, Mapping

from .errors import NotVertical, ShapeMismatch, SquaresNotCommuting
from .finset import (
    FinMap,
    FinSet,
    PullbackResult,
    compose,
    is_pullback_square,
    pair_into_pullback,
    pullback,
    table_label,
)


@dataclass(frozen=True)
class Bundle:
    """An object of the slice over its codomain: a map E -> A."""

    map: FinMap

    @property
    def total(self) -> FinSet:
        return self.map.dom

    @property
    def base(self) -> FinSet:
        return self.map.cod

    @classmethod
    def identity(cls, a: FinSet) -> "Bundle":
        return cls(FinMap.identity(a))

    @cached_property
    def fibers(self) -> Mapping[str, tuple[str, ...]]:
        out: dict[str, list[str]] = {a: [] for a in self.base}
        for e in self.total:
            out[self.map(e)].append(e)
        return {a: tuple(es) for a, es in out.items()}

    def fiber(self, a: str) -> tuple[str, ...]:
        return self.fibers[a]


@dataclass(frozen=True)
class SliceMorphism:
    """A map between bundle totals commuting over the shared base."""

    src: Bundle
    dst: Bundle
    arrow: FinMap

    def __post_init__(self):
        if self.src.base != self.dst.base:
            raise ShapeMismatch("slice morphism between bundles over different bases")
        if self.arrow.dom != self.src.total or self.arrow.cod != self.dst.total:
            raise ShapeMismatch("arrow does not run between the bundle totals")
        if compose(self.dst.map, self.arrow) != self.src.map:
            raise NotVertical("arrow does not commute over the base")

    @classmethod
    def identity(cls, b: Bundle) -> "SliceMorphism":
        return cls(b, b, FinMap.identity(b.total))

    def is_iso(self) -> bool:
        return len(set(self.arrow.values)) == len(self.dst.total) == len(self.src.total)


def compose_slice(g: SliceMorphism, f: SliceMorphism) -> SliceMorphism:
    if f.dst != g.src:
        raise ShapeMismatch("slice morphisms do not chain")
    return SliceMorphism(f.src, g.dst, compose(g.arrow, f.arrow))


def invert_slice(m: SliceMorphism) -> SliceMorphism:
    if not m.is_iso():
        raise ShapeMismatch("slice morphism is not invertible")
    back = {v: e for e, v in zip(m.src.total.elements, m.arrow.values)}
    return SliceMorphism(
        m.dst, m.src, FinMap(m.dst.total, m.src.total, tuple(back[e] for e in m.dst.total))
    )


def slice_homs(src: Bundle, dst: Bundle) -> Iterator[SliceMorphism]:
    """Every slice morphism src -> dst, in lexicographic order of value tables."""
    candidates = [dst.fiber(src.map(e)) for e in src.total]
    if any(len(c) == 0 for c in candidates):
        return
    for values in itertools.product(*candidates):
        yield SliceMorphism(src, dst, FinMap(src.total, dst.total, values))


def pullback_bundle(f: FinMap, p: Bundle) -> Bundle:
    """The canonical pullback f*(p), as a bundle over f's domain."""
    if f.cod != p.base:
        raise ShapeMismatch("pullback along a map into a different base")
    return Bundle(pullback(f, p.map).to_left)


def pullback_square(f: FinMap, p: Bundle) -> PullbackResult:
    return pullback(f, p.map)


def pullback_vertical(f: FinMap, v: SliceMorphism) -> SliceMorphism:
    """f*(v): the pullback functor on a vertical map."""
    sq_src = pullback(f, v.src.map)
    sq_dst = pullback(f, v.dst.map)
    arrow = pair_into_pullback(
        sq_src.to_left, compose(v.arrow, sq_src.to_right), sq_dst
    )
    return SliceMorphism(Bundle(sq_src.to_left), Bundle(sq_dst.to_left), arrow)


def relabel_identity(p: Bundle) -> SliceMorphism:
    """The canonical iso id*(p) -> p (pullback along the identity relabels pairs)."""
    sq = pullback(FinMap.identity(p.base), p.map)
    return SliceMorphism(Bundle(sq.to_left), p, sq.to_right)


def flatten_pullback(outer: FinMap, inner: FinMap, p: Bundle) -> SliceMorphism:
    """The re-association inner*(outer*(p)) -> (outer o inner)*(p)."""
    sq_outer = pullback(outer, p.map)
    sq_inner = pullback(inner, sq_outer.to_left)
    sq_whole = pullback(compose(outer, inner), p.map)
    arrow = pair_into_pullback(
        sq_inner.to_left,
        compose(sq_outer.to_right, sq_inner.to_right),
        sq_whole,
    )
    return SliceMorphism(Bundle(sq_inner.to_left), Bundle(sq_whole.to_left), arrow)


def nest_pullback(outer: FinMap, inner: FinMap, p: Bundle) -> SliceMorphism:
    """The re-association (outer o inner)*(p) -> inner*(outer*(p))."""
    sq_outer = pullback(outer, p.map)
    sq_inner = pullback(inner, sq_outer.to_left)
    sq_whole = pullback(compose(outer, inner), p.map)
    middle = pair_into_pullback(
        compose(inner, sq_whole.to_left), sq_whole.to_right, sq_outer
    )
    arrow = pair_into_pullback(sq_whole.to_left, middle, sq_inner)
    return SliceMorphism(Bundle(sq_whole.to_left), Bundle(sq_inner.to_left), arrow)


@dataclass(frozen=True)
class DependentProduct:
    """The right adjoint to pullback along `along`, applied to `input`.

    The fiber of `result` at b is the set of sections of `input` over the
    `along`-fiber of b; `counit` evaluates a section at a point of that fiber.
    """

    along: FinMap  # d: M -> B
    input: Bundle  # q over M
    result: Bundle  # over B
    counit: SliceMorphism  # d*(result) -> input, over M
    entries: tuple[tuple[str, str, tuple[tuple[str, str], ...]], ...]
    # (element of result.total, base point, section table in M order)

    @cached_property
    def sections(self) -> Mapping[str, dict[str, str]]:
        return {el: dict(tab) for el, _, tab in self.entries}

    @cached_property
    def _by_table(self) -> Mapping[tuple[str, tuple[tuple[str, str], ...]], str]:
        return {(b, tab): el for el, b, tab in self.entries}

    def section_of(self, el: str) -> dict[str, str]:
        return self.sections[el]

    def element_for(self, b: str, table: Mapping[str, str]) -> str:
        ordered = tuple((m, table[m]) for m in self.along.dom if self.along(m) == b)
        return self._by_table[(b, ordered)]


def dependent_product(d: FinMap, q: Bundle) -> DependentProduct:
    if q.base != d.dom:
        raise ShapeMismatch("dependent product input must live over the map's domain")
    names: list[str] = []
    bases: list[str] = []
    entries: list[tuple[str, str, tuple[tuple[str, str], ...]]] = []
    for b in d.cod:
        fiber_points = [m for m in d.dom if d(m) == b]
        options = [q.fiber(m) for m in fiber_points]
        for choice in itertools.product(*options):
            tab = tuple(zip(fiber_points, choice))
            name = table_label(b, tab)
            names.append(name)
            bases.append(b)
            entries.append((name, b, tab))
    total = FinSet(f"sec({d.dom.name}->{d.cod.name};{q.total.name})", tuple(names))
    result = Bundle(FinMap(total, d.cod, tuple(bases)))
    sq = pullback(d, result.map)
    tables = {el: dict(tab) for el, _, tab in entries}
    counit_arrow = FinMap(
        sq.apex,
        q.total,
        tuple(tables[sq.to_right(x)][sq.to_left(x)] for x in sq.apex),
    )
    counit = SliceMorphism(Bundle(sq.to_left), q, counit_arrow)
    return DependentProduct(d, q, result, counit, tuple(entries))


def dependent_product_map(
    d: FinMap,
    v: SliceMorphism,
    dp_src: "DependentProduct | None" = None,
    dp_dst: "DependentProduct | None" = None,
) -> SliceMorphism:
    """Functoriality of the dependent product on a vertical map over d's domain.

    The two products may be passed in when already computed; being canonical,
    they are interchangeable with freshly computed ones.
    """
    dp_src = dp_src if dp_src is not None else dependent_product(d, v.src)
    dp_dst = dp_dst if dp_dst is not None else dependent_product(d, v.dst)
    values = []
    for el, b, tab in dp_src.entries:
        moved = {m: v.arrow(e) for m, e in tab}
        values.append(dp_dst.element_for(b, moved))
    arrow = FinMap(dp_src.result.total, dp_dst.result.total, tuple(values))
    return SliceMorphism(dp_src.result, dp_dst.result, arrow)


def adjunction_unit(d: FinMap, y: Bundle) -> SliceMorphism:
    """The unit y -> product-along-d of d*(y)."""
    if y.base != d.cod:
        raise ShapeMismatch("unit requires a bundle over the map's codomain")
    sq = pullback(d, y.map)
    dp = dependent_product(d, Bundle(sq.to_left))
    values = []
    for w in y.total:
        b = y.map(w)
        table = {
            m: sq.pair_index[(m, w)] for m in d.dom if d(m) == b
        }
        values.append(dp.element_for(b, table))
    arrow = FinMap(y.total, dp.result.total, tuple(values))
    return SliceMorphism(y, dp.result, arrow)


@dataclass(frozen=True)
class AdjunctionBijection:
    """Explicit mutually inverse transposition maps for pullback -| product."""

    along: FinMap  # d: M -> B
    left: Bundle  # y over B
    right: Bundle  # q over M
    product: DependentProduct  # of right along d
    square: PullbackResult  # of (d, left.map)

    @property
    def pulled_left(self) -> Bundle:
        return Bundle(self.square.to_left)

    def to_base(self, m: SliceMorphism) -> SliceMorphism:
        """Transpose d*(y) -> q into y -> product."""
        if m.src != self.pulled_left or m.dst != self.right:
            raise ShapeMismatch("morphism is not d*(y) -> q")
        values = []
        for w in self.left.total:
            b = self.left.map(w)
            table = {
                mm: m.arrow(self.square.pair_index[(mm, w)])
                for mm in self.along.dom
                if self.along(mm) == b
            }
            values.append(self.product.element_for(b, table))
        arrow = FinMap(self.left.total, self.product.result.total, tuple(values))
        return SliceMorphism(self.left, self.product.result, arrow)

    def to_total(self, n: SliceMorphism) -> SliceMorphism:
        """Transpose y -> product into d*(y) -> q."""
        if n.src != self.left or n.dst != self.product.result:
            raise ShapeMismatch("morphism is not y -> product")
        values = []
        for x in self.square.apex:
            m = self.square.to_left(x)
            w = self.square.to_right(x)
            values.append(self.product.section_of(n.arrow(w))[m])
        arrow = FinMap(self.square.apex, self.right.total, tuple(values))
        return SliceMorphism(self.pulled_left, self.right, arrow)


def adjunction_bijection(d: FinMap, y: Bundle, q: Bundle) -> AdjunctionBijection:
    if y.base != d.cod or q.base != d.dom:
        raise ShapeMismatch("bundles do not sit over the ends of the map")
    return AdjunctionBijection(d, y, q, dependent_product(d, q), pullback(d, y.map))


def polynomial_product(c: FinMap, d: FinMap, p: Bundle) -> DependentProduct:
    """Dependent product along d of the pullback along c (full structure)."""
    if c.dom != d.dom:
        raise ShapeMismatch("span legs must share their apex")
    if c.cod != p.base:
        raise ShapeMismatch("bundle does not live over the left leg's codomain")
    return dependent_product(d, pullback_bundle(c, p))


def polynomial_jet(c: FinMap, d: FinMap, p: Bundle) -> Bundle:
    """The composite polynomial functor applied to p: sections over span fibers."""
    return polynomial_product(c, d, p).result


def polynomial_map(
    c: FinMap,
    d: FinMap,
    v: SliceMorphism,
    dp_src: "DependentProduct | None" = None,
    dp_dst: "DependentProduct | None" = None,
) -> SliceMorphism:
    """The polynomial functor on a vertical map over c's codomain."""
    return dependent_product_map(d, pullback_vertical(c, v), dp_src, dp_dst)


@dataclass(frozen=True)
class SpanMorphism:
    """A commuting morphism between two spans (not assumed jointly monic).

        A' <--src_left-- M' --src_right--> B'
        |on_left         |on_mid           |on_right
        A  <--dst_left-- M  --dst_right--> B
    """

    src_left: FinMap
    src_right: FinMap
    dst_left: FinMap
    dst_right: FinMap
    on_left: FinMap
    on_mid: FinMap
    on_right: FinMap

    def __post_init__(self):
        if self.src_left.dom != self.src_right.dom or self.dst_left.dom != self.dst_right.dom:
            raise ShapeMismatch("span legs must share their apex")
        if compose(self.dst_left, self.on_mid) != compose(self.on_left, self.src_left):
            raise SquaresNotCommuting("left square does not commute")
        if compose(self.dst_right, self.on_mid) != compose(self.on_right, self.src_right):
            raise SquaresNotCommuting("right square does not commute")

    def right_square_is_pullback(self) -> bool:
        return is_pullback_square(
            self.src_right, self.on_mid, self.on_right, self.dst_right
        )


def mate_transform(sm: SpanMorphism, y: Bundle) -> SliceMorphism:
    """The pasted 2-cell g*(poly(y)) -> poly'(f*(y)) at the bundle y.

    poly is the polynomial functor of the lower span, poly' of the upper one;
    g and f are the right and left comparison maps.  When the right square is
    a pullback the result is invertible.
    """
    if y.base != sm.dst_left.cod:
        raise ShapeMismatch("bundle does not live over the lower span's left end")
    dp = polynomial_product(sm.dst_left, sm.dst_right, y)
    sq_c = pullback(sm.dst_left, y.map)
    sq_g = pullback(sm.on_right, dp.result.map)
    pulled = pullback_bundle(sm.on_left, y)
    sq_f = pullback(sm.on_left, y.map)
    dp2 = polynomial_product(sm.src_left, sm.src_right, pulled)
    sq_c2 = pullback(sm.src_left, pulled.map)
    values = []
    for x in sq_g.apex:
        b2 = sq_g.to_left(x)
        t = sq_g.to_right(x)
        section = dp.section_of(t)
        table = {}
        for m2 in sm.src_right.dom:
            if sm.src_right(m2) != b2:
                continue
            m = sm.on_mid(m2)
            e = sq_c.to_right(section[m])
            inner = sq_f.pair_index[(sm.src_left(m2), e)]
            table[m2] = sq_c2.pair_index[(m2, inner)]
        values.append(dp2.element_for(b2, table))
    arrow = FinMap(sq_g.apex, dp2.result.total, tuple(values))
    return SliceMorphism(Bundle(sq_g.to_left), dp2.result, arrow)
