"""The fibrewise dual of the codomain fibration: comorphisms and the global jet functor.

A comorphism from p' (over A') to p (over A) along f: A' -> A is kept in its
canonical form: the vertical map out of the canonical pullback f*(p) into p'.
Equality of comorphisms is then table equality.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Mapping, Optional

from .errors import ChainMismatch, NotJointlyMonic, PreservationViolated, ShapeMismatch
from .finset import FinMap, FinSet, Span, compose, is_jointly_monic, pullback
from .jets import jet_bundle, jet_on_vertical, mediating_map
from .polyfun import (
    Bundle,
    SliceMorphism,
    compose_slice,
    nest_pullback,
    pullback_bundle,
    pullback_vertical,
    relabel_identity,
)
from .relations import EndoRelation, Relation, check_preserves


@dataclass(frozen=True)
class Comorphism:
    """An arrow of the fibrewise dual fibration, in canonical vh form."""

    over: FinMap  # f: A' -> A
    src: Bundle  # over A'
    dst: Bundle  # over A
    vertical: SliceMorphism  # f*(dst) -> src, over A'

    def __post_init__(self):
        if self.src.base != self.over.dom or self.dst.base != self.over.cod:
            raise ShapeMismatch("bundles do not sit over the ends of the base map")
        if self.vertical.src != pullback_bundle(self.over, self.dst):
            raise ShapeMismatch("vertical part does not start at the canonical pullback")
        if self.vertical.dst != self.src:
            raise ShapeMismatch("vertical part does not end at the source bundle")


def identity_comorphism(p: Bundle) -> Comorphism:
    ident = FinMap.identity(p.base)
    return Comorphism(ident, p, p, relabel_identity(p))


def cartesian_comorphism(f: FinMap, p: Bundle) -> Comorphism:
    """The comorphism presented by a bare pullback square (identity vertical)."""
    pulled = pullback_bundle(f, p)
    return Comorphism(f, pulled, p, SliceMorphism.identity(pulled))


def vertical_comorphism(v: SliceMorphism) -> Comorphism:
    """The comorphism over the identity corresponding to a slice morphism.

    The fiber of the dual fibration is the opposite of the slice, so the
    slice morphism v: q -> q' becomes a comorphism from q' to q.
    """
    ident = FinMap.identity(v.src.base)
    return Comorphism(
        ident, v.dst, v.src, compose_slice(v, relabel_identity(v.src))
    )


def is_cartesian(c: Comorphism) -> bool:
    return c.vertical.is_iso()


def comorphism_compose(c2: Comorphism, c1: Comorphism) -> Comorphism:
    """Span composition: c1 from p'' to p' over f, then c2 from p' to p over g."""
    if c1.dst != c2.src:
        raise ChainMismatch("comorphisms do not chain end to end")
    if c1.over.cod != c2.over.dom:
        raise ChainMismatch("base maps do not compose")
    base = compose(c2.over, c1.over)
    nested = nest_pullback(c2.over, c1.over, c2.dst)
    lifted = pullback_vertical(c1.over, c2.vertical)
    vertical = compose_slice(c1.vertical, compose_slice(lifted, nested))
    return Comorphism(base, c1.src, c2.dst, vertical)


RelationAssignment = Mapping[FinSet, EndoRelation]


def global_jet(c: Comorphism, relations: RelationAssignment) -> Comorphism:
    """The jet functor on the fibrewise dual, one comorphism at a time.

    Every object in play carries an endo-relation; the base map must preserve
    them.  Vertical comorphisms go to the (opposite-variance) jet functor of
    the fiber, Cartesian ones to the mediating transport, and the general
    case is the composite of the two.
    """
    try:
        rel_src = relations[c.over.dom]
        rel_dst = relations[c.over.cod]
    except KeyError as exc:
        raise ShapeMismatch(f"no endo-relation assigned to {exc.args[0]!r}")
    morphism = check_preserves(c.over, c.over, rel_src.base, rel_dst.base)
    if morphism is None:
        raise PreservationViolated("base map does not preserve the endo-relations")
    pulled = pullback_bundle(c.over, c.dst)
    jb_pulled = jet_bundle(rel_src.base, pulled.map)
    jb_src = jet_bundle(rel_src.base, c.src.map)
    jb_dst = jet_bundle(rel_dst.base, c.dst.map)
    moved_vertical = SliceMorphism(
        Bundle(jb_pulled.projection),
        Bundle(jb_src.projection),
        jet_on_vertical(jb_pulled, jb_src, c.vertical.arrow),
    )
    vertical_image = vertical_comorphism(moved_vertical)
    cartesian_image = Comorphism(
        c.over,
        Bundle(jb_pulled.projection),
        Bundle(jb_dst.projection),
        mediating_map(morphism, c.dst.map),
    )
    return comorphism_compose(cartesian_image, vertical_image)


def generic_section_vertical(
    c: FinMap, d: FinMap, p: Bundle, jb=None
) -> SliceMorphism:
    """The generic section jet as the vertical part of its comorphism over d.

    Maps d*(J(p)) into c*(p) by evaluating each total element's own table at
    the span point it is paired with.
    """
    if jb is None:
        jb = jet_bundle(_span_relation(c, d), p.map)
    sq_d = pullback(d, jb.projection)
    sq_c = pullback(c, p.map)
    values = []
    for x in sq_d.apex:
        m = sq_d.to_left(x)
        t = sq_d.to_right(x)
        e = jb.table_of(t)[c(m)]
        values.append(sq_c.pair_index[(m, e)])
    arrow = FinMap(sq_d.apex, sq_c.apex, tuple(values))
    return SliceMorphism(Bundle(sq_d.to_left), Bundle(sq_c.to_left), arrow)


def _span_relation(c: FinMap, d: FinMap) -> Relation:
    if c.dom != d.dom:
        raise ShapeMismatch("span legs must share their apex")
    if not is_jointly_monic(Span(c, d)):
        raise NotJointlyMonic("span does not present a relation")
    return Relation.from_pairs(c.cod, d.cod, ((c(m), d(m)) for m in c.dom))


def distributivity_terminal(
    c: FinMap,
    d: FinMap,
    p: Bundle,
    candidate: Optional[SliceMorphism] = None,
    max_total: int = 4,
) -> bool:
    """Whether the generic section jet is terminal among comorphisms over d from c*(p).

    Enumerates every bundle over d's codomain with at most max_total elements
    (plus the jet bundle itself) and every vertical from its pullback into
    c*(p), and requires exactly one mediating vertical through the candidate
    (by default the true generic section jet).
    """
    relation = _span_relation(c, d)
    jb = jet_bundle(relation, p.map)
    jet_total = Bundle(jb.projection)
    epsilon = candidate if candidate is not None else generic_section_vertical(c, d, p, jb)
    sq_eps = pullback(d, jb.projection)
    pulled_c = Bundle(pullback(c, p.map).to_left)
    eps_lookup = dict(zip(epsilon.arrow.dom.elements, epsilon.arrow.values))
    base = d.cod
    candidates: list[Bundle] = [jet_total]
    for size in range(max_total + 1):
        carrier = FinSet(f"cand{size}", tuple(f"t{i}" for i in range(size)))
        if size == 0:
            candidates.append(Bundle(FinMap(carrier, base, ())))
            continue
        if len(base) == 0:
            continue
        for values in itertools.product(base.elements, repeat=size):
            candidates.append(Bundle(FinMap(carrier, base, values)))
    for t in candidates:
        sq_t = pullback(d, t.map)
        points = [(sq_t.to_left(x), sq_t.to_right(x)) for x in sq_t.apex]
        spots = {tt: i for i, tt in enumerate(t.total.elements)}
        u_options = [jet_total.fiber(t.map(tt)) for tt in t.total]
        transposed: dict[tuple[str, ...], int] = {}
        if all(u_options):
            for u_values in itertools.product(*u_options):
                key = tuple(
                    eps_lookup[sq_eps.pair_index[(m, u_values[spots[tt]])]]
                    for m, tt in points
                )
                transposed[key] = transposed.get(key, 0) + 1
        v_options = [pulled_c.fiber(m) for m, _ in points]
        if not all(v_options):
            # No verticals out of this pullback; nothing to mediate.
            continue
        for v_values in itertools.product(*v_options):
            if transposed.get(v_values, 0) != 1:
                return False
    return True
