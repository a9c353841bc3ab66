"""Property suites: seeded random instances, exact checks, reproducible reports.

Every suite function takes one instance's generator plus the size bounds and
returns (checks passed, checks failed, counterexample text or None).  Reports
assemble in instance order, so runs are byte-identical for a fixed seed and
bounds regardless of thread count.
"""

from __future__ import annotations

import random
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Optional

from . import fibdual, jets, kripke, polyfun, relations
from .finset import (
    FinMap,
    FinSet,
    all_maps,
    compose,
    is_monic,
    pair_into_pullback,
    pullback,
    span_leq,
)
from .instances import (
    induced_adjacency,
    rand_adjacency,
    rand_ball_pair,
    rand_bundle,
    rand_finset,
    rand_map,
    rand_partial_map,
    rand_preserving_relations,
    rand_relation,
    rand_subobject,
    rng_for,
    trim_bundle,
)
from .polyfun import Bundle, SliceMorphism, slice_homs
from .relations import Relation, ball_relation
from .workspace import Workspace, serialize_workspace

Outcome = tuple[int, int, Optional[str]]
SuiteFn = Callable[[random.Random, int, int], Outcome]


def _counterexample(reason: str, ws: Workspace) -> str:
    return f"# {reason}\n{serialize_workspace(ws)}"


class _Checker:
    """Counts checks and keeps the first failure's serialized instance."""

    def __init__(self, ws: Workspace):
        self.ws = ws
        self.passed = 0
        self.failed = 0
        self.counterexample: Optional[str] = None

    def check(self, ok: bool, reason: str) -> bool:
        if ok:
            self.passed += 1
        else:
            self.failed += 1
            if self.counterexample is None:
                self.counterexample = _counterexample(reason, self.ws)
        return ok

    def outcome(self) -> Outcome:
        return self.passed, self.failed, self.counterexample


def _stage(size: int) -> FinSet:
    return FinSet(f"stage{size}", tuple(f"x{i}" for i in range(size)))


def _register(ws: Workspace, **kinds) -> None:
    for kind, entries in kinds.items():
        getattr(ws, kind).update(entries)


# --------------------------------------------------------------------------
# finset laws


def suite_pullback_laws(rng: random.Random, max_obj: int, max_fiber: int) -> Outcome:
    a = rand_finset(rng, "A", max_obj)
    b = rand_finset(rng, "B", max_obj)
    c = rand_finset(rng, "C", max_obj, min_size=1)
    f = rand_map(rng, a, c)
    p = rand_map(rng, b, c)
    ws = Workspace()
    _register(ws, objects={"A": a, "B": b, "C": c}, maps={"f": f, "p": p})
    t = _Checker(ws)
    pb = pullback(f, p)
    expected = sum(
        sum(1 for x in a if f(x) == z) * sum(1 for y in b if p(y) == z) for z in c
    )
    t.check(len(pb.apex) == expected, "pullback apex size disagrees with the pair count")
    t.check(
        compose(f, pb.to_left) == compose(p, pb.to_right),
        "pullback square does not commute",
    )
    if is_monic(f):
        t.check(is_monic(pb.to_right), "pullback of a monic is not monic")
    if is_monic(p):
        t.check(is_monic(pb.to_left), "pullback of a monic is not monic")
    for size in range(3):
        stage = _stage(size)
        cones = [
            (ca, cb)
            for ca in all_maps(stage, a)
            for cb in all_maps(stage, b)
            if compose(f, ca) == compose(p, cb)
        ]
        for ca, cb in cones:
            med = pair_into_pullback(ca, cb, pb)
            ok = compose(pb.to_left, med) == ca and compose(pb.to_right, med) == cb
            t.check(ok, "mediating map does not factor the cone")
            rivals = [
                m
                for m in all_maps(stage, pb.apex)
                if compose(pb.to_left, m) == ca and compose(pb.to_right, m) == cb
            ]
            t.check(rivals == [med], "mediating map is not unique")
    d = rand_finset(rng, "D", max_obj, min_size=1)
    g = rand_map(rng, c, d)
    e2 = rand_finset(rng, "E2", max_obj, min_size=1)
    h = rand_map(rng, d, e2)
    t.check(
        compose(h, compose(g, f)) == compose(compose(h, g), f),
        "composition is not associative",
    )
    t.check(compose(f, FinMap.identity(a)) == f, "right identity law fails")
    t.check(compose(FinMap.identity(c), f) == f, "left identity law fails")
    x = rand_finset(rng, "X", max_obj)
    u = rand_subobject(rng, a, x)
    u2 = rand_subobject(rng, a, x)
    witness = span_leq(u.span, u2.span)
    t.check(
        (witness is not None) == (u.pair_set <= u2.pair_set),
        "span order disagrees with pair-set containment",
    )
    if witness is not None:
        t.check(
            compose(u2.span.left, witness) == u.span.left
            and compose(u2.span.right, witness) == u.span.right,
            "span witness does not commute",
        )
    reflexive = span_leq(u.span, u.span)
    t.check(
        reflexive == FinMap.identity(u.span.apex),
        "span order is not reflexive with the identity witness",
    )
    return t.outcome()


# --------------------------------------------------------------------------
# kripke laws


def brute_force_leq(
    u: kripke.SubobjectAtStage, u2: kripke.SubobjectAtStage, max_stage: int
) -> bool:
    """The quantifier itself: every element of u at every later stage is in u2.

    Probes are deduplicated by their image pair-set, on which membership
    only depends.
    """
    probes: set[frozenset] = set()
    for size in range(max_stage + 1):
        stage = _stage(size)
        for alpha in all_maps(stage, u.stage):
            for a in all_maps(stage, u.over):
                probes.add(frozenset(zip(a.values, alpha.values)))
    for probe in sorted(probes, key=lambda s: (len(s), sorted(s))):
        if probe <= u.pair_set and not probe <= u2.pair_set:
            return False
    return True


def suite_extensionality(rng: random.Random, max_obj: int, max_fiber: int) -> Outcome:
    a = rand_finset(rng, "A", max_obj)
    x = rand_finset(rng, "X", max_obj)
    u = rand_subobject(rng, a, x)
    u2 = rand_subobject(rng, a, x)
    ws = Workspace()
    _register(ws, objects={"A": a, "X": x})
    t = _Checker(ws)
    direct = kripke.sub_leq(u, u2)
    via_legs = kripke.extensionality_leq(u, u2)
    brute = brute_force_leq(u, u2, max_stage=2)
    t.check(direct == via_legs, "leg membership test disagrees with containment")
    t.check(direct == brute, "stage quantification disagrees with containment")
    legs = u.span
    t.check(
        kripke.member(legs.left, legs.right, u) is not None,
        "canonical legs are not a member of their own subobject",
    )
    return t.outcome()


def suite_membership(rng: random.Random, max_obj: int, max_fiber: int) -> Outcome:
    a = rand_finset(rng, "A", max_obj, min_size=1)
    x = rand_finset(rng, "X", max_obj, min_size=1)
    y = rand_finset(rng, "Y", max_obj, min_size=1)
    z = rand_finset(rng, "Z", max_obj)
    u = rand_subobject(rng, a, x)
    elem = rand_map(rng, y, a)
    alpha = rand_map(rng, y, x)
    beta = rand_map(rng, z, y)
    ws = Workspace()
    _register(ws, objects={"A": a, "X": x, "Y": y, "Z": z}, maps={"a": elem, "alpha": alpha, "beta": beta})
    t = _Checker(ws)
    direct = kripke.member(elem, alpha, u)
    via_stage = kripke.member(
        elem, FinMap.identity(y), kripke.change_of_stage(u, alpha)
    )
    t.check(
        (direct is None) == (via_stage is None),
        "membership disagrees with membership after change of stage",
    )
    if direct is not None:
        t.check(
            kripke.member(compose(elem, beta), compose(alpha, beta), u) is not None,
            "membership is not stable under change of stage",
        )
        t.check(
            compose(u.span.left, direct.map) == elem
            and compose(u.span.right, direct.map) == alpha,
            "witness does not commute with the canonical legs",
        )
    t.check(
        kripke.change_of_stage(kripke.change_of_stage(u, alpha), beta)
        == kripke.change_of_stage(u, compose(alpha, beta)),
        "change of stage is not strictly functorial",
    )
    a2 = rand_finset(rng, "A2", max_obj, min_size=1)
    a3 = rand_finset(rng, "A3", max_obj, min_size=1)
    f = rand_map(rng, a2, a)
    f2 = rand_map(rng, a3, a2)
    t.check(
        kripke.counterimage(f2, kripke.counterimage(f, u))
        == kripke.counterimage(compose(f, f2), u),
        "counterimage is not strictly functorial",
    )
    t.check(
        kripke.counterimage(f, kripke.change_of_stage(u, alpha))
        == kripke.change_of_stage(kripke.counterimage(f, u), alpha),
        "counterimage does not commute with change of stage",
    )
    return t.outcome()


def suite_yoneda(rng: random.Random, max_obj: int, max_fiber: int) -> Outcome:
    a = rand_finset(rng, "A", max_obj)
    x = rand_finset(rng, "X", max_obj)
    e = rand_finset(rng, "E", max_obj, min_size=1)
    u = rand_subobject(rng, a, x)
    s = rand_partial_map(rng, u, e)
    ws = Workspace()
    _register(ws, objects={"A": a, "X": x, "E": e})
    t = _Checker(ws)
    rebuilt = kripke.yoneda_construct(u, kripke.law_of(s))
    t.check(rebuilt == s, "tabulating a partial map's own law does not rebuild it")
    for _ in range(5):
        if not u.pairs or len(e) < 2:
            break
        rival_values = tuple(rng.choice(e.elements) for _ in u.pairs)
        if rival_values == s.values:
            continue
        rival = kripke.PartialMapAtStage(u, e, rival_values)
        idx = next(i for i, (rv, sv) in enumerate(zip(rival_values, s.values)) if rv != sv)
        pa, px = u.pairs[idx]
        probe_a = FinMap(_stage(1), a, (pa,))
        probe_x = FinMap(_stage(1), x, (px,))
        t.check(
            kripke.value(rival, probe_a, probe_x) != kripke.value(s, probe_a, probe_x),
            "a rival partial map agrees with the law on a deciding probe",
        )
    if u.pairs:
        y = rand_finset(rng, "Y", max_obj, min_size=1)
        z = rand_finset(rng, "Z", max_obj)
        picks = [rng.choice(u.pairs) for _ in y]
        elem = FinMap(y, a, tuple(pa for pa, _ in picks))
        alpha = FinMap(y, x, tuple(px for _, px in picks))
        beta = rand_map(rng, z, y)
        t.check(
            compose(kripke.value(s, elem, alpha), beta)
            == kripke.value(s, compose(elem, beta), compose(alpha, beta)),
            "value is not stable under change of stage",
        )
    f_dom = rand_finset(rng, "A2", max_obj)
    f = rand_map(rng, f_dom, a)
    q_cod = rand_finset(rng, "F", max_obj, min_size=1)
    q = rand_map(rng, e, q_cod)
    if f is not None:
        t.check(
            kripke.postcompose(q, kripke.precompose(s, f))
            == kripke.precompose(kripke.postcompose(q, s), f),
            "pre- and post-composition do not commute",
        )
    return t.outcome()


# --------------------------------------------------------------------------
# relations laws


def suite_monad_stability(rng: random.Random, max_obj: int, max_fiber: int) -> Outcome:
    a = rand_finset(rng, "A", max_obj, min_size=1)
    b = rand_finset(rng, "B", max_obj, min_size=1)
    x = rand_finset(rng, "X", max_obj, min_size=1)
    y = rand_finset(rng, "Y", max_obj, min_size=1)
    z = rand_finset(rng, "Z", max_obj)
    r = rand_relation(rng, a, b)
    belem = rand_map(rng, x, b)
    alpha = rand_map(rng, y, x)
    beta = rand_map(rng, z, y)
    ws = Workspace()
    _register(ws, objects={"A": a, "B": b, "X": x}, relations={"R": r}, maps={"b": belem})
    t = _Checker(ws)
    moved = kripke.change_of_stage(relations.monad(r, belem), alpha)
    direct = relations.monad(r, compose(belem, alpha))
    t.check(moved == direct, "monad is not stable under change of stage")
    t.check(
        kripke.change_of_stage(moved, beta)
        == relations.monad(r, compose(belem, compose(alpha, beta))),
        "iterated change of stage does not collapse",
    )
    diag = Relation.diagonal(a)
    aelem = rand_map(rng, x, a)
    t.check(
        relations.monad(diag, aelem).pair_set
        == frozenset((aelem(v), v) for v in x),
        "diagonal monad is not the element's own graph",
    )
    return t.outcome()


def suite_morphisms(rng: random.Random, max_obj: int, max_fiber: int) -> Outcome:
    f, f0, rel_src, rel_dst = rand_preserving_relations(rng, max_obj)
    ws = Workspace()
    _register(
        ws,
        objects={"A": f.dom, "B": f.cod, "A0": f0.dom, "B0": f0.cod},
        maps={"f": f, "f0": f0},
        relations={"RA": rel_src, "RB": rel_dst},
    )
    t = _Checker(ws)
    t.check(
        relations.check_preserves(f, f0, rel_src, rel_dst) is not None,
        "a relation drawn inside the counterimage is not preserved",
    )
    loose = rand_relation(rng, f.dom, f0.dom)
    oracle = all(
        (f(p), f0(p0)) in rel_dst.pair_set for p, p0 in loose.pairs
    )
    t.check(
        (relations.check_preserves(f, f0, loose, rel_dst) is not None) == oracle,
        "preservation test disagrees with the direct pairwise scan",
    )
    g, ball_a, ball_b = rand_ball_pair(rng, max_obj)
    t.check(
        relations.check_preserves(g, g, ball_a.base, ball_b.base) is not None,
        "a graph morphism does not preserve equal-radius balls",
    )
    carrier = rand_finset(rng, "G", max_obj, min_size=1)
    adjacency = rand_adjacency(rng, carrier)
    r1 = rng.randint(0, 2)
    r2 = rng.randint(0, 2)
    small = ball_relation(adjacency, r1).base
    other = ball_relation(adjacency, r2).base
    big = ball_relation(adjacency, r1 + r2).base
    composite = frozenset(
        (p, q)
        for p, mid in small.pairs
        for mid2, q in other.pairs
        if mid == mid2
    )
    t.check(
        big.pair_set <= composite,
        "ball at the summed radius escapes the composite of the two balls",
    )
    t.check(
        relations.is_reflexive(big) and relations.is_symmetric(big),
        "ball relation lost reflexivity or symmetry",
    )
    t.check(
        relations.is_reflexive(big) == relations.is_reflexive_elementwise(big)
        and relations.is_symmetric(big) == relations.is_symmetric_elementwise(big),
        "elementwise and pair-set reflexivity/symmetry disagree",
    )
    loose_endo = rand_relation(rng, carrier, carrier)
    t.check(
        relations.is_reflexive(loose_endo)
        == relations.is_reflexive_elementwise(loose_endo),
        "elementwise reflexivity disagrees on a random endo-relation",
    )
    t.check(
        relations.is_symmetric(loose_endo)
        == relations.is_symmetric_elementwise(loose_endo),
        "elementwise symmetry disagrees on a random endo-relation",
    )
    return t.outcome()


# --------------------------------------------------------------------------
# jets laws


def product_of_fibers(r: Relation, p: FinMap, a0: str) -> int:
    result = 1
    for a, b in r.pairs:
        if b == a0:
            result *= sum(1 for e in p.dom if p(e) == a)
    return result


def check_fiber_count(rng: random.Random, max_obj: int, max_fiber: int) -> Outcome:
    a = rand_finset(rng, "A", max_obj, min_size=1)
    a0 = rand_finset(rng, "A0", max_obj, min_size=1)
    r = rand_relation(rng, a, a0)
    p = rand_bundle(rng, a, max_fiber)
    ws = Workspace()
    _register(ws, objects={"A": a, "A0": a0, "E": p.total}, relations={"R": r}, maps={"p": p.map})
    t = _Checker(ws)
    jb = jets.jet_bundle(r, p.map)
    for point in a0:
        t.check(
            len(jb.fiber(point)) == product_of_fibers(r, p.map, point),
            f"jet fiber at {point!r} disagrees with the product of bundle fibers",
        )
    t.check(
        len(jb.total) == sum(product_of_fibers(r, p.map, point) for point in a0),
        "jet total size disagrees with the sum of fiber products",
    )
    return t.outcome()


def check_classify(rng: random.Random, max_obj: int, max_fiber: int) -> Outcome:
    a = rand_finset(rng, "A", max_obj, min_size=1)
    a0 = rand_finset(rng, "A0", max_obj, min_size=1)
    r = rand_relation(rng, a, a0)
    p = rand_bundle(rng, a, min(max_fiber, 2))
    ws = Workspace()
    _register(ws, objects={"A": a, "A0": a0, "E": p.total}, relations={"R": r}, maps={"p": p.map})
    t = _Checker(ws)
    jb = jets.jet_bundle(r, p.map)
    stage1 = _stage(1)
    for base in all_maps(stage1, a0):
        for j in jets.enumerate_jets(r, base, p.map):
            cl = jets.classify(jb, j)
            matches = [
                m
                for m in all_maps(stage1, jb.total)
                if compose(jb.projection, m) == base
                and jets.restrict_jet(jb.generic_jet, m) == j
            ]
            t.check(matches == [cl], "classifying map is not the unique one at a point")
    stage2 = _stage(2)
    for base in all_maps(stage2, a0):
        count = 1
        for x in stage2:
            count *= len(jb.fiber(base(x)))
        if count > 64:
            continue
        jets_here = jets.enumerate_jets(r, base, p.map)
        seen = set()
        for j in jets_here:
            cl = jets.classify(jb, j)
            t.check(
                jets.restrict_jet(jb.generic_jet, cl) == j,
                "pulling the generic jet back does not rebuild the jet",
            )
            seen.add(cl.values)
        t.check(
            len(seen) == len(jets_here) == count,
            "classification at a two-point stage is not a bijection",
        )
    for alpha in all_maps(stage1, stage2):
        for base in all_maps(stage2, a0):
            jets_here = jets.enumerate_jets(r, base, p.map)
            if len(jets_here) > 16:
                continue
            for j in jets_here:
                t.check(
                    compose(jets.classify(jb, j), alpha)
                    == jets.classify(jb, jets.restrict_jet(j, alpha)),
                    "classification is not natural in the stage",
                )
    return t.outcome()


def _random_vertical(
    rng: random.Random, src: Bundle, dst: Bundle
) -> Optional[SliceMorphism]:
    values = []
    for e in src.total:
        fiber = dst.fiber(src.map(e))
        if not fiber:
            return None
        values.append(rng.choice(fiber))
    return SliceMorphism(src, dst, FinMap(src.total, dst.total, tuple(values)))


def check_phi_laws(rng: random.Random, max_obj: int, max_fiber: int) -> Outcome:
    size = max(2, min(max_obj, 3))
    f, f0, rel_a, rel_b = rand_preserving_relations(rng, size)
    c_src = rand_finset(rng, "C", size, min_size=1)
    c0 = rand_finset(rng, "C0", size, min_size=1)
    g = rand_map(rng, f.cod, c_src)
    g0 = rand_map(rng, f0.cod, c0)
    # The image relation makes (g, g0) preserving by construction.
    rel_c = Relation.from_pairs(
        c_src, c0, ((g(v), g0(v0)) for v, v0 in rel_b.pairs)
    )
    ws = Workspace()
    _register(
        ws,
        objects={"A": f.dom, "B": f.cod, "C": c_src, "A0": f0.dom, "B0": f0.cod, "C0": c0},
        maps={"f": f, "f0": f0, "g": g, "g0": g0},
        relations={"RA": rel_a, "RB": rel_b, "RC": rel_c},
    )
    t = _Checker(ws)
    upper = relations.check_preserves(f, f0, rel_a, rel_b)
    lower = relations.check_preserves(g, g0, rel_b, rel_c)
    if upper is None or lower is None:
        t.check(False, "generated morphisms fail preservation")
        return t.outcome()
    p = rand_bundle(rng, c_src, min(max_fiber, 2), tag="p")
    stage = _stage(rng.randint(0, 2))
    a0 = rand_map(rng, stage, f0.dom)
    t.check(
        jets.phi_compose_check(upper, lower, p.map, a0),
        "stacked transports disagree with the composite transport",
    )
    fm, ball_a, ball_b = rand_ball_pair(rng, size)
    classical = relations.check_preserves(fm, fm, ball_a.base, ball_b.base)
    pb_bundle = rand_bundle(rng, fm.cod, min(max_fiber, 2), min_fiber=1, tag="q")
    top = rand_bundle(rng, fm.cod, min(max_fiber, 2), tag="r")
    r_map_values = []
    ok = True
    for y in top.total:
        fiber = pb_bundle.fiber(top.map(y))
        if not fiber:
            ok = False
            break
        r_map_values.append(rng.choice(fiber))
    if ok and classical is not None:
        r_map = FinMap(top.total, pb_bundle.total, tuple(r_map_values))
        a0c = rand_map(rng, _stage(rng.randint(0, 2)), fm.dom)
        t.check(
            jets.cluex_check(classical, r_map, pb_bundle.map, a0c),
            "transport does not commute with pushing jets along a vertical",
        )
    naturality_stage = _stage(1)
    base = rand_map(rng, _stage(2), f0.dom)
    alpha = rand_map(rng, naturality_stage, _stage(2))
    ctx = jets.PhiContext.of(upper, rand_bundle(rng, f.cod, min(max_fiber, 2), tag="n").map)
    for j in jets.enumerate_jets(rel_b, compose(f0, base), ctx.bundle)[:4]:
        t.check(
            jets.restrict_jet(jets.phi(ctx, base, j), alpha)
            == jets.phi(ctx, compose(base, alpha), jets.restrict_jet(j, alpha)),
            "transport is not natural in the base element",
        )
    return t.outcome()


def check_poly_iso(
    rng: random.Random, max_obj: int, max_fiber: int, endo_cap: int = 512
) -> Outcome:
    a = rand_finset(rng, "A", max_obj, min_size=1)
    a0 = rand_finset(rng, "A0", max_obj, min_size=1)
    r = rand_relation(rng, a, a0)
    p = rand_bundle(rng, a, max_fiber)
    ws = Workspace()
    _register(ws, objects={"A": a, "A0": a0, "E": p.total}, relations={"R": r}, maps={"p": p.map})
    t = _Checker(ws)
    poly, jb, iso = jets.polynomial_iso(r, p.map)
    t.check(iso.is_iso(), "polynomial bundle is not isomorphic to the jet bundle")
    t.check(
        compose(jb.projection, iso.arrow) == poly.map,
        "isomorphism does not commute with the projections",
    )
    legs = r.span
    companion = trim_bundle(p)
    pairs = [(p, companion), (companion, p)]
    endo_count = 1
    for e in p.total:
        endo_count *= len(p.fiber(p.map(e)))
    if endo_count <= endo_cap:
        pairs.append((p, p))
    for src, dst in pairs:
        _, jb_dst, iso_dst = jets.polynomial_iso(r, dst.map)
        _, jb_src, iso_src = jets.polynomial_iso(r, src.map)
        for v in slice_homs(src, dst):
            moved_poly = polyfun.polynomial_map(legs.left, legs.right, v)
            moved_jets = jets.jet_on_vertical(jb_src, jb_dst, v.arrow)
            lhs = compose(iso_dst.arrow, moved_poly.arrow)
            rhs = compose(moved_jets, iso_src.arrow)
            t.check(lhs == rhs, "isomorphism is not natural in the bundle")
    return t.outcome()


def check_adjunction(rng: random.Random, max_obj: int, max_fiber: int) -> Outcome:
    m = rand_finset(rng, "M", max_obj, min_size=1)
    b = rand_finset(rng, "B", max_obj, min_size=1)
    d = rand_map(rng, m, b)
    y = rand_bundle(rng, b, min(max_fiber, 2), tag="y")
    q = rand_bundle(rng, m, min(max_fiber, 2), tag="q")
    ws = Workspace()
    _register(ws, objects={"M": m, "B": b, "Y": y.total, "Q": q.total}, maps={"d": d, "y": y.map, "q": q.map})
    t = _Checker(ws)
    t.check(adjunction_instance_ok(d, y, q), "adjunction laws fail")
    return t.outcome()


def adjunction_instance_ok(d: FinMap, y: Bundle, q: Bundle) -> bool:
    """Roundtrips, hom-set cardinalities, and both triangle identities."""
    bij = polyfun.adjunction_bijection(d, y, q)
    pulled = bij.pulled_left
    lower = list(slice_homs(pulled, q))
    upper = list(slice_homs(y, bij.product.result))
    if len(lower) != len(upper):
        return False
    for hom in lower:
        if bij.to_total(bij.to_base(hom)) != hom:
            return False
    for hom in upper:
        if bij.to_base(bij.to_total(hom)) != hom:
            return False
    unit = polyfun.adjunction_unit(d, y)
    lifted_unit = polyfun.pullback_vertical(d, unit)
    dp_pulled = polyfun.dependent_product(d, pulled)
    tri1 = polyfun.compose_slice(dp_pulled.counit, lifted_unit)
    if tri1 != SliceMorphism.identity(pulled):
        return False
    dp = bij.product
    unit_at = polyfun.adjunction_unit(d, dp.result)
    moved_counit = polyfun.dependent_product_map(d, dp.counit)
    tri2 = polyfun.compose_slice(moved_counit, unit_at)
    if tri2 != SliceMorphism.identity(dp.result):
        return False
    return True


def check_beck_chevalley(rng: random.Random, max_obj: int, max_fiber: int) -> Outcome:
    b = rand_finset(rng, "B", max_obj, min_size=1)
    b0 = rand_finset(rng, "B0", max_obj, min_size=1)
    a0 = rand_finset(rng, "A0", max_obj, min_size=1)
    g = rand_map(rng, a0, b0)
    r = rand_relation(rng, b, b0)
    q = rand_bundle(rng, b, min(max_fiber, 2), tag="q")
    ws = Workspace()
    _register(ws, objects={"A0": a0, "B": b, "B0": b0, "F": q.total}, maps={"g": g, "q": q.map}, relations={"R": r})
    t = _Checker(ws)
    t.check(
        jets.beck_chevalley_check(g, r, q.map, max_stage=1),
        "pulled-back jet bundle does not represent jets along the map",
    )
    legs = r.span
    sq = pullback(g, legs.right)
    sm = polyfun.SpanMorphism(
        src_left=compose(legs.left, sq.to_right),
        src_right=sq.to_left,
        dst_left=legs.left,
        dst_right=legs.right,
        on_left=FinMap.identity(b),
        on_mid=sq.to_right,
        on_right=g,
    )
    t.check(sm.right_square_is_pullback(), "pulled-back span square is not a pullback")
    y = rand_bundle(rng, b, min(max_fiber, 2), tag="y")
    mate = polyfun.mate_transform(sm, y)
    t.check(mate.is_iso(), "mate along a pullback square is not invertible")
    return t.outcome()


def check_terminality(rng: random.Random, max_obj: int, max_fiber: int) -> Outcome:
    carrier = rand_finset(rng, "A", min(max_obj, 2), min_size=1)
    adjacency = rand_adjacency(rng, carrier)
    ball = ball_relation(adjacency, 1)
    p = rand_bundle(rng, carrier, min(max_fiber, 2), tag="e")
    ws = Workspace()
    _register(ws, objects={"A": carrier, "E": p.total}, relations={"R": ball.base}, maps={"p": p.map})
    t = _Checker(ws)
    legs = ball.base.span
    t.check(
        fibdual.distributivity_terminal(legs.left, legs.right, p, max_total=3),
        "generic jet is not terminal among comorphisms over the span",
    )
    return t.outcome()


def check_global_functor(rng: random.Random, max_obj: int, max_fiber: int) -> Outcome:
    size = min(max_obj, 3)
    a4 = rand_finset(rng, "A4", size, min_size=1)
    a3 = rand_finset(rng, "A3", size, min_size=1)
    a2 = rand_finset(rng, "A2", size, min_size=1)
    a1 = rand_finset(rng, "A1", size, min_size=1)
    f3 = rand_map(rng, a3, a4)
    f2 = rand_map(rng, a2, a3)
    f1 = rand_map(rng, a1, a2)
    adj4 = rand_adjacency(rng, a4)
    adj3 = induced_adjacency(f3, adj4)
    adj2 = induced_adjacency(f2, adj3)
    adj1 = induced_adjacency(f1, adj2)
    rels = {
        a4: ball_relation(adj4, 1),
        a3: ball_relation(adj3, 1),
        a2: ball_relation(adj2, 1),
        a1: ball_relation(adj1, 1),
    }
    p4 = rand_bundle(rng, a4, min(max_fiber, 2), min_fiber=1, tag="e4")
    p3 = rand_bundle(rng, a3, min(max_fiber, 2), min_fiber=1, tag="e3")
    p2 = rand_bundle(rng, a2, min(max_fiber, 2), min_fiber=1, tag="e2")
    p1 = rand_bundle(rng, a1, min(max_fiber, 2), min_fiber=1, tag="e1")
    ws = Workspace()
    _register(
        ws,
        objects={"A1": a1, "A2": a2, "A3": a3, "A4": a4},
        maps={"f1": f1, "f2": f2, "f3": f3},
        relations={"adj4": adj4},
    )
    t = _Checker(ws)
    chain = []
    for f, src, dst in ((f1, p1, p2), (f2, p2, p3), (f3, p3, p4)):
        vertical = _random_vertical(rng, polyfun.pullback_bundle(f, dst), src)
        if vertical is None:
            t.check(False, "chain generation produced an empty fiber")
            return t.outcome()
        chain.append(fibdual.Comorphism(f, src, dst, vertical))
    c1, c2, c3 = chain
    left_assoc = fibdual.comorphism_compose(fibdual.comorphism_compose(c3, c2), c1)
    right_assoc = fibdual.comorphism_compose(c3, fibdual.comorphism_compose(c2, c1))
    t.check(left_assoc == right_assoc, "comorphism composition is not associative")
    jb1 = jets.jet_bundle(rels[a1].base, p1.map)
    t.check(
        fibdual.global_jet(fibdual.identity_comorphism(p1), rels)
        == fibdual.identity_comorphism(Bundle(jb1.projection)),
        "jet functor does not preserve the identity comorphism",
    )
    whole = fibdual.global_jet(right_assoc, rels)
    steps = fibdual.comorphism_compose(
        fibdual.global_jet(c3, rels),
        fibdual.comorphism_compose(
            fibdual.global_jet(c2, rels), fibdual.global_jet(c1, rels)
        ),
    )
    t.check(whole == steps, "jet functor does not preserve composition")
    ident = fibdual.comorphism_compose(c1, fibdual.identity_comorphism(p1))
    t.check(ident == c1, "composition with the identity comorphism changes a comorphism")
    t.check(
        fibdual.is_cartesian(fibdual.cartesian_comorphism(f1, p2)),
        "a bare pullback square is not recognized as Cartesian",
    )
    return t.outcome()


# --------------------------------------------------------------------------
# runner


SUITES: dict[str, SuiteFn] = {
    "pullback-laws": suite_pullback_laws,
    "extensionality": suite_extensionality,
    "membership": suite_membership,
    "yoneda": suite_yoneda,
    "monad-stability": suite_monad_stability,
    "morphisms": suite_morphisms,
    "fiber-count": check_fiber_count,
    "classify": check_classify,
    "phi-laws": check_phi_laws,
    "poly-iso": check_poly_iso,
    "adjunction": check_adjunction,
    "beck-chevalley": check_beck_chevalley,
    "terminality": check_terminality,
    "global-functor": check_global_functor,
}


@dataclass(frozen=True)
class SuiteReport:
    suite: str
    seed: int
    max_obj: int
    max_fiber: int
    trials: int
    instances: int
    passed: int
    failed: int
    first_counterexample: Optional[str]

    @property
    def ok(self) -> bool:
        return self.failed == 0

    def render_text(self) -> str:
        line = (
            f"suite={self.suite} seed={self.seed} max-obj={self.max_obj} "
            f"max-fiber={self.max_fiber} trials={self.trials} "
            f"instances={self.instances} passed={self.passed} "
            f"failed={self.failed} result={'PASS' if self.ok else 'FAIL'}"
        )
        if self.first_counterexample is not None:
            body = "\n".join(
                "  " + ln for ln in self.first_counterexample.rstrip().splitlines()
            )
            line += "\ncounterexample:\n" + body
        return line

    def render_records(self) -> str:
        fields = [
            "suite",
            self.suite,
            str(self.seed),
            str(self.max_obj),
            str(self.max_fiber),
            str(self.trials),
            str(self.instances),
            str(self.passed),
            str(self.failed),
            "PASS" if self.ok else "FAIL",
        ]
        out = "\t".join(fields)
        if self.first_counterexample is not None:
            flat = self.first_counterexample.rstrip().replace("\n", "\\n")
            out += "\n" + "\t".join(["counterexample", self.suite, flat])
        return out


def run_suite(
    name: str,
    seed: int = 42,
    max_obj: int = 3,
    max_fiber: int = 3,
    trials: int = 200,
    jobs: int = 1,
) -> SuiteReport:
    fn = SUITES[name]

    def one(index: int) -> Outcome:
        return fn(rng_for(seed, name, index), max_obj, max_fiber)

    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(one, range(trials)))
    else:
        results = [one(i) for i in range(trials)]
    passed = sum(r[0] for r in results)
    failed = sum(r[1] for r in results)
    first = next((r[2] for r in results if r[2] is not None), None)
    return SuiteReport(
        name, seed, max_obj, max_fiber, trials, len(results), passed, failed, first
    )


def run_suites(
    names: list[str],
    seed: int = 42,
    max_obj: int = 3,
    max_fiber: int = 3,
    trials: int = 200,
    jobs: int = 1,
) -> list[SuiteReport]:
    return [
        run_suite(name, seed, max_obj, max_fiber, trials, jobs) for name in names
    ]
