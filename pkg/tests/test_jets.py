import pytest

from finjet.errors import NotReflexive, NotVertical
from finjet.finset import FinMap, FinSet, all_maps, compose, element, pullback
from finjet.instances import fixture_p3_parts
from finjet.jets import (
    PhiContext,
    beck_chevalley_check,
    classify,
    cluex_check,
    enumerate_jets,
    jet_bundle,
    jet_on_vertical,
    map_jet,
    mediating_map,
    phi,
    phi_compose_check,
    polynomial_iso,
    reflexive_value,
    restrict_jet,
)
from finjet.polyfun import Bundle
from finjet.relations import (
    EndoRelation,
    Relation,
    RelationMorphism,
    ball_relation,
    check_preserves,
)

A, E, P_MAP, BALL = fixture_p3_parts()
R = BALL.base
POINT = FinSet("1", ("*",))


def point(carrier, name):
    return element(carrier, name)


def test_enumerate_jets_empty_monad_gives_one_jet():
    empty_rel = Relation.from_pairs(A, A, [])
    jets = enumerate_jets(empty_rel, point(A, "a"), P_MAP)
    assert len(jets) == 1
    assert jets[0].table == {}


def test_enumerate_jets_p3_counts():
    assert len(enumerate_jets(R, point(A, "a"), P_MAP)) == 2
    assert len(enumerate_jets(R, point(A, "b"), P_MAP)) == 4
    assert len(enumerate_jets(R, point(A, "c"), P_MAP)) == 2


def test_enumerate_jets_product_of_fibers_oracle():
    for a0 in A:
        expected = 1
        for a, b in R.pairs:
            if b == a0:
                expected *= sum(1 for e in E if P_MAP(e) == a)
        assert len(enumerate_jets(R, point(A, a0), P_MAP)) == expected


def test_jet_bundle_p3_shape():
    jb = jet_bundle(R, P_MAP)
    assert [len(jb.fiber(a0)) for a0 in A] == [2, 4, 2]
    assert len(jb.total) == 8


def test_jet_bundle_diagonal_relation_is_the_bundle():
    diag = Relation.diagonal(A)
    jb = jet_bundle(diag, P_MAP)
    assert [len(jb.fiber(a0)) for a0 in A] == [2, 1, 2]
    for t in jb.total:
        a0 = jb.projection(t)
        (entry,) = jb.table_of(t).items()
        assert entry[0] == a0 and P_MAP(entry[1]) == a0


def test_jet_bundle_of_identity_bundle():
    jb = jet_bundle(R, FinMap.identity(A))
    assert all(len(jb.fiber(a0)) == 1 for a0 in A)


def test_classify_singleton_and_empty_stage():
    jb = jet_bundle(R, P_MAP)
    for a0 in A:
        for j in enumerate_jets(R, point(A, a0), P_MAP):
            cl = classify(jb, j)
            assert jb.projection(cl("*")) == a0
            assert restrict_jet(jb.generic_jet, cl) == j
    empty = FinSet("X0", ())
    j_empty = enumerate_jets(R, FinMap(empty, A, ()), P_MAP)[0]
    assert classify(jb, j_empty).values == ()


def test_classify_roundtrip_from_known_map():
    jb = jet_bundle(R, P_MAP)
    stage = FinSet("X", ("x1", "x2"))
    for h in list(all_maps(stage, jb.total))[:10]:
        j = restrict_jet(jb.generic_jet, h)
        assert classify(jb, j) == h


def test_classify_uniqueness_by_enumeration():
    jb = jet_bundle(R, P_MAP)
    for size in (1, 2):
        stage = FinSet("X", tuple(f"x{i}" for i in range(size)))
        for base in all_maps(stage, A):
            for j in enumerate_jets(R, base, P_MAP):
                matches = [
                    m
                    for m in all_maps(stage, jb.total)
                    if restrict_jet(jb.generic_jet, m) == j
                ]
                assert matches == [classify(jb, j)]


def test_restrict_jet_matches_monad_restriction():
    jb = jet_bundle(R, P_MAP)
    stage = FinSet("X", ("x1", "x2"))
    base = FinMap(stage, A, ("a", "b"))
    y = FinSet("Y", ("y",))
    alpha = FinMap(y, stage, ("x2",))
    for j in enumerate_jets(R, base, P_MAP):
        moved = restrict_jet(j, alpha)
        assert moved.at == compose(base, alpha)
        for (a, yy), e in moved.table.items():
            assert e == j.table[(a, alpha(yy))]


def classical_morphism():
    big = FinSet("B", ("u", "v"))
    adj_big = Relation.from_pairs(big, big, [("u", "v"), ("v", "u")])
    f = FinMap(A, big, ("u", "v", "u"))
    pulled = Relation.from_pairs(
        A, A, [(x, y) for x in A for y in A if (f(x), f(y)) in adj_big.pair_set]
    )
    ball_a = ball_relation(pulled, 1)
    ball_b = ball_relation(adj_big, 1)
    morphism = check_preserves(f, f, ball_a.base, ball_b.base)
    assert morphism is not None
    e_big = FinSet("EB", ("u.0", "u.1", "v.0"))
    p_big = FinMap(e_big, big, ("u", "u", "v"))
    return morphism, p_big


def test_phi_identity_morphism_repacks_pairs():
    morphism = check_preserves(FinMap.identity(A), FinMap.identity(A), R, R)
    ctx = PhiContext.of(morphism, P_MAP)
    for j in enumerate_jets(R, point(A, "b"), P_MAP):
        moved = phi(ctx, point(A, "b"), j)
        for (a, x), e in moved.table.items():
            assert e == ctx.square.pair_index[(a, j.table[(a, x)])]


def test_phi_empty_monad():
    morphism, p_big = classical_morphism()
    sparse = Relation.from_pairs(morphism.rel_src.src, morphism.rel_src.dst, [])
    trimmed = check_preserves(morphism.f, morphism.f0, sparse, morphism.rel_dst)
    ctx = PhiContext.of(trimmed, p_big)
    j = enumerate_jets(morphism.rel_dst, compose(morphism.f0, point(A, "a")), p_big)[0]
    moved = phi(ctx, point(A, "a"), j)
    assert moved.table == {}


def test_phi_counts_and_injectivity_on_fixture():
    morphism, p_big = classical_morphism()
    ctx = PhiContext.of(morphism, p_big)
    covered = 0
    for a0_name in A:
        a0 = point(A, a0_name)
        source = enumerate_jets(morphism.rel_dst, compose(morphism.f0, a0), p_big)
        images = {phi(ctx, a0, j).section.underlying.values for j in source}
        targets = enumerate_jets(morphism.rel_src, a0, ctx.pulled)
        assert images <= {j.section.underlying.values for j in targets}
        # Injective exactly when f covers the target monad from the source one.
        source_points = {
            a for a, b in morphism.rel_src.pairs if b == a0_name
        }
        target_points = {
            b for b, b0 in morphism.rel_dst.pairs if b0 == morphism.f0(a0_name)
        }
        if {morphism.f(a) for a in source_points} >= target_points:
            assert len(images) == len(source)
            covered += 1
    assert covered > 0


def test_phi_preservation_violation_raises():
    loose = Relation.full(A, A)
    sparse = Relation.from_pairs(A, A, [("a", "a")])
    with pytest.raises(ValueError):
        # Not a morphism at all: constructing the context must already fail.
        RelationMorphism(FinMap.identity(A), FinMap.identity(A), loose, sparse)


def test_phi_compose_on_fixture_chain():
    morphism, p_big = classical_morphism()
    ident = check_preserves(
        FinMap.identity(morphism.rel_src.src),
        FinMap.identity(morphism.rel_src.dst),
        morphism.rel_src,
        morphism.rel_src,
    )
    for size in (0, 1, 2):
        stage = FinSet("X", tuple(f"x{i}" for i in range(size)))
        for a0 in list(all_maps(stage, A))[:4]:
            assert phi_compose_check(ident, morphism, p_big, a0)


def test_cluex_on_fixture():
    morphism, p_big = classical_morphism()
    f_total = FinSet("FT", ("u.f0", "v.f0"))
    q_map_total = FinMap(f_total, morphism.rel_dst.src, ("u", "v"))
    r_map = FinMap(f_total, p_big.dom, ("u.1", "v.0"))
    assert compose(p_big, r_map) == q_map_total
    for size in (0, 1, 2):
        stage = FinSet("X", tuple(f"x{i}" for i in range(size)))
        for a0 in list(all_maps(stage, A))[:4]:
            assert cluex_check(morphism, r_map, p_big, a0)


def test_cluex_identity_vertical_reduces_to_phi_equality():
    morphism, p_big = classical_morphism()
    r_map = FinMap.identity(p_big.dom)
    assert cluex_check(morphism, r_map, p_big, point(A, "b"))


def test_map_jet_requires_verticality():
    jb = jet_bundle(R, P_MAP)
    j = jb.point_jet(jb.total.elements[0])
    with pytest.raises(NotVertical):
        map_jet(j, FinMap.identity(E), FinMap(E, A, tuple("a" for _ in E)))


def test_jet_on_vertical_identity_and_composition():
    jb = jet_bundle(R, P_MAP)
    assert jet_on_vertical(jb, jb, FinMap.identity(E)) == FinMap.identity(jb.total)
    smaller_total = FinSet("E2", ("a.0", "b.0", "c.0"))
    q_map = FinMap(smaller_total, A, ("a", "b", "c"))
    jb_small = jet_bundle(R, q_map)
    r1 = FinMap(smaller_total, E, ("a0", "b0", "c0"))
    arrow = jet_on_vertical(jb_small, jb, r1)
    assert compose(jb.projection, arrow) == jb_small.projection
    collapse = FinMap(E, smaller_total, ("a.0", "a.0", "b.0", "c.0", "c.0"))
    first = jet_on_vertical(jb, jb_small, collapse)
    composite = jet_on_vertical(jb, jb, compose(r1, collapse))
    assert composite == compose(arrow, first)


def test_jet_on_vertical_fiber_collapse_recount():
    smaller_total = FinSet("E2", ("a.0", "b.0", "c.0"))
    q_map = FinMap(smaller_total, A, ("a", "b", "c"))
    jb_small = jet_bundle(R, q_map)
    assert [len(jb_small.fiber(a0)) for a0 in A] == [1, 1, 1]


def test_reflexive_value_on_fixture():
    for j in enumerate_jets(R, point(A, "b"), P_MAP):
        got = reflexive_value(BALL, j)
        assert P_MAP(got("*")) == "b"
        assert got("*") == j.table[("b", "*")]


def test_reflexive_value_diagonal_is_the_jet():
    diag = EndoRelation.of(Relation.diagonal(A))
    for j in enumerate_jets(diag.base, point(A, "a"), P_MAP):
        assert reflexive_value(diag, j).values == (j.table[("a", "*")],)


def test_reflexive_value_requires_reflexivity():
    not_reflexive = EndoRelation.of(Relation.from_pairs(A, A, [("a", "b"), ("b", "a")]))
    jb = jet_bundle(R, P_MAP)
    with pytest.raises(NotReflexive):
        reflexive_value(not_reflexive, jb.point_jet(jb.total.elements[0]))


def test_reflexive_value_empty_stage():
    empty = FinSet("X0", ())
    j = enumerate_jets(R, FinMap(empty, A, ()), P_MAP)[0]
    assert reflexive_value(BALL, j).values == ()


def test_beck_chevalley_identity_and_constant():
    assert beck_chevalley_check(FinMap.identity(A), R, P_MAP, max_stage=1)
    a0 = FinSet("A0", ("z1", "z2"))
    constant = FinMap.constant(a0, A, "b")
    assert beck_chevalley_check(constant, R, P_MAP, max_stage=1)


def test_beck_chevalley_random_shape():
    a0 = FinSet("A0", ("z1", "z2", "z3"))
    g = FinMap(a0, A, ("a", "c", "c"))
    assert beck_chevalley_check(g, R, P_MAP, max_stage=2)


def test_mediating_map_matches_pointwise_phi():
    morphism, p_big = classical_morphism()
    ctx = PhiContext.of(morphism, p_big)
    jb_dst = jet_bundle(morphism.rel_dst, p_big)
    jb_src = jet_bundle(morphism.rel_src, ctx.pulled)
    mediated = mediating_map(morphism, p_big)
    sq = pullback(morphism.f0, jb_dst.projection)
    for el in sq.apex:
        a0 = sq.to_left(el)
        jet = jb_dst.point_jet(sq.to_right(el))
        expected = classify(jb_src, phi(ctx, point(A, a0), jet))("*")
        assert mediated.arrow(el) == expected


def test_mate_agrees_with_jet_transport_through_iso():
    from finjet.polyfun import SpanMorphism, mate_transform, pullback_vertical

    morphism, p_big = classical_morphism()
    sm = SpanMorphism(
        src_left=morphism.rel_src.span.left,
        src_right=morphism.rel_src.span.right,
        dst_left=morphism.rel_dst.span.left,
        dst_right=morphism.rel_dst.span.right,
        on_left=morphism.f,
        on_mid=morphism.mid,
        on_right=morphism.f0,
    )
    mate = mate_transform(sm, Bundle(p_big))
    mediated = mediating_map(morphism, p_big)
    _, _, iso_dst = polynomial_iso(morphism.rel_dst, p_big)
    ctx = PhiContext.of(morphism, p_big)
    _, _, iso_src = polynomial_iso(morphism.rel_src, ctx.pulled)
    lifted = pullback_vertical(morphism.f0, iso_dst)
    assert compose(mediated.arrow, lifted.arrow) == compose(
        iso_src.arrow, mate.arrow
    )


def test_polynomial_iso_on_fixture():
    poly, jb, iso = polynomial_iso(R, P_MAP)
    assert iso.is_iso()
    assert compose(jb.projection, iso.arrow) == poly.map
    assert [len(jb.fiber(a0)) for a0 in A] == [2, 4, 2]


def test_polynomial_iso_diagonal():
    diag = Relation.diagonal(A)
    poly, jb, iso = polynomial_iso(diag, P_MAP)
    assert iso.is_iso()
    assert len(poly.total) == len(E)
