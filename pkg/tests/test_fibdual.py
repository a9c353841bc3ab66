import pytest

from finjet.errors import ChainMismatch, NotJointlyMonic, PreservationViolated
from finjet.fibdual import (
    Comorphism,
    cartesian_comorphism,
    comorphism_compose,
    distributivity_terminal,
    generic_section_vertical,
    global_jet,
    identity_comorphism,
    is_cartesian,
    vertical_comorphism,
)
from finjet.finset import FinMap, FinSet, compose
from finjet.instances import fixture_p3_parts
from finjet.jets import jet_bundle, jet_on_vertical
from finjet.polyfun import Bundle, SliceMorphism, pullback_bundle, slice_homs
from finjet.relations import EndoRelation, Relation, ball_relation

A, E, P_MAP, BALL = fixture_p3_parts()
P = Bundle(P_MAP)


def two_point_setup():
    b = FinSet("B", ("u", "v"))
    adj_b = Relation.from_pairs(b, b, [("u", "v"), ("v", "u")])
    ball_b = ball_relation(adj_b, 1)
    f = FinMap(A, b, ("u", "v", "u"))
    adj_a = Relation.from_pairs(
        A, A, [(x, y) for x in A for y in A if x != y and (f(x), f(y)) in adj_b.pair_set]
    )
    ball_a = ball_relation(adj_a, 1)
    eb = FinSet("EB", ("u.0", "u.1", "v.0"))
    p_b = Bundle(FinMap(eb, b, ("u", "u", "v")))
    return f, ball_a, ball_b, p_b


def test_identity_comorphism_is_cartesian():
    assert is_cartesian(identity_comorphism(P))
    assert is_cartesian(cartesian_comorphism(FinMap.identity(A), P))


def test_vertical_comorphism_not_cartesian_when_collapsing():
    smaller = FinSet("E2", ("a.0", "b.0", "c.0"))
    q = Bundle(FinMap(smaller, A, ("a", "b", "c")))
    collapse = SliceMorphism(P, q, FinMap(E, smaller, ("a.0", "a.0", "b.0", "c.0", "c.0")))
    com = vertical_comorphism(collapse)
    assert com.src == q and com.dst == P
    assert not is_cartesian(com)


def test_compose_with_identity_is_identity():
    f, ball_a, ball_b, p_b = two_point_setup()
    c = cartesian_comorphism(f, p_b)
    assert comorphism_compose(c, identity_comorphism(c.src)) == c
    assert comorphism_compose(identity_comorphism(c.dst), c) == c


def test_cartesian_comorphisms_compose_to_cartesian():
    f, ball_a, ball_b, p_b = two_point_setup()
    c2 = cartesian_comorphism(f, p_b)
    g = FinMap(FinSet("Z", ("z1", "z2")), A, ("a", "b"))
    c1 = cartesian_comorphism(g, c2.src)
    composite = comorphism_compose(c2, c1)
    assert is_cartesian(composite)
    assert composite.over == compose(f, g)


def test_compose_rejects_mismatched_chain():
    f, ball_a, ball_b, p_b = two_point_setup()
    c = cartesian_comorphism(f, p_b)
    with pytest.raises(ChainMismatch):
        comorphism_compose(c, c)


def test_fiber_of_dual_is_opposite_composition():
    smaller = FinSet("E2", ("a.0", "b.0", "c.0"))
    q = Bundle(FinMap(smaller, A, ("a", "b", "c")))
    v1 = SliceMorphism(P, q, FinMap(E, smaller, ("a.0", "a.0", "b.0", "c.0", "c.0")))
    back = list(slice_homs(q, P))[0]
    left = comorphism_compose(vertical_comorphism(back), vertical_comorphism(v1))
    both = vertical_comorphism(compose_slice_reversed(v1, back))
    assert left == both


def compose_slice_reversed(v1, back):
    # Composition in the fiber of the dual is reversed composition of slices.
    from finjet.polyfun import compose_slice

    return compose_slice(v1, back)


def test_global_jet_identity_law():
    rels = {A: BALL}
    jb = jet_bundle(BALL.base, P_MAP)
    assert global_jet(identity_comorphism(P), rels) == identity_comorphism(
        Bundle(jb.projection)
    )


def test_global_jet_vertical_agrees_with_fiber_functor():
    rels = {A: BALL}
    smaller = FinSet("E2", ("a.0", "b.0", "c.0"))
    q = Bundle(FinMap(smaller, A, ("a", "b", "c")))
    v = SliceMorphism(P, q, FinMap(E, smaller, ("a.0", "a.0", "b.0", "c.0", "c.0")))
    moved = global_jet(vertical_comorphism(v), rels)
    jb_p = jet_bundle(BALL.base, P_MAP)
    jb_q = jet_bundle(BALL.base, q.map)
    expected_arrow = jet_on_vertical(jb_p, jb_q, v.arrow)
    expected = vertical_comorphism(
        SliceMorphism(Bundle(jb_p.projection), Bundle(jb_q.projection), expected_arrow)
    )
    assert moved == expected


def test_global_jet_requires_preservation():
    f, ball_a, ball_b, p_b = two_point_setup()
    wrong = EndoRelation.of(Relation.diagonal(f.cod))
    full_a = EndoRelation.of(Relation.full(A, A))
    with pytest.raises(PreservationViolated):
        global_jet(
            cartesian_comorphism(f, p_b), {A: full_a, f.cod: wrong}
        )


def test_global_jet_functor_law_on_mixed_chain():
    f, ball_a, ball_b, p_b = two_point_setup()
    rels = {A: ball_a, f.cod: ball_b}
    cart = cartesian_comorphism(f, p_b)
    smaller = FinSet("E3", ("a.x", "b.x", "c.x"))
    q = Bundle(FinMap(smaller, A, ("a", "b", "c")))
    verticals = list(slice_homs(pullback_bundle(FinMap.identity(A), cart.src), q))
    com_vert = Comorphism(
        FinMap.identity(A), q, cart.src, verticals[0]
    )
    whole = comorphism_compose(cart, com_vert)
    lhs = global_jet(whole, rels)
    rhs = comorphism_compose(global_jet(cart, rels), global_jet(com_vert, rels))
    assert lhs == rhs


def test_distributivity_terminal_diagonal_trivial():
    diag = Relation.diagonal(A)
    legs = diag.span
    assert distributivity_terminal(legs.left, legs.right, Bundle.identity(A), max_total=2)


def test_distributivity_terminal_p3_small_bound():
    legs = BALL.base.span
    assert distributivity_terminal(legs.left, legs.right, P, max_total=2)


def test_distributivity_rejects_perturbed_generic_jet():
    legs = BALL.base.span
    epsilon = generic_section_vertical(legs.left, legs.right, P)
    values = list(epsilon.arrow.values)
    swapped = None
    for i, value in enumerate(values):
        fiber = epsilon.dst.fiber(epsilon.dst.map(value))
        if len(fiber) > 1:
            swapped = i
            values[i] = next(e for e in fiber if e != value)
            break
    assert swapped is not None
    perturbed = SliceMorphism(
        epsilon.src, epsilon.dst, FinMap(epsilon.arrow.dom, epsilon.arrow.cod, tuple(values))
    )
    assert not distributivity_terminal(
        legs.left, legs.right, P, candidate=perturbed, max_total=2
    )


def test_distributivity_requires_jointly_monic_span():
    two = FinSet("M", ("m1", "m2"))
    left = FinMap.constant(two, A, "a")
    right = FinMap.constant(two, A, "a")
    with pytest.raises(NotJointlyMonic):
        distributivity_terminal(left, right, P, max_total=1)
