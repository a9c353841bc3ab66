import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from finjet.errors import CompositionMismatch, NotCommuting, NotJointlyMonic
from finjet.finset import (
    FinMap,
    FinSet,
    Span,
    all_maps,
    compose,
    is_jointly_monic,
    is_monic,
    pair_into_pullback,
    product,
    pullback,
    span_leq,
)

A = FinSet("A", ("a1", "a2", "a3"))
B = FinSet("B", ("b1", "b2", "b3"))
C = FinSet("C", ("c1", "c2"))


def finmaps(dom, cod):
    return st.tuples(
        *(st.sampled_from(cod.elements) for _ in dom.elements)
    ).map(lambda values: FinMap(dom, cod, values))


def test_compose_identity_laws():
    f = FinMap(A, C, ("c1", "c2", "c1"))
    assert compose(f, FinMap.identity(A)) == f
    assert compose(FinMap.identity(C), f) == f


def test_compose_table():
    x = FinSet("X", ("x",))
    u = FinSet("U", ("u",))
    f = FinMap(FinSet("D", ("d",)), x, ("x",))
    g = FinMap(x, u, ("u",))
    assert compose(g, f).table == {"d": "u"}


def test_compose_mismatch():
    f = FinMap(A, C, ("c1", "c2", "c1"))
    with pytest.raises(CompositionMismatch):
        compose(f, f)


@given(finmaps(A, C), finmaps(C, B), finmaps(B, A))
def test_compose_associative(f, g, h):
    assert compose(h, compose(g, f)) == compose(compose(h, g), f)


def test_pullback_all_to_point():
    a = FinSet("A", ("a1", "a2"))
    b = FinSet("B", ("b1",))
    c = FinSet("C", ("c",))
    f = FinMap.constant(a, c, "c")
    p = FinMap.constant(b, c, "c")
    pb = pullback(f, p)
    assert pb.apex.elements == ("(a1,b1)", "(a2,b1)")


def test_pullback_along_identity_is_graph():
    p = FinMap(B, C, ("c1", "c2", "c2"))
    pb = pullback(FinMap.identity(C), p)
    assert len(pb.apex) == len(B)
    for m in pb.apex:
        assert pb.to_left(m) == p(pb.to_right(m))


@given(finmaps(A, C), finmaps(B, C))
def test_pullback_size_counts_matching_pairs(f, p):
    pb = pullback(f, p)
    brute = sum(1 for a in A for b in B if f(a) == p(b))
    assert len(pb.apex) == brute
    assert compose(f, pb.to_left) == compose(p, pb.to_right)


@given(finmaps(A, C), finmaps(B, C))
@settings(max_examples=25, deadline=None)
def test_pullback_universal_property(f, p):
    pb = pullback(f, p)
    for size in range(4):
        stage = FinSet("X", tuple(f"x{i}" for i in range(size)))
        for a in all_maps(stage, A):
            for b in all_maps(stage, B):
                if compose(f, a) != compose(p, b):
                    continue
                med = pair_into_pullback(a, b, pb)
                assert compose(pb.to_left, med) == a
                assert compose(pb.to_right, med) == b
                rivals = [
                    m
                    for m in all_maps(stage, pb.apex)
                    if compose(pb.to_left, m) == a and compose(pb.to_right, m) == b
                ]
                assert rivals == [med]


def test_pair_into_pullback_singleton():
    f = FinMap(A, C, ("c1", "c1", "c2"))
    p = FinMap(B, C, ("c1", "c2", "c2"))
    pb = pullback(f, p)
    x = FinSet("X", ("x",))
    med = pair_into_pullback(FinMap(x, A, ("a1",)), FinMap(x, B, ("b1",)), pb)
    assert med.values == ("(a1,b1)",)


def test_pair_into_pullback_identity_on_apex():
    f = FinMap(A, C, ("c1", "c1", "c2"))
    p = FinMap(B, C, ("c1", "c2", "c2"))
    pb = pullback(f, p)
    med = pair_into_pullback(pb.to_left, pb.to_right, pb)
    assert med == FinMap.identity(pb.apex)


def test_pair_into_pullback_rejects_non_cone():
    f = FinMap(A, C, ("c1", "c1", "c1"))
    p = FinMap(B, C, ("c2", "c2", "c2"))
    pb = pullback(f, p)
    x = FinSet("X", ("x",))
    with pytest.raises(NotCommuting):
        pair_into_pullback(
            FinMap(x, A, ("a1",)), FinMap(x, B, ("b1",)), pb
        )


def test_pullback_of_monic_is_monic():
    f = FinMap(FinSet("A", ("a1", "a2")), C, ("c1", "c2"))
    for p in all_maps(B, C):
        pb = pullback(f, p)
        assert is_monic(pb.to_right)


def test_is_monic():
    assert is_monic(FinMap.identity(A))
    two = FinSet("T", ("t1", "t2"))
    assert not is_monic(FinMap.constant(two, C, "c1"))


@given(finmaps(A, C))
def test_is_monic_matches_quadratic_scan(f):
    brute = all(
        f(x) != f(y)
        for x, y in itertools.combinations(A.elements, 2)
    )
    assert is_monic(f) == brute


def test_jointly_monic_one_leg_suffices():
    s = Span(FinMap.identity(A), FinMap.constant(A, C, "c1"))
    assert is_jointly_monic(s)


def test_jointly_monic_fails_on_constant_legs():
    two = FinSet("T", ("t1", "t2"))
    s = Span(FinMap.constant(two, A, "a1"), FinMap.constant(two, C, "c1"))
    assert not is_jointly_monic(s)


@given(finmaps(A, C), finmaps(A, B))
def test_jointly_monic_matches_pairing_injectivity(left, right):
    s = Span(left, right)
    pairs = [(left(m), right(m)) for m in A]
    assert is_jointly_monic(s) == (len(set(pairs)) == len(pairs))


def test_span_leq_reflexive():
    s = Span(FinMap.identity(A), FinMap.constant(A, C, "c1"))
    assert span_leq(s, s) == FinMap.identity(A)


def test_span_leq_from_empty():
    empty = FinSet("M", ())
    s = Span(FinMap(empty, A, ()), FinMap(empty, C, ()))
    s2 = Span(FinMap.identity(A), FinMap.constant(A, C, "c1"))
    mu = span_leq(s, s2)
    assert mu is not None and mu.dom == empty


def test_span_leq_requires_joint_monicity():
    two = FinSet("T", ("t1", "t2"))
    bad = Span(FinMap.constant(two, A, "a1"), FinMap.constant(two, C, "c1"))
    good = Span(FinMap.identity(A), FinMap.constant(A, C, "c1"))
    with pytest.raises(NotJointlyMonic):
        span_leq(bad, good)


def test_span_leq_transitive_witnesses_compose():
    m1 = FinSet("M1", ("m",))
    m2 = FinSet("M2", ("n", "n2"))
    m3 = FinSet("M3", ("k", "k2", "k3"))
    s1 = Span(FinMap(m1, A, ("a1",)), FinMap(m1, C, ("c1",)))
    s2 = Span(FinMap(m2, A, ("a1", "a2")), FinMap(m2, C, ("c1", "c1")))
    s3 = Span(FinMap(m3, A, ("a1", "a2", "a3")), FinMap(m3, C, ("c1", "c1", "c2")))
    mu12 = span_leq(s1, s2)
    mu23 = span_leq(s2, s3)
    mu13 = span_leq(s1, s3)
    assert compose(mu23, mu12) == mu13


def test_span_leq_antisymmetric_up_to_iso():
    m1 = FinSet("M1", ("m", "n"))
    m2 = FinSet("M2", ("p", "q"))
    s1 = Span(FinMap(m1, A, ("a1", "a2")), FinMap(m1, C, ("c1", "c1")))
    s2 = Span(FinMap(m2, A, ("a2", "a1")), FinMap(m2, C, ("c1", "c1")))
    mu = span_leq(s1, s2)
    nu = span_leq(s2, s1)
    assert compose(nu, mu) == FinMap.identity(m1)
    assert compose(mu, nu) == FinMap.identity(m2)


def test_product_shapes():
    one_a = FinSet("A", ("a",))
    one_b = FinSet("B", ("b",))
    carrier, fst, snd = product(one_a, one_b)
    assert carrier.elements == ("(a,b)",)
    two = FinSet("T", ("t1", "t2"))
    carrier, _, _ = product(two, B)
    assert len(carrier) == 6
    empty = FinSet("N", ())
    carrier, _, _ = product(empty, B)
    assert len(carrier) == 0
