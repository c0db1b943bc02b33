from fractions import Fraction

import pytest

from partitions import DegreeMismatch, GWHError, enumerate_partitions
from trop_covers import (
    CYCLE, CoverVertex, TargetShape, TropicalCover, automorphism_count, caterpillar_for, covers_to_json,
    dedupe_covers, descendant_invariant, elliptic_invariant, enumerate_descendant_covers,
    enumerate_elliptic_covers, enumerate_hurwitz_covers, hurwitz_tropical, isomorphic, parallel_factor,
    split_at_point, vertex_genus,
)

ONES4 = (1, 1, 1, 1)
T3 = (2, 1)


def test_example_covers_and_total():
    covers = enumerate_descendant_covers(ONES4, ONES4, (3, 3), genus=0)
    totals = sorted(m.total for _, m in covers)
    assert totals == sorted([Fraction(1, 144), Fraction(1, 18), Fraction(1, 18), Fraction(5, 144),
                             Fraction(5, 144), Fraction(25, 2304)])
    assert sum(totals) == Fraction(457, 2304)
    assert descendant_invariant(ONES4, ONES4, (3, 3)) == Fraction(457, 2304)
    assert all(cover.genus() == 0 for cover, _ in covers)
    # one vertex carries (1^4) on the left and (4) on the right: 4 / 4!^2
    top = [m for cover, m in covers if cover.sides(0) == (ONES4, (4,))]
    assert [m.total for m in top] == [Fraction(1, 144)]
    assert top[0].automorphisms == 24 * 24


@pytest.mark.parametrize("mu, nu, ks, connected, expected", [
    ((1,), (1,), (0,), False, Fraction(1)),
    ((2,), (2,), (0,), True, Fraction(1)),
    ((1, 1), (1, 1), (0,), False, Fraction(1)),
    ((2,), (1, 1), (1,), True, Fraction(1, 2)),
    ((1, 1), (2,), (1,), True, Fraction(1, 2)),
    ((2,), (2,), (2,), True, Fraction(7, 24)),
    ((2,), (2,), (), False, Fraction(1, 2)),
    ((2, 1), (2, 1), (), False, Fraction(1, 2)),
    ((1, 1), (1, 1), (), False, Fraction(1, 2)),
])
def test_line_invariants(mu, nu, ks, connected, expected):
    assert descendant_invariant(mu, nu, ks, connected=connected) == expected


def test_dimension_filter_and_degree_check():
    assert enumerate_descendant_covers((2,), (2,), (1,)) == []
    assert enumerate_descendant_covers((2,), (2,), (2,), genus=0) == []
    with pytest.raises(DegreeMismatch):
        enumerate_descendant_covers((2,), (1,), (0,))


def test_descendant_automorphisms_are_parallel_classes():
    for cover, mult in enumerate_descendant_covers(ONES4, ONES4, (3, 3)):
        assert automorphism_count(cover) == parallel_factor(cover) == mult.automorphisms


def test_connected_filter():
    all_covers = enumerate_descendant_covers((1, 1), (1, 1), (0,))
    assert len(all_covers) == 1
    assert not all_covers[0][0].is_connected()
    assert enumerate_descendant_covers((1, 1), (1, 1), (0,), connected=True) == []


@pytest.mark.parametrize("d, ks, expected", [
    (1, (0,), Fraction(1)),
    (2, (2,), Fraction(7, 6)),
])
def test_elliptic_invariants(d, ks, expected):
    assert elliptic_invariant(d, ks) == expected


@pytest.mark.parametrize("d", range(1, 6))
def test_circles_alone_count_partitions(d):
    assert elliptic_invariant(d, ()) == len(enumerate_partitions(d))


def test_elliptic_cover_shape():
    covers = enumerate_elliptic_covers(1, (0,))
    assert len(covers) == 1
    cover, mult = covers[0]
    assert cover.target.kind == CYCLE
    assert cover.genus() == 1
    assert [e.winding for e in cover.edges] == [1]
    assert cover.degree() == 1
    assert mult.total == 1


@pytest.mark.parametrize("profiles, d, connected, expected", [
    ([(2,), (2,)], 2, False, Fraction(1, 2)),
    ([(3,), (3,)], 3, True, Fraction(1, 3)),
    ([T3] * 4, 3, False, Fraction(9, 2)),
    ([T3] * 4, 3, True, Fraction(4)),
    ([(2,), (1, 1), (2,)], 2, False, Fraction(1, 2)),
    ([], 2, False, Fraction(1, 2)),
])
def test_caterpillar_hurwitz_numbers(profiles, d, connected, expected):
    assert hurwitz_tropical(caterpillar_for(profiles, d), degree=d, connected=connected) == expected


@pytest.mark.parametrize("connected, expected", [(False, Fraction(2)), (True, Fraction(3, 2))])
def test_cycle_hurwitz_numbers(connected, expected):
    assert hurwitz_tropical(TargetShape.cycle(), degree=2, connected=connected) == expected


def test_hurwitz_cover_errors():
    with pytest.raises(DegreeMismatch):
        enumerate_hurwitz_covers(TargetShape.cycle())
    with pytest.raises(DegreeMismatch):
        enumerate_hurwitz_covers(caterpillar_for([(2,), (1,)], 2))
    with pytest.raises(GWHError):
        enumerate_hurwitz_covers(TargetShape.line((1,)))


def test_vertex_genus():
    assert vertex_genus((2,), (2,), (1, 1)) == 0
    assert vertex_genus((2,), (2,), (2,)) is None
    assert vertex_genus((1, 1), (1, 1), (1, 1)) is None
    assert vertex_genus((2,), (1, 1), (1, 1)) is None
    assert vertex_genus((3,), (3,), (3,)) == 1


def test_target_validation():
    with pytest.raises(GWHError):
        TargetShape("plane")
    with pytest.raises(GWHError):
        TargetShape.line((-1,))
    with pytest.raises(GWHError):
        TargetShape.caterpillar([(2,)])
    with pytest.raises(GWHError):
        TargetShape.cycle(insertions=(1,), vertical=((2,),))
    cat = caterpillar_for([(2,)], 2)
    assert cat.left == (2,) and cat.right == (1, 1) and cat.points == 0
    assert cat.to_json() == {"kind": "caterpillar", "left": "2", "right": "1,1"}


def test_dedupe_and_isomorphism():
    target = TargetShape.line((0, 0))
    a = TropicalCover.assemble(target, [CoverVertex(0, 0), CoverVertex(1, 0)],
                               {(-1, 0, 1, 0): 1, (0, 1, 1, 0): 1, (1, -1, 1, 0): 1})
    b = TropicalCover.assemble(target, [CoverVertex(0, 0), CoverVertex(1, 0)],
                               {(-1, 0, 1, 0): 1, (0, 1, 1, 0): 1, (1, -1, 1, 0): 1})
    c = TropicalCover.assemble(target, [CoverVertex(0, 0), CoverVertex(1, 1)],
                               {(-1, 0, 1, 0): 1, (0, 1, 1, 0): 1, (1, -1, 1, 0): 1})
    assert isomorphic(a, b)
    assert not isomorphic(a, c)
    assert dedupe_covers([a, b, c]) == [a, c]


def test_split_identity():
    for position in range(3):
        report = split_at_point(ONES4, ONES4, (3, 3), position)
        assert report.holds
        assert report.direct == Fraction(457, 2304)
    assert split_at_point((2,), (1, 1), (1,), 0).to_json()["holds"] is True
    with pytest.raises(GWHError):
        split_at_point((1,), (1,), (0,), 3)


def test_json_and_dot():
    covers = enumerate_descendant_covers((2,), (1, 1), (1,))
    payload = covers_to_json(covers)
    assert payload[0]["multiplicity"]["total"] == "1/2"
    assert payload[0]["edges"][-1] == {"left": 0, "right": None, "weight": 1, "multiplicity": 2}
    dot = covers[0][0].to_dot()
    assert dot.startswith("digraph cover {")
    assert 'v0 -> R [label="1 x2"]' in dot


@pytest.mark.parametrize("mu, nu, ks", [
    ((2, 1), (1, 1, 1), (1, 2)),
    ((3,), (2, 1), (0, 1)),
    (ONES4, (2, 2), (3, 1)),
])
def test_point_order_does_not_matter(mu, nu, ks):
    assert descendant_invariant(mu, nu, ks) == descendant_invariant(mu, nu, tuple(reversed(ks)))


@pytest.mark.parametrize("mu, nu, ks", [
    ((2, 1), (1, 1, 1), (1, 2)),
    ((3,), (2, 1), (0, 1)),
    ((2, 2), (3, 1), (0, 2)),
    (ONES4, (2, 2), (3, 1)),
    ((2,), (2,), (0, 2)),
])
@pytest.mark.parametrize("connected", [False, True])
def test_reflection_swaps_sides_and_reverses_points(mu, nu, ks, connected):
    forward = descendant_invariant(mu, nu, ks, connected=connected)
    assert forward == descendant_invariant(nu, mu, tuple(reversed(ks)), connected=connected)
