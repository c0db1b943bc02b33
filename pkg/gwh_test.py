from fractions import Fraction

import pytest

from gwh import collapse_surgery, local_expand, substitute_and_evaluate, substitute_elliptic, tgwh_surgery
from local_gw import VertexData, connected_one_point
from partitions import ConstraintViolation, DegreeMismatch, GWHError, enumerate_partitions
from trop_covers import CATERPILLAR, enumerate_descendant_covers, enumerate_elliptic_covers

ONES4 = (1, 1, 1, 1)


@pytest.mark.parametrize("genus, mu, nu, expected", [
    (0, (2,), (1, 1), Fraction(1, 2)),
    (1, (2,), (2,), Fraction(7, 24)),
    (1, (1,), (1,), Fraction(1, 24)),
    (0, (1, 1), (1, 1), Fraction(1, 4)),
    (0, (3,), (2, 1), Fraction(1)),
])
def test_local_expansion_totals(genus, mu, nu, expected):
    star = VertexData(genus, mu, nu)
    expansion = local_expand(star)
    assert sum(w for _, w in expansion) == expected == connected_one_point(genus, mu, nu)
    assert all(x.k == star.power for x, _ in expansion)


VERTEX_SWEEP = [
    (g, mu, nu)
    for g in range(3)
    for d in range(1, 5)
    for mu in enumerate_partitions(d)
    for nu in enumerate_partitions(d)
    if 2 * g - 2 + len(mu) + len(nu) >= 0
]


@pytest.mark.parametrize("genus, mu, nu", VERTEX_SWEEP)
def test_local_expansion_reproduces_every_vertex(genus, mu, nu):
    expansion = local_expand(VertexData(genus, mu, nu))
    assert sum((w for _, w in expansion), Fraction(0)) == connected_one_point(genus, mu, nu)


def test_local_expansion_terms():
    expansion = local_expand(VertexData(1, (2,), (2,)))
    assert sorted(w for _, w in expansion) == [Fraction(1, 24), Fraction(1, 4)]
    payload = expansion[0][0].to_json()
    assert payload["k"] == 2
    assert {"genus", "left", "right", "marked", "unmarked"} <= set(payload["components"][0])


def test_surgery_on_example_covers():
    covers = enumerate_descendant_covers(ONES4, ONES4, (3, 3), genus=0)
    for cover, mult in covers:
        result = tgwh_surgery(cover)
        assert result.holds
        assert result.total == mult.total
        assert all(e.cover.target.kind == CATERPILLAR for e in result.entries)
        for e in result.entries:
            assert collapse_surgery(e.cover, (3, 3)) == cover
    top = [cover for cover, _ in covers if cover.sides(0) == (ONES4, (4,))][0]
    assert tgwh_surgery(top).to_json()["total"] == "1/144"


def test_surgery_on_single_cut():
    [(cover, mult)] = enumerate_descendant_covers((2,), (1, 1), (1,))
    result = tgwh_surgery(cover)
    assert result.holds
    assert result.total == mult.total == Fraction(1, 2)


def test_surgery_errors():
    elliptic, _ = enumerate_elliptic_covers(1, (0,))[0]
    with pytest.raises(GWHError):
        tgwh_surgery(elliptic)
    cover, _ = enumerate_descendant_covers(ONES4, ONES4, (3, 3))[0]
    entry = tgwh_surgery(cover).entries[0]
    with pytest.raises(GWHError):
        collapse_surgery(entry.cover, (3,))
    with pytest.raises(GWHError):
        collapse_surgery(cover, (3, 3))


@pytest.mark.parametrize("mu, nu, ks, expected", [
    (ONES4, ONES4, (3, 3), Fraction(457, 2304)),
    ((2,), (1, 1), (1,), Fraction(1, 2)),
    ((2,), (2,), (2,), Fraction(7, 24)),
    ((2, 1), (2, 1), (), Fraction(1, 2)),
])
def test_completed_cycle_substitution(mu, nu, ks, expected):
    assert substitute_and_evaluate(mu, nu, ks) == expected


def test_elliptic_substitution():
    assert substitute_elliptic(1, (0,)) == 1
    assert substitute_elliptic(2, (2,)) == Fraction(7, 6)
    for d in range(1, 5):
        assert substitute_elliptic(d, ()) == len(enumerate_partitions(d))


def test_substitution_errors():
    with pytest.raises(ConstraintViolation) as err:
        substitute_and_evaluate((2,), (2,), (1,))
    assert err.value.relation == "dimension"
    with pytest.raises(DegreeMismatch):
        substitute_and_evaluate((2,), (1,), (0,))
    with pytest.raises(ConstraintViolation):
        substitute_elliptic(2, (1,))
    with pytest.raises(DegreeMismatch):
        substitute_elliptic(0, ())
