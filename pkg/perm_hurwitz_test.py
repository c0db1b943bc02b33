import itertools
from fractions import Fraction
from math import factorial

import pytest

from partitions import ConstraintViolation, DegreeMismatch, GWHError, WElement, centralizer_size, enumerate_partitions
from perm_hurwitz import (
    ClassAlgebraElement, HurwitzProblem, class_algebra_product, connected_from_disconnected, count_monodromy,
    count_products,
    disconnected_from_connected, eval_hurwitz_extended, eval_hurwitz_multilinear, genus_adding_element,
    hurwitz_bruteforce, hurwitz_class_algebra, local_hurwitz, structure_constants, symmetric_group,
)

T3 = (2, 1)


def test_symmetric_group_tables():
    s3 = symmetric_group(3)
    assert s3.order == 6
    assert s3.cycle_type(0) == (1, 1, 1)
    assert sorted(len(s3.class_members(mu)) for mu in enumerate_partitions(3)) == [1, 2, 3]
    for a in range(6):
        assert s3.mult[a, s3.inv[a]] == 0
    assert symmetric_group(3) is s3


def test_structure_constants():
    # (sum of transpositions)^2 = 3 e + 3 (sum of 3-cycles)
    assert structure_constants(3, T3, T3) == {(1, 1, 1): 3, (3,): 3}
    c = ClassAlgebraElement.class_sum(T3)
    assert c * c == ClassAlgebraElement(3, {(1, 1, 1): 3, (3,): 3})
    with pytest.raises(DegreeMismatch):
        c * ClassAlgebraElement.identity(2)
    assert class_algebra_product([c, c]) == c * c
    assert class_algebra_product([c, c, c]) == ClassAlgebraElement(3, {T3: 9})
    with pytest.raises(GWHError):
        class_algebra_product([])


def test_genus_adding_element_counts_commuting_pairs():
    # coefficient of e in K is the number of commuting pairs, d! times p(d)
    assert genus_adding_element(3).coefficient((1, 1, 1)) == 18
    assert genus_adding_element(2).coefficient((1, 1)) == 4


@pytest.mark.parametrize("d, profiles, connected, expected", [
    (2, [(2,), (2,)], False, Fraction(1, 2)),
    (2, [(2,), (2,)], True, Fraction(1, 2)),
    (3, [(3,), (3,)], True, Fraction(1, 3)),
    (3, [T3] * 4, False, Fraction(9, 2)),
    (3, [T3] * 4, True, Fraction(4)),
    (2, [], False, Fraction(1, 2)),
    (2, [(2,), (2,), (2,)], False, Fraction(0)),
])
def test_genus_zero_target(d, profiles, connected, expected):
    problem = HurwitzProblem(d, tuple(profiles), connected=connected)
    assert hurwitz_bruteforce(problem) == expected
    assert hurwitz_class_algebra(problem) == expected


@pytest.mark.parametrize("connected, expected", [(False, Fraction(2)), (True, Fraction(3, 2))])
def test_elliptic_target_without_branch_points(connected, expected):
    problem = HurwitzProblem(2, (), target_genus=1, connected=connected)
    assert hurwitz_bruteforce(problem) == expected
    assert hurwitz_class_algebra(problem) == expected


def test_riemann_hurwitz():
    problem = HurwitzProblem(3, (T3,) * 4)
    assert problem.branch_sum() == 4
    assert problem.source_euler() == 2
    assert problem.riemann_hurwitz_genus() == 0
    assert HurwitzProblem(2, ((2,),) * 3).riemann_hurwitz_genus() is None
    assert not HurwitzProblem(2, (), connected=True).admissible()


def test_monodromy_count_and_degree_cap():
    assert count_monodromy(HurwitzProblem(3, (T3,) * 4, connected=False)) == 27
    with pytest.raises(ConstraintViolation) as err:
        hurwitz_bruteforce(HurwitzProblem(4, ((4,), (4,))), max_degree=3)
    assert err.value.relation == "degree-cap"
    with pytest.raises(DegreeMismatch):
        count_monodromy(HurwitzProblem(3, ((2,),)))


def test_connected_disconnected_inverse():
    profiles = [T3] * 4
    assert connected_from_disconnected(3, 0, profiles) == 4
    assert disconnected_from_connected(3, 0, profiles) == Fraction(9, 2)
    for d in range(1, 5):
        assert disconnected_from_connected(d, 1, []) == len(enumerate_partitions(d))


def test_local_hurwitz_numbers():
    assert local_hurwitz(0, 0, [(2,), (2,), (1, 1)]) == 1
    # pass-through vertex: (w), (w), (1^w) gives (w-1)!
    assert local_hurwitz(0, 0, [(3,), (3,), (1, 1, 1)]) == 2
    assert local_hurwitz(0, 0, [(3,), (3,), (3,)]) == 0
    assert local_hurwitz(1, 0, [(2,), (2,), (1, 1)]) == 0


def test_extended_evaluation():
    assert eval_hurwitz_extended(0, []) == 1
    assert eval_hurwitz_extended(1, [(2,)]) == 0
    # (1) -> (1,1) with weight 2 on both sides
    assert eval_hurwitz_extended(2, [(1,), (1,)]) == 2
    assert eval_hurwitz_extended(2, [(2,), (), (2,)]) == Fraction(1, 2)
    value = eval_hurwitz_multilinear(2, [WElement.basis((2,)), WElement({(2,): 1, (1,): 3}), WElement.basis((2,))])
    assert value == eval_hurwitz_extended(2, [(2,), (2,), (2,)]) + 3 * eval_hurwitz_extended(2, [(2,), (1,), (2,)])
    assert value == 3


@pytest.mark.parametrize("d", range(1, 7))
def test_class_sizes_times_centralizers(d):
    group = symmetric_group(d)
    for mu in enumerate_partitions(d):
        assert centralizer_size(mu) * len(group.class_members(mu)) == factorial(d)


@pytest.mark.parametrize("d", range(1, 6))
def test_class_algebra_is_commutative_and_associative(d):
    classes = [ClassAlgebraElement.class_sum(mu) for mu in enumerate_partitions(d)]
    k = genus_adding_element(d)
    for a in classes:
        assert a * k == k * a
    for a, b in itertools.product(classes, repeat=2):
        assert a * b == b * a
    for a, b, c in itertools.product(classes, repeat=3):
        assert (a * b) * c == a * (b * c)


@pytest.mark.parametrize("problem", [
    HurwitzProblem(3, (T3,) * 4, connected=False),
    HurwitzProblem(3, (), target_genus=1, connected=False),
    HurwitzProblem(2, ((2,), (2,)), target_genus=1, connected=False),
    HurwitzProblem(4, ((2, 1, 1), (3, 1), (2, 2), (2, 1, 1)), connected=False),
    HurwitzProblem(4, ((4,), (2, 1, 1), (4,), (2, 1, 1)), connected=False),
])
def test_product_distribution_matches_tuple_walk(problem):
    assert count_products(problem) == count_monodromy(problem)


@pytest.mark.parametrize("mu, nu", [((5,), (5,)), ((2, 2, 1), (1, 1, 1, 1, 1)), ((3, 2), (4, 1))])
def test_bruteforce_with_many_transpositions(mu, nu):
    transposition = (2, 1, 1, 1)
    problem = HurwitzProblem(5, (mu,) + (transposition,) * 6 + (nu,), connected=False)
    assert hurwitz_bruteforce(problem) == hurwitz_class_algebra(problem)
    assert count_products(problem) == hurwitz_class_algebra(problem) * 120
