from fractions import Fraction

import pytest

from local_gw import (
    InconsistentSystem, VertexData, completion_coefficients, compco_terms, connected_one_point,
    genus_one_closed_form, one_point_invariant, solve_completion_by_correspondence, vertex_multiplicity,
)
from partitions import DegreeMismatch, GWHError, WElement, enumerate_partitions, partitions_up_to

COMPLETED = {
    0: {(1,): 1},
    1: {(2,): 1},
    2: {(3,): 1, (1, 1): 1, (1,): Fraction(1, 12)},
    3: {(4,): 1, (2, 1): 2, (2,): Fraction(5, 4)},
    4: {(5,): 1, (3, 1): 3, (2, 2): 4, (3,): Fraction(11, 2), (1, 1, 1): 4, (1, 1): Fraction(3, 2),
        (1,): Fraction(1, 80)},
}


@pytest.mark.parametrize("d", range(1, 7))
def test_low_genus_closed_forms(d):
    parts = enumerate_partitions(d)
    for mu in parts:
        for nu in parts:
            assert vertex_multiplicity(0, mu, nu) == 1
            assert vertex_multiplicity(1, mu, nu) == genus_one_closed_form(mu, nu)


def test_vertex_spot_values():
    assert vertex_multiplicity(1, (1, 1), (2,)) == Fraction(5, 24)
    assert vertex_multiplicity(1, (2,), (2,)) == Fraction(7, 24)
    # only S(z) survives: [z^4] S(z)
    assert vertex_multiplicity(2, (1,), (1,)) == Fraction(1, 1920)
    # symmetric in the two sides
    assert vertex_multiplicity(2, (2, 1), (3,)) == vertex_multiplicity(2, (3,), (2, 1))


def test_vertex_data():
    v = VertexData(1, (2,), (1, 1))
    assert v.power == 3
    assert v.degree == 2
    with pytest.raises(DegreeMismatch):
        VertexData(0, (2,), (1,))
    with pytest.raises(DegreeMismatch):
        VertexData(0, (), ())
    with pytest.raises(GWHError):
        VertexData(-1, (1,), (1,))


def test_one_point_invariants():
    assert connected_one_point(0, (2,), (1, 1)) == Fraction(1, 2)
    assert connected_one_point(1, (2,), (2,)) == Fraction(7, 24)
    assert one_point_invariant((1,), 2) == Fraction(1, 24)
    assert one_point_invariant((1,), 1) == 0
    assert one_point_invariant((), 3) == 0


def test_compco_terms_for_three():
    assert compco_terms(2) == {(3,): 1, (1, 1): 1, (1,): Fraction(1, 12)}


@pytest.mark.parametrize("k", sorted(COMPLETED))
def test_completed_cycles(k):
    cycle = completion_coefficients(k)
    assert cycle.expansion == WElement(COMPLETED[k])
    assert cycle.leading == (k + 1,)
    assert cycle.coefficient((k + 1,)) == 1


def test_completed_cycle_helpers():
    cycle = completion_coefficients(2)
    assert cycle.corrections() == [((1, 1), 1), ((1,), Fraction(1, 12))]
    assert cycle.insertion() == WElement({(3,): Fraction(1, 2), (1, 1): Fraction(1, 2), (1,): Fraction(1, 24)})
    assert cycle.to_json() == {"completed_cycle": {"3": "1", "1,1": "1", "1": "1/12"}}
    assert completion_coefficients(1).to_json() == {"completed_cycle": {"2": "1"}}
    assert completion_coefficients(2) is cycle
    with pytest.raises(GWHError):
        completion_coefficients(-1)


@pytest.mark.parametrize("k", range(4))
def test_linear_system_route(k):
    solved = solve_completion_by_correspondence(k, d_max=k + 1)
    assert solved == completion_coefficients(k).expansion


def test_inconsistent_fixed_terms():
    with pytest.raises(InconsistentSystem) as err:
        solve_completion_by_correspondence(1, d_max=2, fixed={(1,): 1})
    assert err.value.relation == "completion-system"


@pytest.mark.parametrize("k", sorted(COMPLETED))
def test_completion_coefficients_are_non_negative(k):
    assert all(c >= 0 for c in compco_terms(k).values())
    assert all(c >= 0 for _, c in completion_coefficients(k).expansion.items())


@pytest.mark.parametrize("k", range(4))
def test_empty_term_from_degree_one(k):
    terms = compco_terms(k)
    fixed = {mu: terms.get(mu, Fraction(0))
             for mu in partitions_up_to(k + 1, include_empty=False) if mu != (k + 1,)}
    solved = solve_completion_by_correspondence(k, d_max=1, fixed=fixed, d_min=1)
    assert solved.coefficient(()) == 0
    assert solved == completion_coefficients(k).expansion
    with pytest.raises(GWHError):
        solve_completion_by_correspondence(k, d_max=1, fixed=fixed, d_min=2)
