from fractions import Fraction

import pytest

from partitions import (
    EMPTY, ConstraintViolation, DegreeMismatch, GWHError, OversizeCondition, PartitionError, WElement,
    aut_count, centralizer_size, check_same_size, enumerate_partitions, format_partition, make_partition,
    merge, parse_partition, parse_powers, parse_profiles, partitions_up_to, remove_parts, sub_partitions,
    tilde_extend,
)

PARTITION_COUNTS = [1, 1, 2, 3, 5, 7, 11, 15, 22, 30, 42]


@pytest.mark.parametrize("d, count", list(enumerate(PARTITION_COUNTS)))
def test_partition_counts(d, count):
    parts = enumerate_partitions(d)
    assert len(parts) == count
    assert len(set(parts)) == count
    assert all(sum(mu) == d and list(mu) == sorted(mu, reverse=True) for mu in parts)


def test_enumeration_order_and_length_cap():
    assert enumerate_partitions(4) == [(4,), (3, 1), (2, 2), (2, 1, 1), (1, 1, 1, 1)]
    assert enumerate_partitions(4, max_length=2) == [(4,), (3, 1), (2, 2)]
    assert enumerate_partitions(0) == [EMPTY]
    assert partitions_up_to(2) == [EMPTY, (1,), (2,), (1, 1)]
    assert partitions_up_to(2, include_empty=False) == [(1,), (2,), (1, 1)]
    with pytest.raises(PartitionError):
        enumerate_partitions(-1)


def test_centralizer_sizes():
    assert aut_count((2, 1, 1)) == 2
    assert centralizer_size((2, 1, 1)) == 4
    assert centralizer_size((1, 1, 1, 1)) == 24
    assert centralizer_size((3, 3)) == 18
    assert centralizer_size(EMPTY) == 1
    # class sizes of S_4 add up to 4!
    assert sum(Fraction(24, centralizer_size(mu)) for mu in enumerate_partitions(4)) == 24


def test_text_codec():
    assert parse_partition("1,2,1") == (2, 1, 1)
    assert parse_partition(" ") == EMPTY
    assert format_partition((3, 1)) == "3,1"
    assert parse_profiles("2;1,1") == [(2,), (1, 1)]
    assert parse_profiles("") == []
    assert parse_powers("3,3") == [3, 3]


@pytest.mark.parametrize("text", ["2,x", "0", "-1,2", "1,,1"])
def test_bad_partitions(text):
    with pytest.raises(PartitionError):
        parse_partition(text)


def test_bad_powers():
    with pytest.raises(PartitionError):
        parse_powers("1,-2")
    with pytest.raises(PartitionError):
        parse_powers("a")


def test_multiset_helpers():
    assert sorted(sub_partitions((2, 1, 1))) == sorted([EMPTY, (1,), (1, 1), (2,), (2, 1), (2, 1, 1)])
    assert remove_parts((3, 2, 1, 1), (2, 1)) == (3, 1)
    assert merge((2,), (3, 1), EMPTY) == (3, 2, 1)
    with pytest.raises(PartitionError):
        remove_parts((2, 1), (3,))
    with pytest.raises(PartitionError):
        make_partition([1, True])


def test_tilde_extension():
    assert tilde_extend((2,), 4) == ((2, 1, 1), Fraction(1))
    assert tilde_extend((2, 1), 4) == ((2, 1, 1), Fraction(2))
    assert tilde_extend(EMPTY, 3) == ((1, 1, 1), Fraction(1))
    with pytest.raises(OversizeCondition):
        tilde_extend((5,), 4)


def test_welement_arithmetic():
    a = WElement({(3,): 1, (1, 1): 1, (1,): Fraction(1, 12)})
    b = WElement({(1, 1): -1, (2,): 2})
    s = a + b
    assert s.coefficient((1, 1)) == 0
    assert len(s) == 3
    assert s.support() == [(3,), (2,), (1,)]
    assert (a * 12).coefficient((1,)) == 1
    assert a - a == WElement()
    assert not WElement({(2,): 0})
    assert a.to_json() == {"3": "1", "1,1": "1", "1": "1/12"}
    assert hash(WElement.basis((2,))) == hash(WElement({(2,): 1}))


def test_sizes_and_errors():
    assert check_same_size([(2,), (1, 1)]) == 2
    assert check_same_size([], 3) == 3
    with pytest.raises(DegreeMismatch):
        check_same_size([(2,), (1,)])
    e = ConstraintViolation("odd", relation="riemann-hurwitz")
    assert isinstance(e, GWHError) and isinstance(e, ValueError)
    assert e.relation == "riemann-hurwitz"
    assert OversizeCondition.relation == "oversize"
