from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pbclone import core
from pbclone.core import (DELTA0, DELTA1, EQ, EQ_PERMISSIVE, IMP, NAND, NEQ, XOR3, FnTable,
                          bar, from_matrix, nullary, pin, product, star, sum_out,
                          two_pinnings, underlying_relation, unary)
from pbclone.errors import ArityError, CapacityError

values = st.sampled_from([Fraction(0), Fraction(1), Fraction(2), Fraction(1, 3), Fraction(5, 2)])


@st.composite
def tables(draw, min_arity=0, max_arity=5):
    n = draw(st.integers(min_arity, max_arity))
    return FnTable(n, draw(st.lists(values, min_size=1 << n, max_size=1 << n)))


@st.composite
def same_arity_pair(draw, max_arity=5):
    f = draw(tables(max_arity=max_arity))
    g = FnTable(f.arity, draw(st.lists(values, min_size=len(f), max_size=len(f))))
    return f, g


def test_construction_normalises_and_validates():
    f = FnTable(1, ["2/4", 3])
    assert f.values == (Fraction(1, 2), Fraction(3))
    with pytest.raises(ArityError):
        FnTable(2, [1, 2, 3])
    with pytest.raises(ValueError):
        FnTable(1, [1, -1])


def test_arity_cap_is_enforced():
    old = core.set_arity_cap(3)
    try:
        with pytest.raises(CapacityError):
            FnTable.constant(4, 1)
    finally:
        core.set_arity_cap(old)


def test_lsb_index_order():
    f = from_matrix(1, 2, 3, 4)
    assert f[(0, 1)] == 2 and f[(1, 0)] == 3
    assert f.matrix() == ((1, 2), (3, 4))


def test_pin_examples():
    assert pin(IMP, {0: 1}) == DELTA1
    assert pin(IMP, {}) == IMP
    assert pin(XOR3, {2: 1}) == NEQ


def test_pin_rejects_bad_positions():
    with pytest.raises(ArityError):
        pin(IMP, {2: 0})


def test_two_pinnings_counts():
    assert [(i, j, p, f) for i, j, p, f in two_pinnings(IMP)] == [(0, 1, (), IMP)]
    assert len(two_pinnings(FnTable.constant(3, 1))) == 6


def test_two_pinnings_of_graded_arity4():
    from pbclone.transforms import graded_arity4
    tabs = {(i, j, pins): f for i, j, pins, f in two_pinnings(graded_arity4())}
    assert tabs[(2, 3, (0, 0))].values == (1, 1, 1, 1)
    assert tabs[(2, 3, (0, 1))].values == (1, 1, 1, 2)
    assert tabs[(2, 3, (1, 1))].values == (1, 2, 2, 4)


def test_product_examples():
    assert product(DELTA0, DELTA1, [0], [0], 1).is_zero()
    assert product(IMP, IMP, [0, 1], [1, 0], 2) == EQ
    assert product(NAND, FnTable.constant(2, 1), [0, 1], [0, 1], 2) == NAND


def test_sum_out_examples():
    assert sum_out(NAND, 1) == unary(2, 1)
    assert sum_out(DELTA0, 0) == nullary(1)
    assert sum_out(XOR3, 1) == FnTable.constant(2, 1)


def test_bar_and_star_examples():
    assert bar(DELTA0) == DELTA1
    assert bar(IMP) == from_matrix(1, 0, 1, 1) == IMP.transpose()
    u = unary(2, 3)
    assert star(u) == FnTable.constant(1, 6)
    assert star(EQ) == EQ


def test_underlying_relation_examples():
    assert underlying_relation(EQ_PERMISSIVE) == FnTable.constant(2, 1)
    assert underlying_relation(2 * IMP) == IMP
    assert underlying_relation(FnTable.constant(2, 0)).is_zero()


def test_is_permissive_examples():
    assert core.is_permissive(EQ_PERMISSIVE)
    assert not core.is_permissive(IMP)
    assert core.is_permissive(nullary(Fraction(1, 2)))


@settings(max_examples=60, deadline=None)
@given(tables(min_arity=1))
def test_bar_commutes_with_sum_out(f):
    for i in range(f.arity):
        assert bar(sum_out(f, i)) == sum_out(bar(f), i)


@settings(max_examples=60, deadline=None)
@given(tables())
def test_bar_is_an_involution(f):
    assert bar(bar(f)) == f


@settings(max_examples=60, deadline=None)
@given(same_arity_pair())
def test_star_and_support_are_multiplicative(pair):
    f, g = pair
    assert star(f * g) == star(f) * star(g)
    assert underlying_relation(f * g) == underlying_relation(f) * underlying_relation(g)


@settings(max_examples=60, deadline=None)
@given(tables(min_arity=1), st.data())
def test_pin_equals_summing_against_a_delta(f, data):
    i = data.draw(st.integers(0, f.arity - 1))
    c = data.draw(st.integers(0, 1))
    delta = DELTA1 if c else DELTA0
    weighted = product(f, delta, list(range(f.arity)), [i], f.arity)
    assert sum_out(weighted, i) == pin(f, {i: c})
