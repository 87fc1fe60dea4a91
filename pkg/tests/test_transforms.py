from fractions import Fraction

from hypothesis import given, settings
from hypothesis import strategies as st

from pbclone import randgen
from pbclone.core import EQ, EQ3, EQ_PERMISSIVE, IMP, NEQ, XOR3, FnTable, star, sum_out, unary
from pbclone.transforms import (convolution_check, fourier, fourier_inverse, graded_arity4,
                                in_class_C, in_class_P, mobius, mobius_inverse)

positive = st.sampled_from([Fraction(1), Fraction(2), Fraction(1, 3), Fraction(7, 2)])
anyvalue = st.sampled_from([Fraction(0), Fraction(1), Fraction(3), Fraction(2, 5)])


@st.composite
def tables(draw, elements=anyvalue, max_arity=6):
    n = draw(st.integers(0, max_arity))
    return FnTable(n, draw(st.lists(elements, min_size=1 << n, max_size=1 << n)))


def test_mobius_of_a_threshold_function():
    f = FnTable.from_function(3, lambda a, b, c: 3 if a and c else 1)
    m = mobius(f)
    assert m[(1, 0, 1)] == 3
    assert all(v == 1 for k, v in enumerate(m.coefficients) if k != 0b101)
    assert all(v == 1 for v in mobius(FnTable.constant(2, 1)).coefficients)


@settings(max_examples=40, deadline=None)
@given(tables(positive, max_arity=8))
def test_mobius_round_trip(f):
    assert mobius_inverse(mobius(f)) == f


@settings(max_examples=40, deadline=None)
@given(tables(max_arity=8))
def test_fourier_round_trip(f):
    assert fourier_inverse(fourier(f)) == f


def test_fourier_examples():
    assert fourier(EQ_PERMISSIVE).coefficients == (Fraction(3, 2), 0, 0, Fraction(1, 2))
    assert fourier(NEQ)[(1, 1)] == Fraction(-1, 2)
    assert fourier(XOR3).coefficients == tuple(Fraction(1, 2) * v for v in EQ3.values)
    assert fourier(star(graded_arity4()))[(1, 1, 1, 1)] == Fraction(-1, 8)


@settings(max_examples=40, deadline=None)
@given(tables(max_arity=6), st.data())
def test_convolution_random(f, data):
    g = FnTable(f.arity, data.draw(st.lists(anyvalue, min_size=len(f), max_size=len(f))))
    assert convolution_check(f, g)


def test_convolution_trivial_cases():
    assert convolution_check(EQ, EQ)
    assert convolution_check(FnTable.constant(2, 0), IMP)


@settings(max_examples=40, deadline=None)
@given(tables(max_arity=6))
def test_sum_out_halves_fourier(f):
    if f.arity == 0:
        return
    g = fourier(sum_out(f, f.arity - 1))
    fh = fourier(f)
    assert all(g[y] == 2 * fh[y] for y in range(1 << (f.arity - 1)))


def test_class_p_examples():
    assert in_class_P(EQ_PERMISSIVE)
    r = in_class_P(IMP)
    assert not r and r.mask == (0, 1) and r.value == Fraction(-1, 4)
    for u0, u1 in [(3, 1), (2, 2), (1, 0), (5, Fraction(1, 2))]:
        assert in_class_P(unary(u0, u1))


def test_class_c_examples(rng):
    r = in_class_C(graded_arity4())
    assert not r and r.pinning == {} and r.mask == (1, 1, 1, 1) and r.value == Fraction(-1, 8)
    assert in_class_C(EQ)
    for _ in range(100):
        assert in_class_C(randgen.lsm_permissive(rng, 2, randgen.SMALL[1:]))


def test_p_closure():
    from pbclone.verify import p_closure
    assert p_closure(trials=60, seed=5).passed


def test_c_closure():
    from pbclone.verify import c_closure
    assert c_closure(n=5, trials=10, seed=5).passed
