"""Möbius and Fourier transforms and the classes P and C.

The Möbius coefficients are kept in multiplicative form,
M(y) = prod_{w <= y} F(w)^((-1)^|y - w|), so that a permissive rational table
has rational coefficients and F(x) = prod_{y <= x} M(y).

The Fourier transform is F^(y) = 2^-n sum_w (-1)^|w & y| F(w) with inverse
F(w) = sum_y (-1)^|w & y| F^(y).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable

from . import core
from .core import FnTable, bits
from .errors import ArityError, NotPermissiveError


@dataclass(frozen=True)
class MobiusTable:
    arity: int
    coefficients: tuple[Fraction, ...]

    def __getitem__(self, key) -> Fraction:
        return self.coefficients[key if isinstance(key, int) else core.mask_of(key)]


@dataclass(frozen=True)
class FourierTable:
    arity: int
    coefficients: tuple[Fraction, ...]

    def __getitem__(self, key) -> Fraction:
        return self.coefficients[key if isinstance(key, int) else core.mask_of(key)]

    def scaled(self, c) -> "FourierTable":
        c = core.as_value(c)
        return FourierTable(self.arity, tuple(c * v for v in self.coefficients))


def mobius(f: FnTable) -> MobiusTable:
    if not core.is_permissive(f):
        raise NotPermissiveError("the multiplicative Möbius transform needs a permissive table")
    m = list(f.values)
    for i in range(f.arity):
        bit = 1 << i
        for y in range(len(m)):
            if y & bit:
                m[y] = m[y] / m[y ^ bit]
    return MobiusTable(f.arity, tuple(m))


def mobius_inverse(t: MobiusTable) -> FnTable:
    v = list(t.coefficients)
    for i in range(t.arity):
        bit = 1 << i
        for x in range(len(v)):
            if x & bit:
                v[x] = v[x] * v[x ^ bit]
    return FnTable(t.arity, v)


def _walsh(values: Iterable[Fraction], n: int) -> list[Fraction]:
    v = list(values)
    for i in range(n):
        bit = 1 << i
        for x in range(len(v)):
            if not x & bit:
                a, b = v[x], v[x | bit]
                v[x], v[x | bit] = a + b, a - b
    return v


def fourier(f: FnTable) -> FourierTable:
    scale = Fraction(1, 1 << f.arity)
    return FourierTable(f.arity, tuple(c * scale for c in _walsh(f.values, f.arity)))


def fourier_inverse(t: FourierTable) -> FnTable:
    return FnTable(t.arity, _walsh(t.coefficients, t.arity))


def convolution_check(f: FnTable, g: FnTable) -> bool:
    """Whether (FG)^(x) = sum_y F^(y) G^(x xor y) holds exactly."""
    if f.arity != g.arity:
        raise ArityError("convolution needs tables of equal arity")
    fh, gh = fourier(f).coefficients, fourier(g).coefficients
    lhs = fourier(f * g).coefficients
    size = len(fh)
    return all(lhs[x] == sum(fh[y] * gh[x ^ y] for y in range(size)) for x in range(size))


@dataclass(frozen=True)
class ClassPResult:
    holds: bool
    mask: tuple[int, ...] | None = None
    value: Fraction | None = None

    def __bool__(self) -> bool:
        return self.holds


def in_class_P(f: FnTable) -> ClassPResult:
    """Nonnegative Fourier spectrum; the witness is the lowest-index negative coefficient."""
    coeffs = fourier(f).coefficients
    for y, c in enumerate(coeffs):
        if c < 0:
            return ClassPResult(False, bits(y, f.arity), c)
    return ClassPResult(True)


@dataclass(frozen=True)
class ClassCResult:
    holds: bool
    pinning: dict[int, int] | None = None
    mask: tuple[int, ...] | None = None
    value: Fraction | None = None

    def __bool__(self) -> bool:
        return self.holds


def pinnings_in_order(n: int, min_free: int = 0):
    """(position -> bit) maps ordered by the pinned-position tuple, then the bits."""
    sets = [s for k in range(n - min_free + 1) for s in itertools.combinations(range(n), k)]
    for s in sorted(sets):
        for c in itertools.product((0, 1), repeat=len(s)):
            yield dict(zip(s, c))


def in_class_C(f: FnTable) -> ClassCResult:
    """Every pinning G of arity >= 2 has G* in P.  Unary and nullary pinnings
    pass automatically since their star is constant."""
    for p in pinnings_in_order(f.arity, min_free=2):
        g = core.pin(f, p)
        r = in_class_P(core.star(g))
        if not r:
            return ClassCResult(False, p, r.mask, r.value)
    return ClassCResult(True)


def graded_arity4() -> FnTable:
    """The arity-4 table with value 4 at weight 4, 2 at weight 3 and 1 elsewhere.

    It is lsm but its star has a negative Fourier coefficient at (1,1,1,1).
    """
    def value(*x):
        w = sum(x)
        return 4 if w == 4 else 2 if w == 3 else 1
    return FnTable.from_function(4, value)
