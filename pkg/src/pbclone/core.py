"""Dense exact tables of nonnegative pseudo-Boolean functions.

A function F: {0,1}^n -> Q>=0 is stored as a tuple of 2^n Fractions.  The
entry for the point (x_1, ..., x_n) lives at index sum_i x_i * 2^(i-1), i.e.
x_1 is the least significant bit.  Positions in the API are 0-based, so
position 0 refers to x_1.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Iterator, Mapping, Sequence

from .errors import ArityError, CapacityError

DEFAULT_ARITY_CAP = 20
_arity_cap = DEFAULT_ARITY_CAP


def arity_cap() -> int:
    return _arity_cap


def set_arity_cap(cap: int) -> int:
    """Set the global dense-table arity cap; returns the previous value."""
    global _arity_cap
    if cap < 0:
        raise ValueError("arity cap must be nonnegative")
    previous, _arity_cap = _arity_cap, int(cap)
    return previous


def as_value(v) -> Fraction:
    """Coerce ints, Fractions and 'p/q' strings to an exact Fraction."""
    if isinstance(v, Fraction):
        return v
    if isinstance(v, bool):
        return Fraction(int(v))
    if isinstance(v, int):
        return Fraction(v)
    if isinstance(v, str):
        return Fraction(v.strip())
    if isinstance(v, float):
        raise TypeError("floating-point values are not accepted; pass a Fraction or 'p/q' string")
    return Fraction(v)


def popcount(mask: int) -> int:
    return bin(mask).count("1")


def bits(mask: int, n: int) -> tuple[int, ...]:
    """The point (x_1, ..., x_n) encoded by ``mask``."""
    return tuple((mask >> i) & 1 for i in range(n))


def mask_of(point: Sequence[int]) -> int:
    m = 0
    for i, b in enumerate(point):
        if b not in (0, 1):
            raise ValueError(f"point coordinates must be 0/1, got {b!r}")
        m |= b << i
    return m


@dataclass(frozen=True)
class FnTable:
    """An arity-n nonnegative function as an immutable dense table."""

    arity: int
    values: tuple[Fraction, ...]

    def __init__(self, arity: int, values: Iterable):
        arity = int(arity)
        if arity < 0:
            raise ArityError("arity must be nonnegative")
        if arity > _arity_cap:
            raise CapacityError(f"arity {arity} exceeds the dense-table cap {_arity_cap}")
        vals = tuple(as_value(v) for v in values)
        if len(vals) != 1 << arity:
            raise ArityError(f"arity {arity} needs {1 << arity} values, got {len(vals)}")
        for v in vals:
            if v < 0:
                raise ValueError(f"function values must be nonnegative, got {v}")
        object.__setattr__(self, "arity", arity)
        object.__setattr__(self, "values", vals)

    @classmethod
    def from_function(cls, arity: int, fn) -> "FnTable":
        """Tabulate ``fn(x_1, ..., x_n)`` over all 2^n points."""
        return cls(arity, (fn(*bits(m, arity)) for m in range(1 << arity)))

    @classmethod
    def constant(cls, arity: int, c) -> "FnTable":
        return cls(arity, [c] * (1 << arity))

    def __getitem__(self, key) -> Fraction:
        if isinstance(key, int):
            return self.values[key]
        return self.values[mask_of(key)]

    def __len__(self) -> int:
        return len(self.values)

    def __iter__(self) -> Iterator[Fraction]:
        return iter(self.values)

    def items(self) -> Iterator[tuple[tuple[int, ...], Fraction]]:
        for m, v in enumerate(self.values):
            yield bits(m, self.arity), v

    def __mul__(self, other):
        if isinstance(other, FnTable):
            _same_arity(self, other)
            return FnTable(self.arity, (a * b for a, b in zip(self.values, other.values)))
        c = as_value(other)
        return FnTable(self.arity, (a * c for a in self.values))

    __rmul__ = __mul__

    def __add__(self, other: "FnTable") -> "FnTable":
        _same_arity(self, other)
        return FnTable(self.arity, (a + b for a, b in zip(self.values, other.values)))

    def __pow__(self, k: int) -> "FnTable":
        return FnTable(self.arity, (a ** k for a in self.values))

    def max(self) -> Fraction:
        return max(self.values)

    def min(self) -> Fraction:
        return min(self.values)

    def is_zero(self) -> bool:
        return all(v == 0 for v in self.values)

    def is_relation(self) -> bool:
        return all(v in (0, 1) for v in self.values)

    def support(self) -> list[int]:
        return [m for m, v in enumerate(self.values) if v != 0]

    def matrix(self) -> tuple[tuple[Fraction, Fraction], tuple[Fraction, Fraction]]:
        """For binary F, ((f00, f01), (f10, f11)) with rows indexed by x_1."""
        if self.arity != 2:
            raise ArityError("matrix() needs a binary table")
        v = self.values
        return ((v[0], v[2]), (v[1], v[3]))

    def transpose(self) -> "FnTable":
        """For binary F, the table of F(x_2, x_1)."""
        if self.arity != 2:
            raise ArityError("transpose() needs a binary table")
        v = self.values
        return FnTable(2, (v[0], v[2], v[1], v[3]))

    def sup_distance(self, other: "FnTable") -> Fraction:
        _same_arity(self, other)
        return max(abs(a - b) for a, b in zip(self.values, other.values))

    def __repr__(self) -> str:
        body = " ".join(str(v) for v in self.values)
        return f"FnTable({self.arity}: {body})"


def _same_arity(f: FnTable, g: FnTable) -> None:
    if f.arity != g.arity:
        raise ArityError(f"arity mismatch: {f.arity} vs {g.arity}")


def from_matrix(f00, f01, f10, f11) -> FnTable:
    """Binary table from the matrix entries F(0,0), F(0,1), F(1,0), F(1,1)."""
    return FnTable(2, (f00, f10, f01, f11))


def unary(u0, u1) -> FnTable:
    return FnTable(1, (u0, u1))


def nullary(c) -> FnTable:
    return FnTable(0, (c,))


IMP = from_matrix(1, 1, 0, 1)
EQ = from_matrix(1, 0, 0, 1)
NEQ = from_matrix(0, 1, 1, 0)
OR = from_matrix(0, 1, 1, 1)
NAND = from_matrix(1, 1, 1, 0)
DELTA0 = unary(1, 0)
DELTA1 = unary(0, 1)
EQ_PERMISSIVE = from_matrix(2, 1, 1, 2)
XOR3 = FnTable.from_function(3, lambda x, y, z: 1 if (x + y + z) % 2 == 0 else 0)
EQ3 = FnTable.from_function(3, lambda x, y, z: 1 if x == y == z else 0)
HALF = nullary(Fraction(1, 2))

BUILTINS: dict[str, FnTable] = {
    "IMP": IMP,
    "EQ": EQ,
    "NEQ": NEQ,
    "OR": OR,
    "NAND": NAND,
    "DELTA0": DELTA0,
    "DELTA1": DELTA1,
    "EQP": EQ_PERMISSIVE,
    "XOR3": XOR3,
    "EQ3": EQ3,
    "HALF": HALF,
}


# --- elementary operations -------------------------------------------------

def pin(f: FnTable, assignments: Mapping[int, int]) -> FnTable:
    """Fix the given 0-based positions; survivors keep their relative order."""
    n = f.arity
    fixed = 0
    for pos, c in assignments.items():
        if not 0 <= pos < n:
            raise ArityError(f"position {pos} out of range for arity {n}")
        if c not in (0, 1):
            raise ValueError(f"pinned constant must be 0 or 1, got {c!r}")
        fixed |= c << pos
    if len(set(assignments)) != len(assignments):
        raise ArityError("duplicate pinned position")
    free = [i for i in range(n) if i not in assignments]
    out = []
    for m in range(1 << len(free)):
        idx = fixed
        for j, pos in enumerate(free):
            idx |= ((m >> j) & 1) << pos
        out.append(f.values[idx])
    return FnTable(len(free), out)


def pin_items(assignments) -> dict[int, int]:
    """Accept either a mapping or an iterable of (position, bit) pairs."""
    if isinstance(assignments, Mapping):
        return dict(assignments)
    items = list(assignments)
    positions = [p for p, _ in items]
    if len(set(positions)) != len(positions):
        raise ArityError("duplicate pinned position")
    return dict(items)


def two_pinnings(f: FnTable) -> list[tuple[int, int, tuple[int, ...], FnTable]]:
    """All binary pinnings F(x_i, x_j; c) for i < j.

    Each entry is (i, j, c, table) where c lists the constants of the other
    positions in increasing position order.
    """
    n = f.arity
    if n < 2:
        raise ArityError("two_pinnings needs arity >= 2")
    out = []
    for i, j in itertools.combinations(range(n), 2):
        rest = [p for p in range(n) if p not in (i, j)]
        for c in itertools.product((0, 1), repeat=len(rest)):
            out.append((i, j, c, pin(f, dict(zip(rest, c)))))
    return out


def product(f: FnTable, g: FnTable, scope_f: Sequence[int], scope_g: Sequence[int],
            out_arity: int) -> FnTable:
    """Pointwise product of two atoms viewed as functions of ``out_arity`` variables.

    ``scope_f[k]`` is the output variable feeding argument k of ``f``;
    repeated variables are allowed.
    """
    for fn, scope in ((f, scope_f), (g, scope_g)):
        if len(scope) != fn.arity:
            raise ArityError(f"scope {tuple(scope)} does not match arity {fn.arity}")
        for v in scope:
            if not 0 <= v < out_arity:
                raise ArityError(f"scope index {v} out of range for arity {out_arity}")
    out = []
    for m in range(1 << out_arity):
        a = f.values[_project(m, scope_f)]
        b = g.values[_project(m, scope_g)] if a else 0
        out.append(a * b)
    return FnTable(out_arity, out)


def _project(mask: int, scope: Sequence[int]) -> int:
    idx = 0
    for k, v in enumerate(scope):
        idx |= ((mask >> v) & 1) << k
    return idx


def expand(f: FnTable, scope: Sequence[int], out_arity: int) -> FnTable:
    """The atom f(x_scope) as a function of ``out_arity`` variables."""
    return product(f, FnTable(0, (1,)), scope, (), out_arity)


def sum_out(f: FnTable, position: int) -> FnTable:
    """Sum over the variable at ``position``; the arity drops by one."""
    n = f.arity
    if n == 0:
        raise ArityError("cannot sum out of a nullary table")
    if not 0 <= position < n:
        raise ArityError(f"position {position} out of range for arity {n}")
    low = (1 << position) - 1
    bit = 1 << position
    out = []
    for m in range(1 << (n - 1)):
        idx = (m & low) | ((m & ~low) << 1)
        out.append(f.values[idx] + f.values[idx | bit])
    return FnTable(n - 1, out)


def bar(f: FnTable) -> FnTable:
    """F-bar(x) = F(1 - x)."""
    full = (1 << f.arity) - 1
    return FnTable(f.arity, (f.values[full ^ m] for m in range(1 << f.arity)))


def star(f: FnTable) -> FnTable:
    """F-star = F * F-bar."""
    full = (1 << f.arity) - 1
    v = f.values
    return FnTable(f.arity, (v[m] * v[full ^ m] for m in range(1 << f.arity)))


def underlying_relation(f: FnTable) -> FnTable:
    return FnTable(f.arity, (1 if v > 0 else 0 for v in f.values))


def is_permissive(f: FnTable) -> bool:
    return all(v > 0 for v in f.values)


def integer_scaled(values: Sequence[Fraction]) -> list[int]:
    """Values multiplied by the lcm of their denominators (a positive constant)."""
    d = 1
    for v in values:
        d = d * v.denominator // math.gcd(d, v.denominator)
    return [v.numerator * (d // v.denominator) for v in values]
