"""Parity constructions: normalizing a weighted even-parity triple and
expressing the Ising partition function of a binary matroid through
even-parity constraints and one unary weight."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .. import core
from ..core import FnTable, unary
from ..errors import PreconditionError
from ..formula import Atom, CspInstance, PpsFormula
from .plan import Radical

_PERMS = tuple(itertools.permutations(range(3)))


@dataclass(frozen=True)
class Oplus3Report:
    symmetrised: FnTable
    mu0: Fraction
    mu2: Fraction
    u0: Radical             # mu0^(-1/3)
    u1: Radical             # mu0^(1/6) mu2^(-1/2)
    normalized: FnTable | None

    @property
    def rational(self) -> bool:
        return self.normalized is not None


def oplus3_normalize(f: FnTable) -> Oplus3Report:
    """Symmetrise F over the six argument orders and rescale by U(x)U(y)U(z)."""
    if f.arity != 3 or core.underlying_relation(f) != core.XOR3:
        raise PreconditionError("the underlying relation must be the even-parity triple")
    sym = []
    for m in range(8):
        x = core.bits(m, 3)
        v = Fraction(1)
        for p in _PERMS:
            v *= f[tuple(x[i] for i in p)]
        sym.append(v)
    sym = FnTable(3, sym)
    mu0, mu2 = sym[(0, 0, 0)], sym[(0, 1, 1)]
    u0 = Radical(1 / mu0 ** 2, 6)
    u1 = Radical(mu0 / mu2 ** 3, 6)
    e0, e1 = u0.exact(), u1.exact()
    normalized = None
    if e0 is not None and e1 is not None:
        u = (e0, e1)
        normalized = FnTable.from_function(
            3, lambda a, b, c: sym[(a, b, c)] * u[a] * u[b] * u[c])
    return Oplus3Report(sym, mu0, mu2, u0, u1, normalized)


def oplus3_downstream(u_prime: FnTable | None = None) -> tuple[PpsFormula, dict[str, FnTable]]:
    """G(x, z) = sum_y XOR3(x, y, z) U'(y); with U' = (1, 2) this is (1, 2, 2, 1)."""
    u_prime = unary(1, 2) if u_prime is None else u_prime
    psi = PpsFormula(("x", "z"), ("y",), [Atom("XOR3", ("x", "y", "z")), Atom("UPRIME", ("y",))])
    return psi, {"UPRIME": u_prime}


# --- Ising -------------------------------------------------------------------

Matrix = Sequence[Sequence[int]]


def _check_matrix(m: Matrix) -> tuple[int, int]:
    rows = [list(r) for r in m]
    if not rows or not rows[0]:
        raise PreconditionError("the matrix must have at least one row and one column")
    width = len(rows[0])
    for r in rows:
        if len(r) != width or any(b not in (0, 1) for b in r):
            raise PreconditionError("the matrix must be rectangular with 0/1 entries")
    return len(rows), width


def ising_partition_brute_force(m: Matrix, y) -> Fraction:
    """Sum over spins sigma of prod_e y^(1 xor delta_e(sigma))."""
    n, ne = _check_matrix(m)
    y = core.as_value(y)
    total = Fraction(0)
    for sigma in itertools.product((0, 1), repeat=n):
        agree = 0
        for e in range(ne):
            delta = sum(m[i][e] * sigma[i] for i in range(n)) % 2
            agree += 1 - delta
        total += y ** agree
    return total


@dataclass(frozen=True)
class IsingReduction:
    instance: CspInstance
    env: dict[str, FnTable]
    scale: Fraction
    w: Fraction


def ising_reduction(m: Matrix, y) -> IsingReduction:
    """Z_Ising(M; y) = scale * Z(instance) with w = (y-1)/(y+1).

    One variable per column; a row of width 1 pins its column to 0 by
    XOR3(x, x, x), a row of width 2 identifies its two columns, and wider
    rows become a chain of XOR3 atoms through fresh auxiliary variables.
    """
    n, ne = _check_matrix(m)
    y = core.as_value(y)
    if y <= 1:
        raise PreconditionError("y must exceed 1")
    w = (y - 1) / (y + 1)
    parent = list(range(ne))

    def find(e):
        while parent[e] != e:
            parent[e] = parent[parent[e]]
            e = parent[e]
        return e

    for row in m:
        cols = [e for e, b in enumerate(row) if b]
        if len(cols) == 2:
            a, b = sorted((find(cols[0]), find(cols[1])))
            parent[b] = a

    def col(e):
        return f"e{find(e) + 1}"

    variables = [f"e{e + 1}" for e in range(ne) if find(e) == e]
    atoms = [Atom("UW", (col(e),)) for e in range(ne)]
    for i, row in enumerate(m):
        cols = [col(e) for e, b in enumerate(row) if b]
        if len(cols) == 1:
            atoms.append(Atom("XOR3", (cols[0],) * 3))
        elif len(cols) >= 3:
            prev = cols[0]
            for j in range(1, len(cols) - 2):
                t = f"t{i + 1}_{j}"
                variables.append(t)
                atoms.append(Atom("XOR3", (prev, cols[j], t)))
                prev = t
            atoms.append(Atom("XOR3", (prev, cols[-2], cols[-1])))
    scale = ((y + 1) / 2) ** ne * 2 ** n
    return IsingReduction(CspInstance(variables, atoms), {"UW": unary(1, w)}, scale, w)
