"""Seeded random objects for the verification harness and the tests."""

from __future__ import annotations

import random
from fractions import Fraction
from typing import Sequence

from .analysis import is_lsm
from .core import FnTable, from_matrix, unary
from .formula import Atom, PpsFormula
from .transforms import FourierTable, fourier_inverse

SMALL = (Fraction(0), Fraction(1), Fraction(2), Fraction(3), Fraction(1, 2), Fraction(2, 3))
POSITIVE = (Fraction(1), Fraction(2), Fraction(3), Fraction(1, 2), Fraction(3, 4), Fraction(5, 2))


def table(rng: random.Random, n: int, values: Sequence = SMALL) -> FnTable:
    return FnTable(n, (rng.choice(values) for _ in range(1 << n)))


def binary_table(rng: random.Random) -> FnTable:
    """A 2x2 table biased towards zero entries and rank-1 boundaries."""
    if rng.random() < 0.2:
        u = [rng.choice(SMALL) for _ in range(2)]
        v = [rng.choice(SMALL) for _ in range(2)]
        return from_matrix(u[0] * v[0], u[0] * v[1], u[1] * v[0], u[1] * v[1])
    return table(rng, 2)


def lsm_permissive(rng: random.Random, n: int, values: Sequence = POSITIVE) -> FnTable:
    """Rejection sampling over a rational grid."""
    while True:
        f = table(rng, n, values)
        if is_lsm(f):
            return f


def p_member(rng: random.Random, n: int) -> FnTable:
    """A function with nonnegative Fourier spectrum: the constant coefficient
    dominates the others, so the inverse transform stays nonnegative."""
    coeffs = [Fraction(rng.randint(0, 4), rng.randint(1, 3)) for _ in range(1 << n)]
    coeffs[0] = sum(coeffs[1:]) + rng.randint(0, 2)
    return fourier_inverse(FourierTable(n, tuple(coeffs)))


def lsm2_product(rng: random.Random, n: int, factors: int = 4) -> FnTable:
    """A product of random binary lsm tables and unaries on n variables."""
    out = FnTable.constant(n, 1)
    for _ in range(factors):
        if n >= 2 and rng.random() < 0.7:
            i, j = rng.sample(range(n), 2)
            b = lsm_permissive(rng, 2)
            out = out * FnTable.from_function(n, lambda *x: b[(x[i], x[j])])
        elif n >= 1:
            i = rng.randrange(n)
            u = unary(rng.choice(POSITIVE), rng.choice(POSITIVE))
            out = out * FnTable.from_function(n, lambda *x: u[x[i]])
    return out


def formula(rng: random.Random, env_names: dict[str, int], max_vars: int = 12,
            max_atoms: int = 8) -> PpsFormula:
    total = rng.randint(1, max_vars)
    n_free = rng.randint(0, min(total, 4))
    names = [f"v{i}" for i in range(total)]
    atoms = []
    for _ in range(rng.randint(0, max_atoms)):
        fn = rng.choice(sorted(env_names))
        atoms.append(Atom(fn, [rng.choice(names) for _ in range(env_names[fn])]))
    return PpsFormula(names[:n_free], names[n_free:], atoms)


def environment(rng: random.Random, count: int = 4) -> dict[str, FnTable]:
    env = {}
    for k in range(count):
        env[f"R{k}"] = table(rng, rng.randint(0, 3))
    env["EQ"] = from_matrix(1, 0, 0, 1)
    return env


def gf2_matrix(rng: random.Random, max_rows: int = 4, max_cols: int = 5) -> list[list[int]]:
    n, e = rng.randint(1, max_rows), rng.randint(1, max_cols)
    return [[rng.randint(0, 1) for _ in range(e)] for _ in range(n)]
