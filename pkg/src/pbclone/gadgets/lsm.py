"""Constructions inside the lsm world: threshold factors, the arity-3
decomposition, lifting to permissive functions and extracting a non-lsm
binary function."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .. import core
from ..analysis import is_lsm, is_lsm_topkis
from ..core import FnTable, bits, mask_of, nullary, popcount, unary
from ..errors import ArityError, NotPermissiveError, PreconditionError
from ..formula import Atom, PpsFormula, evaluate
from ..transforms import mobius


def _point(y0, n: int | None) -> tuple[int, ...]:
    if isinstance(y0, int):
        if n is None:
            raise ValueError("an integer mask needs the arity n")
        return bits(y0, n)
    y = tuple(int(b) for b in y0)
    if n is not None and len(y) != n:
        raise ArityError(f"point {y} does not have arity {n}")
    mask_of(y)
    return y


def chi_builder(y0, c, n: int | None = None, prefix: str = "chi",
                complement: bool = False) -> tuple[PpsFormula, dict[str, FnTable]]:
    """Formula for the function equal to c on {x >= y0} and 1 elsewhere.

    With ``complement`` the formula computes the same function of 1 - x,
    obtained by reversing the IMP atoms and the weight.
    """
    y = _point(y0, n)
    n = len(y)
    c = core.as_value(c)
    xs = tuple(f"x{i + 1}" for i in range(n))
    ones = [i for i, b in enumerate(y) if b]
    name = f"{prefix}U"
    if len(ones) > 1:
        if c < 1:
            raise PreconditionError(f"c = {c} < 1 with a point of weight {len(ones)}")
        z = f"{prefix}z"
        u = unary(1, c - 1)
        if complement:
            u = unary(c - 1, 1)
            atoms = [Atom(name, (z,))] + [Atom("IMP", (xs[i], z)) for i in ones]
        else:
            atoms = [Atom(name, (z,))] + [Atom("IMP", (z, xs[i])) for i in ones]
        return PpsFormula(xs, (z,), atoms), {name: u}
    if c <= 0:
        raise PreconditionError("c must be positive")
    if len(ones) == 1:
        u = unary(c, 1) if complement else unary(1, c)
        return PpsFormula(xs, (), [Atom(name, (xs[ones[0]],))]), {name: u}
    return PpsFormula(xs, (), [Atom(name, ())]), {name: nullary(c)}


@dataclass(frozen=True)
class ChiFactor:
    point: tuple[int, ...]
    c: Fraction
    formula: PpsFormula
    env: dict[str, FnTable]

    def table(self) -> FnTable:
        return evaluate(self.formula, self.env)


@dataclass(frozen=True)
class Lsm3Decomposition:
    """F as a product of threshold factors; ``complemented`` records that
    the factors were built for F-bar and then written in terms of 1 - x."""

    complemented: bool
    factors: tuple[ChiFactor, ...]

    def reconstruct(self) -> FnTable:
        out = FnTable.constant(3, 1)
        for fac in self.factors:
            out = out * fac.table()
        return out

    def formula(self) -> tuple[PpsFormula, dict[str, FnTable]]:
        """All factors combined into one formula on (x1, x2, x3)."""
        bound, atoms, env = [], [], {}
        for fac in self.factors:
            bound += fac.formula.bound
            atoms += fac.formula.atoms
            env.update(fac.env)
        return PpsFormula(("x1", "x2", "x3"), bound, atoms), env


def lsm3_decompose(f: FnTable) -> Lsm3Decomposition:
    if f.arity != 3:
        raise ArityError("lsm3_decompose needs an arity-3 table")
    if not core.is_permissive(f):
        raise NotPermissiveError("lsm3_decompose needs a permissive table")
    if not is_lsm(f):
        raise PreconditionError("the table is not lsm")
    m = mobius(f)
    complemented = m[7] < 1
    if complemented:
        m = mobius(core.bar(f))
    factors = []
    for y in sorted(range(8), key=lambda v: (popcount(v), bits(v, 3))):
        c = m[y]
        if c == 1 and y:
            continue
        if y == 0 and c == 1 and any(m[v] != 1 for v in range(1, 8)):
            continue
        point = bits(y, 3)
        psi, env = chi_builder(point, c, prefix=f"m{y}", complement=complemented)
        factors.append(ChiFactor(point, c, psi, env))
    return Lsm3Decomposition(complemented, tuple(factors))


def topkis_lift(f: FnTable) -> FnTable:
    """A permissive lsm G with F = R_F G."""
    if not is_lsm(f):
        raise PreconditionError("topkis_lift needs an lsm table")
    if f.is_zero():
        return FnTable.constant(f.arity, 1)
    values = list(f.values)
    if values[0] == 0:
        values[0] = Fraction(1)
    nonzero = [v for v in values if v]
    mu = min(nonzero) / max(nonzero)
    n = f.arity
    out = []
    for x in range(1 << n):
        best = Fraction(0)
        sub = x
        while True:
            if values[sub]:
                best = max(best, values[sub] * mu ** (popcount(x) - popcount(sub)))
            if sub == 0:
                break
            sub = (sub - 1) & x
        out.append(best)
    return FnTable(n, out)


def h_gadget() -> PpsFormula:
    """H(x1,x2) = sum IMP(y1,x1) IMP(y1,x2) IMP(x1,y2) IMP(x2,y2), with
    H(0,0) = H(1,1) = 2 and H(0,1) = H(1,0) = 1."""
    return PpsFormula(("x1", "x2"), ("y1", "y2"),
                      [Atom("IMP", ("y1", "x1")), Atom("IMP", ("y1", "x2")),
                       Atom("IMP", ("x1", "y2")), Atom("IMP", ("x2", "y2"))])


def h_power(f: FnTable, k: int) -> FnTable:
    """H_k(x) = sum_y F(y) prod_i H(x_i, y_i)^k with H^k = 2^k on the diagonal."""
    n = f.arity
    two_k = Fraction(2) ** k
    out = []
    for x in range(1 << n):
        total = Fraction(0)
        for y, v in enumerate(f.values):
            if v:
                total += v * two_k ** (n - popcount(x ^ y))
        out.append(total)
    return FnTable(n, out)


@dataclass(frozen=True)
class NonLsmWitness:
    table: FnTable                       # strictly positive, f00 f11 < f01 f10
    k: int
    positions: tuple[int, int]
    pinning: dict[int, int]


def extract_nonlsm_binary(f: FnTable, max_k: int = 4096) -> NonLsmWitness:
    """Least k for which H_k has a non-lsm 2-pinning, found by a linear scan."""
    if f.arity < 2 or is_lsm(f):
        raise PreconditionError("extract_nonlsm_binary needs a non-lsm table")
    for k in range(1, max_k + 1):
        hk = h_power(f, k)
        if is_lsm_topkis(hk):
            continue
        for i, j, c, g in core.two_pinnings(hk):
            if g[0] * g[3] < g[1] * g[2]:
                rest = [p for p in range(f.arity) if p not in (i, j)]
                return NonLsmWitness(g, k, (i, j), dict(zip(rest, c)))
    raise PreconditionError(f"no violating 2-pinning found for k <= {max_k}")

