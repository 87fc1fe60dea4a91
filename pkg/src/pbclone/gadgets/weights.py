"""Unary weights from a single binary relation and the constant 1/2.

Counting instances built from ordinal sums of independent variables realise
any positive integer as a partition function; a weight G = (G0, G1) with
denominators 2^m is then obtained by joining two such instances through a
free variable and scaling by (1/2)^m.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .. import core
from ..core import FnTable, unary
from ..errors import PreconditionError
from ..formula import Atom, CspInstance, PpsFormula, ordinal_chain, ordinal_sum, power_of_two_instance
from .plan import GadgetPlan

BASES = ("IMP", "OR", "NAND")


def multiple_instance(a: int, ell: int, fn: str = "IMP", prefix: str = "p") -> CspInstance:
    """a copies of 2^ell joined by ordinal sums; Z = a 2^ell - a + 1."""
    if a < 0 or ell < 0:
        raise ValueError("a and ell must be nonnegative")
    parts = [power_of_two_instance(ell, f"{prefix}{j}_") for j in range(a)]
    if not parts:
        return CspInstance((), ())
    return ordinal_chain(parts, fn)


def count_instance(value: int, fn: str = "IMP", prefix: str = "v") -> CspInstance:
    """An instance with Z equal to the positive integer ``value``.

    With binary digits a_0 + a_1 2 + ... + a_k 2^k it is
    a_1 2^1 +<= ... +<= a_k 2^k +<= (a_0 + ... + a_k - 1) 2.
    """
    if value < 1:
        raise ValueError("value must be a positive integer")
    digits = [(value >> i) & 1 for i in range(value.bit_length())]
    parts = [power_of_two_instance(i, f"{prefix}{i}_") for i in range(1, len(digits)) if digits[i]]
    ones = sum(digits) - 1
    parts += [CspInstance([f"{prefix}u{j}"], ()) for j in range(ones)]
    if not parts:
        return CspInstance((), ())
    return ordinal_chain(parts, fn)


def _dyadic_exponent(v: Fraction) -> int:
    d = v.denominator
    if d & (d - 1):
        raise PreconditionError(f"{v} is not a dyadic rational")
    return d.bit_length() - 1


def _as_pair(g) -> tuple[Fraction, Fraction]:
    if isinstance(g, FnTable):
        if g.arity != 1:
            raise PreconditionError("the target must be unary")
        return g.values
    a, b = g
    return core.as_value(a), core.as_value(b)


def synth_unary(g, base: str = "IMP", n: int | None = None) -> PpsFormula:
    """A formula over {base, HALF} with free variable c evaluating exactly to G."""
    g0, g1 = _as_pair(g)
    if base not in BASES:
        raise PreconditionError(f"base must be one of {BASES}")
    m = max(_dyadic_exponent(g0), _dyadic_exponent(g1))
    if n is not None and m > n:
        raise PreconditionError(f"denominator 2^{m} exceeds the precision 2^{n}")
    scale = 2 ** m
    if base == "IMP":
        if g0 == 0 or g1 == 0:
            raise PreconditionError("the IMP route needs G(0) and G(1) nonzero")
        i = count_instance(int(g0 * scale), "IMP", "a")
        j = count_instance(int(g1 * scale), "IMP", "b")
        atoms = list(i.atoms) + list(j.atoms)
        atoms += [Atom("IMP", ("c", a)) for a in i.variables]
        atoms += [Atom("IMP", (b, "c")) for b in j.variables]
        bound = list(i.variables) + list(j.variables)
    else:
        low, high = (g0, g1) if base == "OR" else (g1, g0)
        if low == 0:
            raise PreconditionError(f"the {base} route needs the smaller value nonzero")
        if high <= low:
            which = "G(1) > G(0)" if base == "OR" else "G(0) > G(1)"
            raise PreconditionError(f"the {base} route needs {which}")
        i = count_instance(int(low * scale), base, "a")
        j = count_instance(int((high - low) * scale) + 1, base, "b")
        k = ordinal_sum(i, j, base)
        atoms = list(k.atoms) + [Atom(base, (b, "c")) for b in j.variables]
        bound = list(k.variables)
    atoms += [Atom("HALF", ())] * m
    return PpsFormula(("c",), bound, atoms)


def constant_formula(value, fn: str = "IMP") -> PpsFormula:
    """A unary formula with the constant dyadic value, over {fn, HALF}."""
    value = core.as_value(value)
    if value <= 0:
        raise PreconditionError("the constant must be positive")
    m = _dyadic_exponent(value)
    i = count_instance(int(value * 2 ** m), fn, "a")
    return PpsFormula(("c",), i.variables, list(i.atoms) + [Atom("HALF", ())] * m)


def truncate(v, n: int) -> Fraction:
    """v rounded down to a multiple of 2^-n."""
    v = core.as_value(v)
    return Fraction((v * 2 ** n).__floor__(), 2 ** n)


@dataclass(frozen=True)
class ShiftResult:
    k: int
    h_prime: FnTable
    plan: GadgetPlan


def shift_monotone(h, g, base: str = "OR") -> ShiftResult:
    """Write H = G^k H' with H' monotone in the direction the base allows.

    ``base`` is OR (H' increasing, G decreasing) or NAND (the mirror image).
    The plan's repetition count is the truncation precision n of H'.
    """
    h0, h1 = _as_pair(h)
    g0, g1 = _as_pair(g)
    if base not in ("OR", "NAND"):
        raise PreconditionError("base must be OR or NAND")
    if base == "NAND":
        h0, h1, g0, g1 = h1, h0, g1, g0
    if g1 == 0:
        raise PreconditionError("G must be nonzero where it is smaller")
    if h0 == 0:
        raise PreconditionError("H must be nonzero where it is smaller")
    k = 0
    if h0 > h1:
        if g0 <= g1:
            raise PreconditionError("no k exists: G is not strictly monotone the right way")
        if h1 == 0:
            raise PreconditionError("no k exists: H vanishes where it must grow")
        ratio, target = g0 / g1, h0 / h1
        while ratio ** k <= target:
            k += 1
    hp = (h0 / g0 ** k, h1 / g1 ** k)
    if base == "NAND":
        hp, gk = (hp[1], hp[0]), (g1 ** k, g0 ** k)
    else:
        gk = (g0 ** k, g1 ** k)
    h_target = unary(*(_as_pair(h)))

    def precision(eps: Fraction) -> int:
        n = 0
        while True:
            t = (truncate(hp[0], n), truncate(hp[1], n))
            ok_order = (t[1] > t[0]) if base == "OR" else (t[0] > t[1])
            if hp[0] == hp[1]:
                ok_order = t[0] == t[1]
            if t[0] and t[1] and ok_order and max(abs(a - b) * c for a, b, c in zip(t, hp, gk)) < eps:
                return n
            n += 1

    def build(n: int) -> PpsFormula:
        t = (truncate(hp[0], n), truncate(hp[1], n))
        psi = constant_formula(t[0], base) if t[0] == t[1] else synth_unary(t, base)
        return PpsFormula(psi.free, psi.bound, [Atom("G", ("c",))] * k + list(psi.atoms))

    plan = GadgetPlan(f"shift<-{base}", h_target, {"G": unary(*(_as_pair(g)))}, build,
                      precision, False, f"H = G^{k} H', H' truncated to n bits")
    return ShiftResult(k, unary(*hp), plan)

