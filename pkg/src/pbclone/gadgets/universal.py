"""Every function from IMP, NAND, unary weights and constants, up to a limit.

For a target F with support S and least nonzero value mu, a bound variable
z_A for each A in S is tied to the free variables by IMP(z_A, x_i) for
i in A and NAND(z_A, x_i) otherwise, so z_A can be 1 only at the point A.
With u_A = (1, 2F(A)/mu - 1) the sum over the z's is 2F(A)/mu on S and 1
off S; without the weights it is 2 on S and 1 off S.  Multiplying by mu/2
and by k halved copies of the unweighted stage leaves F on S and
mu 2^-(k+1) elsewhere.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .. import core
from ..core import FnTable, bits, nullary, unary
from ..formula import Atom, PpsFormula
from .plan import GadgetPlan, exact_plan, least_two_power_at_least


@dataclass(frozen=True)
class OrStages:
    """The intermediate formulas; all share ``env``."""

    mu: Fraction
    support: tuple[int, ...]
    psi1: PpsFormula
    psi2: PpsFormula
    f3: PpsFormula
    env: dict[str, FnTable]


def _xs(n: int) -> tuple[str, ...]:
    return tuple(f"x{i + 1}" for i in range(n))


def _selector(a: int, n: int, z: str, weight: str | None) -> list[Atom]:
    atoms = [Atom(weight, (z,))] if weight else []
    for i, b in enumerate(bits(a, n)):
        atoms.append(Atom("IMP" if b else "NAND", (z, f"x{i + 1}")))
    return atoms


def _stage(f: FnTable, copy: int | None, weighted: bool) -> tuple[list[str], list[Atom]]:
    bound, atoms = [], []
    for a in f.support():
        z = f"z{a}" if copy is None else f"z{a}_{copy}"
        bound.append(z)
        atoms += _selector(a, f.arity, z, f"u{a}" if weighted else None)
    return bound, atoms


def or_universal_stages(f: FnTable) -> OrStages:
    support = tuple(f.support())
    if not support:
        raise ValueError("the zero function has no stages")
    mu = min(f.values[a] for a in support)
    env = {f"u{a}": unary(1, 2 * f.values[a] / mu - 1) for a in support}
    env["HALF"] = core.HALF
    env["MUHALF"] = nullary(mu / 2)
    xs = _xs(f.arity)
    b1, a1 = _stage(f, None, True)
    b2, a2 = _stage(f, None, False)
    return OrStages(mu, support, PpsFormula(xs, b1, a1), PpsFormula(xs, b2, a2),
                    PpsFormula(xs, b2, [Atom("HALF", ())] + a2), env)


def or_universal(f: FnTable) -> GadgetPlan:
    """Plan for F over {IMP, NAND, unary weights, nullary constants}.

    The error of the k-th formula is mu 2^-(k+1), attained off the support,
    and the schedule is k = ceil(log2(max(2 F_max / mu, 1) / eps)), which
    keeps it below eps.
    """
    xs = _xs(f.arity)
    if f.is_zero():
        return exact_plan("OR-universal", f, {"ZERO": nullary(0)},
                          PpsFormula(xs, (), [Atom("ZERO", ())]), "zero target")
    st = or_universal_stages(f)
    head = [Atom("MUHALF", ())]

    def build(k: int) -> PpsFormula:
        bound, atoms = list(st.psi1.bound), head + list(st.psi1.atoms)
        for c in range(k):
            b, a = _stage(f, c, False)
            bound += b
            atoms += [Atom("HALF", ())] + a
        return PpsFormula(xs, bound, atoms)

    stages = {"psi1": st.psi1, "psi2": st.psi2, "f3": st.f3}
    if len(st.support) == 1 << f.arity:
        plan = exact_plan("OR-universal", f, st.env, build(0), "full support")
        return GadgetPlan(plan.name, plan.target, plan.env, plan.builder, plan.rule,
                          True, plan.note, stages)
    ratio = max(2 * f.max() / st.mu, Fraction(1))
    return GadgetPlan("OR-universal", f, st.env, build,
                      lambda eps: least_two_power_at_least(ratio / eps), False,
                      f"error mu 2^-(k+1) off the support, mu = {st.mu}", stages)
