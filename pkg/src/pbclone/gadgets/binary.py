"""The five cases for binary functions and the formulas moving between a
binary F and its canonical function (NEQ, IMP or OR), given unary weights.

Entries are named by the matrix convention f_ab = F(a, b).  When
f01 < f10 the construction is carried out for the transpose and the atoms
are written with swapped arguments, so every emitted formula refers to F
itself under the environment name ``F``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Callable

from .. import core
from ..core import FnTable, from_matrix, unary
from ..errors import ArityError, PreconditionError
from ..formula import Atom, PpsFormula, tolerance_budget
from .plan import GadgetPlan, exact_plan, least_power_below, repeat


class Case(Enum):
    I = "i"
    II = "ii"
    III = "iii"
    IV = "iv"
    V = "v"


@dataclass(frozen=True)
class CloneCase:
    """Which case a binary table falls into, with the derived parameters.

    ``entries`` are (f00, f01, f10, f11) after the optional transposition.
    ``weights`` are the unary tables that rebuild F from ``canonical``.
    """

    case: Case
    subcase: str | None
    transposed: bool
    entries: tuple[Fraction, Fraction, Fraction, Fraction]
    alpha: Fraction | None
    canonical: str | None
    weights: dict[str, FnTable]

    def reproduce(self) -> FnTable:
        """F rebuilt exactly from the canonical function (or its alpha
        variant) and the weights."""
        f00, f01, f10, f11 = self.entries
        w = self.weights
        a = self.alpha
        if self.case is Case.I:
            core_table = _outer(w["U1"], w["U2"])
        elif self.case is Case.II:
            core_table = _outer(w["U"], unary(1, 1)) * core.EQ
        elif self.case is Case.III:
            core_table = _outer(w["U"], unary(1, 1)) * core.NEQ
        elif self.case is Case.IV:
            core_table = _outer(w["U3"], w["U4"]) * from_matrix(1, 1, a, 1)
        elif self.subcase == "a":
            core_table = _outer(w["V1"], w["V2"]) * from_matrix(a, 1, 1, 1)
        else:
            core_table = _outer(w["W1"], w["W2"]) * core.NAND
        return core_table.transpose() if self.transposed else core_table


def _outer(u1: FnTable, u2: FnTable) -> FnTable:
    return from_matrix(u1[0] * u2[0], u1[0] * u2[1], u1[1] * u2[0], u1[1] * u2[1])


def classify_binary(f: FnTable) -> CloneCase:
    if f.arity != 2:
        raise ArityError("classify_binary needs a binary table")
    (f00, f01), (f10, f11) = f.matrix()
    transposed = f01 < f10
    if transposed:
        f01, f10 = f10, f01
    e = (f00, f01, f10, f11)

    def make(case, subcase=None, alpha=None, canonical=None, **weights):
        return CloneCase(case, subcase, transposed, e, alpha, canonical, weights)

    if f00 * f11 == f01 * f10:
        if f00 or f01:
            r = f10 / f00 if f00 else f11 / f01
            return make(Case.I, U1=unary(1, r), U2=unary(f00, f01))
        return make(Case.I, U1=unary(0, 1), U2=unary(f10, f11))
    if f01 == 0 and f10 == 0:
        return make(Case.II, U=unary(f00, f11))
    if f00 == 0 and f11 == 0:
        return make(Case.III, canonical="NEQ", U=unary(f01, f10))
    if f00 and f01 and f11 and f00 * f11 > f01 * f10:
        alpha = f01 * f10 / (f00 * f11)
        return make(Case.IV, alpha=alpha, canonical="IMP",
                    U3=unary(f00, f00 * f11 / f01), U4=unary(1, f01 / f00))
    if f01 and f10 and f11:
        alpha = f00 * f11 / (f01 * f10)
        return make(Case.V, "a", alpha=alpha, canonical="OR",
                    V1=unary(f01 / f11, 1), V2=unary(f10, f11))
    # f00, f01, f10 > 0 and f11 = 0
    return make(Case.V, "b", canonical="OR", W1=unary(f00, f10), W2=unary(1, f01 / f00))


# --- formula plumbing -------------------------------------------------------

class _Fresh:
    def __init__(self, prefix: str = "w"):
        self.prefix = prefix
        self.count = itertools.count()

    def __call__(self) -> str:
        return f"{self.prefix}{next(self.count)}"


Rule = Callable[[tuple[str, ...], _Fresh], tuple[list[str], list[Atom]]]


def _expand(psi: PpsFormula, rules: dict[str, Rule], prefix: str = "w") -> PpsFormula:
    """Replace atoms named in ``rules`` by the (bound variables, atoms) the
    rule returns for their scope; rules may introduce atoms handled by later
    passes only through a second call."""
    fresh = _Fresh(prefix)
    bound = list(psi.bound)
    atoms: list[Atom] = []
    for a in psi.atoms:
        rule = rules.get(a.fn)
        if rule is None:
            atoms.append(a)
            continue
        extra, new = rule(a.scope, fresh)
        bound.extend(extra)
        atoms.extend(new)
    return PpsFormula(psi.free, bound, atoms)


def _imp_via_or(scope, fresh):
    """IMP(a, b) = sum_w NEQ(a, w) OR(w, b)."""
    a, b = scope
    w = fresh()
    return [w], [Atom("NEQ", (a, w)), Atom("OR", (w, b))]


def _nand_via_or(scope, fresh):
    """NAND(a, b) = sum_{w,v} NEQ(a, w) OR(w, v) NEQ(v, b)."""
    a, b = scope
    w, v = fresh(), fresh()
    return [w, v], [Atom("NEQ", (a, w)), Atom("OR", (w, v)), Atom("NEQ", (v, b))]


def _neq_power(weight: str, base: str, k: int) -> Rule:
    """NEQ(a, b) approximated by (weight(a) weight(b) base(a, b))^k."""
    def rule(scope, fresh):
        a, b = scope
        return [], repeat([Atom(weight, (a,)), Atom(weight, (b,)), Atom(base, (a, b))], k)
    return rule


def _neq_schedule(skeleton: PpsFormula, env) -> Callable[[Fraction], int]:
    """k with 4^-k below the tolerance of the NEQ atoms of the skeleton."""
    idx = [i for i, a in enumerate(skeleton.atoms) if a.fn == "NEQ"]

    def rule(eps):
        return least_power_below(Fraction(1, 4), tolerance_budget(skeleton, env, idx, eps))
    return rule


def _free(transposed: bool) -> tuple[str, str]:
    return ("x2", "x1") if transposed else ("x1", "x2")


# --- NEQ from OR or NAND ----------------------------------------------------

UP = unary(2, Fraction(1, 2))      # turns OR into [[0,1],[1,1/4]]
DOWN = unary(Fraction(1, 2), 2)    # turns NAND into [[1/4,1],[1,0]]


def neq_from_or(k: int) -> tuple[PpsFormula, dict[str, FnTable]]:
    """(U(x1) U(x2) OR(x1,x2))^k with U = (2, 1/2); its matrix is [[0,1],[1,4^-k]]."""
    psi = PpsFormula(("x1", "x2"), (), repeat(
        [Atom("UP", ("x1",)), Atom("UP", ("x2",)), Atom("OR", ("x1", "x2"))], k))
    return psi, {"UP": UP}


def neq_plan_from_or() -> GadgetPlan:
    return GadgetPlan("NEQ<-OR", core.NEQ, {"UP": UP}, lambda k: neq_from_or(k)[0],
                      lambda eps: least_power_below(Fraction(1, 4), eps), False,
                      "error 4^-k at (1,1)")


# --- witnesses --------------------------------------------------------------

@dataclass(frozen=True)
class BinaryWitness:
    case: CloneCase
    forward: GadgetPlan     # canonical function from F
    backward: GadgetPlan    # F from the canonical function


def binary_witness(f: FnTable) -> BinaryWitness:
    cc = classify_binary(f)
    if cc.case in (Case.I, Case.II):
        raise PreconditionError(f"case ({cc.case.value}) has no canonical binary function")
    f00, f01, f10, f11 = cc.entries
    t = cc.transposed

    def g(u, v):
        return Atom("F", (v, u) if t else (u, v))

    x1, x2 = "x1", "x2"
    if cc.case is Case.III:
        env = {"F": f, "U": unary(1 / f01, 1 / f10)}
        fwd = exact_plan("NEQ<-F", core.NEQ, env,
                         PpsFormula((x1, x2), (), [Atom("U", (x1,)), g(x1, x2)]))
        back = exact_plan("F<-NEQ", f, {"U": cc.weights["U"]},
                          PpsFormula(_free(t), (), [Atom("U", (x1,)), Atom("NEQ", (x1, x2))]))
        return BinaryWitness(cc, fwd, back)
    if cc.case is Case.IV:
        return BinaryWitness(cc, _forward_power(cc, f, "IMP", g), _imp_backward(cc, f))
    if cc.subcase == "a":
        return BinaryWitness(cc, _forward_power(cc, f, "OR", g), _or_backward_a(cc, f))
    return BinaryWitness(cc, _nand_forward(cc, f, g), _or_backward_b(cc, f))


def _forward_power(cc: CloneCase, f: FnTable, target: str, g) -> GadgetPlan:
    """(U1(x1) U2(x2) F(x1,x2))^k tends to IMP (case iv) or OR (case v a)."""
    f00, f01, f10, f11 = cc.entries
    if target == "IMP":
        u1, u2 = unary(1 / f00, f01 / (f00 * f11)), unary(1, f00 / f01)
    else:
        u1, u2 = unary(f11 / f01, 1), unary(1 / f10, 1 / f11)
    env = {"F": f, "U1": u1, "U2": u2}
    group = [Atom("U1", ("x1",)), Atom("U2", ("x2",)), g("x1", "x2")]
    alpha = cc.alpha
    name = f"{target}<-F"
    if alpha == 0:
        return exact_plan(name, core.BUILTINS[target], env, PpsFormula(("x1", "x2"), (), group))
    return GadgetPlan(name, core.BUILTINS[target], env,
                      lambda k: PpsFormula(("x1", "x2"), (), repeat(group, k)),
                      lambda eps: least_power_below(alpha, eps), False,
                      f"error alpha^k with alpha = {alpha}")


def _imp_alpha_atoms(a: str, b: str, alpha: Fraction, y: str) -> tuple[list[str], list[Atom]]:
    """IMP_alpha(a, b) = sum_y IMP(a, y) P(y) Q(b) IMP(b, y)."""
    if alpha == 0:
        return [], [Atom("IMP", (a, b))]
    return [y], [Atom("IMP", (a, y)), Atom("P", (y,)), Atom("Q", (b,)), Atom("IMP", (b, y))]


def _alpha_env(alpha: Fraction) -> dict[str, FnTable]:
    if alpha == 0:
        return {}
    return {"P": unary(1 / alpha - 1, 1), "Q": unary(alpha, 1)}


def _imp_backward(cc: CloneCase, f: FnTable) -> GadgetPlan:
    bound, atoms = _imp_alpha_atoms("x1", "x2", cc.alpha, "y")
    env = {"U3": cc.weights["U3"], "U4": cc.weights["U4"], **_alpha_env(cc.alpha)}
    psi = PpsFormula(_free(cc.transposed), bound,
                     [Atom("U3", ("x1",)), Atom("U4", ("x2",))] + atoms)
    return exact_plan("F<-IMP", f, env, psi)


def _or_backward_a(cc: CloneCase, f: FnTable) -> GadgetPlan:
    env = {"V1": cc.weights["V1"], "V2": cc.weights["V2"]}
    head = [Atom("V1", ("x1",)), Atom("V2", ("x2",))]
    free = _free(cc.transposed)
    if cc.alpha == 0:
        return exact_plan("F<-OR", f, env, PpsFormula(free, (), head + [Atom("OR", ("x1", "x2"))]))
    env.update(_alpha_env(cc.alpha))
    # OR_alpha(x1, x2) = sum_y NEQ(x1, y) IMP_alpha(y, x2)
    bound, inner = _imp_alpha_atoms("y1", "x2", cc.alpha, "y2")
    skeleton = _expand(PpsFormula(free, ["y1"] + bound,
                                  head + [Atom("NEQ", ("x1", "y1"))] + inner),
                       {"IMP": _imp_via_or})
    return _neq_plan("F<-OR", f, env, skeleton, "UP", "OR", UP)


def _or_backward_b(cc: CloneCase, f: FnTable) -> GadgetPlan:
    env = {"W1": cc.weights["W1"], "W2": cc.weights["W2"]}
    skeleton = _expand(PpsFormula(_free(cc.transposed), (),
                                  [Atom("W1", ("x1",)), Atom("W2", ("x2",)),
                                   Atom("NAND", ("x1", "x2"))]),
                       {"NAND": _nand_via_or})
    return _neq_plan("F<-OR", f, env, skeleton, "UP", "OR", UP)


def _nand_forward(cc: CloneCase, f: FnTable, g) -> GadgetPlan:
    f00, f01, f10, f11 = cc.entries
    env = {"F": f, "W1": unary(1 / f00, 1 / f10), "W2": unary(1, f00 / f01)}
    # OR(x1, x2) = sum NEQ(x1, y1) NAND(y1, y2) NEQ(y2, x2)
    skeleton = PpsFormula(("x1", "x2"), ("y1", "y2"),
                          [Atom("NEQ", ("x1", "y1")), Atom("NAND", ("y1", "y2")),
                           Atom("NEQ", ("y2", "x2"))])

    def nand(scope, fresh):
        a, b = scope
        return [], [Atom("W1", (a,)), Atom("W2", (b,)), g(a, b)]

    plan = _neq_plan("OR<-F", core.OR, env, skeleton, "DOWN", "NAND", DOWN)
    builder = plan.builder
    return GadgetPlan(plan.name, plan.target, plan.env,
                      lambda k: _expand(builder(k), {"NAND": nand}, "n"),
                      plan.rule, False, plan.note)


def _neq_plan(name: str, target: FnTable, env: dict, skeleton: PpsFormula,
              weight: str, base: str, weight_table: FnTable) -> GadgetPlan:
    """Plan replacing every NEQ atom of the skeleton by a k-fold power."""
    env = dict(env)
    env[weight] = weight_table
    rule = _neq_schedule(skeleton, env)
    return GadgetPlan(name, target, env,
                      lambda k: _expand(skeleton, {"NEQ": _neq_power(weight, base, k)}),
                      rule, False, "NEQ atoms replaced by powers with error 4^-k")
