"""Containers for constructions that approximate a target within a tolerance."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Mapping

from .. import core
from ..core import FnTable
from ..errors import CapacityError
from ..formula import Atom, PpsFormula, evaluate, pruned_evaluate


@dataclass(frozen=True)
class Gadget:
    """A concrete formula together with the environment it refers to."""

    formula: PpsFormula
    env: dict[str, FnTable]
    k: int

    def evaluate(self) -> FnTable:
        """Exact value; wide relational formulas fall back to enumeration."""
        try:
            return evaluate(self.formula, self.env)
        except CapacityError:
            return pruned_evaluate(self.formula, self.env)


@dataclass(frozen=True)
class GadgetPlan:
    """A family of formulas indexed by a repetition count k and a rule
    choosing k from the requested accuracy.

    ``builder(k)`` returns the formula for a given k; ``rule(eps)`` returns
    the k to use.  For exact plans the rule is constant and the formula does
    not depend on k.
    """

    name: str
    target: FnTable
    env: dict[str, FnTable]
    builder: Callable[[int], PpsFormula]
    rule: Callable[[Fraction], int]
    exact: bool
    note: str = ""
    stages: dict[str, PpsFormula] = field(default_factory=dict)

    def schedule(self, eps) -> int:
        eps = _positive(eps)
        return self.rule(eps)

    def formula(self, k: int) -> PpsFormula:
        return self.builder(k)

    @property
    def template(self) -> PpsFormula:
        """The formula at k = 1, showing the shape of the repeated groups."""
        return self.builder(1)

    def instantiate(self, eps) -> Gadget:
        k = self.schedule(eps)
        return Gadget(self.builder(k), dict(self.env), k)

    def evaluate(self, eps) -> FnTable:
        return self.instantiate(eps).evaluate()

    def error(self, eps) -> Fraction:
        """Exact sup-norm distance between the instantiated plan and the target."""
        return self.evaluate(eps).sup_distance(self.target)


def _positive(eps) -> Fraction:
    eps = core.as_value(eps)
    if eps <= 0:
        raise ValueError("eps must be positive")
    return eps


def least_power_below(alpha, eps) -> int:
    """Least k >= 1 with alpha^k < eps, by exact comparison (0 <= alpha < 1)."""
    alpha, eps = core.as_value(alpha), _positive(eps)
    if not 0 <= alpha < 1:
        raise ValueError("alpha must lie in [0, 1)")
    if alpha == 0:
        return 1
    # a float estimate first, then walk to the exact answer
    try:
        k = max(1, math.floor(math.log(eps) / math.log(alpha)))
    except (ValueError, ZeroDivisionError, OverflowError):
        k = 1
    while k > 1 and alpha ** (k - 1) < eps:
        k -= 1
    while alpha ** k >= eps:
        k += 1
    return k


def least_two_power_at_least(x) -> int:
    """Least k >= 0 with 2^k >= x."""
    x = core.as_value(x)
    if x <= 1:
        return 0
    k = max(0, (x.numerator // x.denominator).bit_length() - 1)
    while Fraction(2) ** k < x:
        k += 1
    return k


def repeat(atoms, k: int) -> list[Atom]:
    """k copies of a group of atoms."""
    return [a for _ in range(k) for a in atoms]


def constant_rule(k: int) -> Callable[[Fraction], int]:
    return lambda eps: k


def exact_plan(name: str, target: FnTable, env: Mapping[str, FnTable], psi: PpsFormula,
               note: str = "") -> GadgetPlan:
    return GadgetPlan(name, target, dict(env), lambda k: psi, constant_rule(0), True, note)


@dataclass(frozen=True)
class Radical:
    """The positive real radicand^(1/root) for a rational radicand."""

    radicand: Fraction
    root: int

    def __post_init__(self):
        if self.radicand <= 0 or self.root < 1:
            raise ValueError("radical needs a positive radicand and a root >= 1")

    def exact(self) -> Fraction | None:
        """The rational value when the radicand is a perfect power, else None."""
        p = _exact_root(self.radicand.numerator, self.root)
        q = _exact_root(self.radicand.denominator, self.root)
        if p is None or q is None:
            return None
        return Fraction(p, q)

    def __float__(self) -> float:
        return float(self.radicand) ** (1.0 / self.root)

    def __str__(self) -> str:
        if self.root == 1:
            return str(self.radicand)
        return f"({self.radicand})^(1/{self.root})"


def _exact_root(n: int, r: int) -> int | None:
    """The integer r-th root of n if n is a perfect r-th power."""
    lo, hi = 0, 1 << (n.bit_length() // r + 1)
    while lo < hi:
        mid = (lo + hi) // 2
        if mid ** r < n:
            lo = mid + 1
        else:
            hi = mid
    return lo if lo ** r == n else None
