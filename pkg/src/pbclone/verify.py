"""Seeded invariant checks, each returning a pass/fail result with the first
counterexample found."""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

from . import analysis, core, randgen, transforms
from .core import FnTable
from .formula import (Atom, PpsFormula, brute_force_evaluate, evaluate, flatten,
                      tolerance_budget)
from .gadgets import binary, lsm, parity


@dataclass
class VerifyResult:
    name: str
    passed: bool
    checked: int
    seed: int | None = None
    counterexample: dict | None = None
    detail: dict = field(default_factory=dict)

    def as_dict(self) -> dict:
        return {"name": self.name, "passed": self.passed, "checked": self.checked,
                "seed": self.seed, "counterexample": self.counterexample,
                "detail": self.detail}


def _values(f: FnTable) -> list[str]:
    return [str(v) for v in f.values]


def topkis(n: int = 4, trials: int = 100_000, seed: int = 0) -> VerifyResult:
    """is_lsm agrees with the 2-pinning criterion on permissive tables over
    {1, 2, 3}: every table for n <= 3, plus ``trials`` samples when n = 4."""
    rng = random.Random(seed)
    grid = (Fraction(1), Fraction(2), Fraction(3))
    count = 0

    def tables():
        for m in range(1, min(n, 3) + 1):
            for vals in itertools.product(grid, repeat=1 << m):
                yield FnTable(m, vals)
        if n >= 4:
            for _ in range(trials):
                yield randgen.table(rng, n, grid)

    for f in tables():
        count += 1
        if bool(analysis.is_lsm(f)) != analysis.is_lsm_topkis(f):
            return VerifyResult("topkis", False, count, seed, {"table": _values(f)})
    return VerifyResult("topkis", True, count, seed)


def lsm4_counterexample() -> VerifyResult:
    f = transforms.graded_arity4()
    value = transforms.fourier(core.star(f))[(1, 1, 1, 1)]
    c = transforms.in_class_C(f)
    ok = bool(analysis.is_lsm(f)) and value == Fraction(-1, 8) and not c.holds
    return VerifyResult("lsm4-counterexample", ok, 1, None,
                        None if ok else {"table": _values(f)},
                        {"value": str(value), "lsm": bool(analysis.is_lsm(f)), "inC": c.holds})


def convolution(n: int = 5, trials: int = 100, seed: int = 0) -> VerifyResult:
    rng = random.Random(seed)
    for t in range(trials):
        f, g = randgen.table(rng, n), randgen.table(rng, n)
        if not transforms.convolution_check(f, g):
            return VerifyResult("convolution", False, t + 1, seed,
                                {"F": _values(f), "G": _values(g)})
    return VerifyResult("convolution", True, trials, seed)


def p_closure(n: int = 4, trials: int = 100, seed: int = 0) -> VerifyResult:
    """Sums, products and summations of members of P stay in P."""
    rng = random.Random(seed)
    for t in range(trials):
        f, g = randgen.p_member(rng, n), randgen.p_member(rng, n)
        for label, h in (("F+G", f + g), ("F*G", f * g), ("sum_out", core.sum_out(f, rng.randrange(n)))):
            if not transforms.in_class_P(h):
                return VerifyResult("p-closure", False, t + 1, seed,
                                    {"op": label, "F": _values(f), "G": _values(g)})
    return VerifyResult("p-closure", True, trials, seed)


def c_closure(n: int = 4, trials: int = 30, seed: int = 0) -> VerifyResult:
    """Products and summations of members of C stay in C."""
    rng = random.Random(seed)
    for t in range(trials):
        f, g = randgen.lsm2_product(rng, n), randgen.lsm2_product(rng, n)
        if not (transforms.in_class_C(f) and transforms.in_class_C(g)):
            continue
        for label, h in (("F*G", f * g), ("sum_out", core.sum_out(f, rng.randrange(n)))):
            if not transforms.in_class_C(h):
                return VerifyResult("c-closure", False, t + 1, seed,
                                    {"op": label, "F": _values(f), "G": _values(g)})
    return VerifyResult("c-closure", True, trials, seed)


def lsm3(trials: int = 500, seed: int = 0) -> VerifyResult:
    rng = random.Random(seed)
    branches = {True: 0, False: 0}
    for t in range(trials):
        f = randgen.lsm_permissive(rng, 3)
        d = lsm.lsm3_decompose(f)
        branches[d.complemented] += 1
        if d.reconstruct() != f:
            return VerifyResult("lsm3", False, t + 1, seed, {"table": _values(f)})
    return VerifyResult("lsm3", True, trials, seed, None,
                        {"direct": branches[False], "complemented": branches[True]})


def ising(trials: int = 100, y=3, seed: int = 0) -> VerifyResult:
    from .formula import partition_function
    rng = random.Random(seed)
    y = core.as_value(y)
    for t in range(trials):
        m = randgen.gf2_matrix(rng)
        red = parity.ising_reduction(m, y)
        lhs = parity.ising_partition_brute_force(m, y)
        rhs = red.scale * partition_function(red.instance, red.env)
        if lhs != rhs:
            return VerifyResult("ising", False, t + 1, seed,
                                {"matrix": m, "brute": str(lhs), "reduced": str(rhs)})
    return VerifyResult("ising", True, trials, seed)


def evaluator(trials: int = 200, seed: int = 0) -> VerifyResult:
    rng = random.Random(seed)
    for t in range(trials):
        env = randgen.environment(rng)
        psi = randgen.formula(rng, {k: f.arity for k, f in env.items()})
        if evaluate(psi, env) != brute_force_evaluate(psi, env):
            return VerifyResult("evaluator", False, t + 1, seed, {"formula": str(psi)})
    return VerifyResult("evaluator", True, trials, seed)


def nested_case(rng: random.Random):
    """(psi over G, phi_G, env) for the flatten identity."""
    env = randgen.environment(rng, 3)
    arities = {k: f.arity for k, f in env.items()}
    g_arity = rng.randint(0, 3)
    inner_free = [f"a{i}" for i in range(g_arity)]
    inner_bound = [f"b{i}" for i in range(rng.randint(0, 3))]
    inner_vars = inner_free + inner_bound
    inner_atoms = []
    for _ in range(rng.randint(0, 4)):
        fn = rng.choice(sorted(arities))
        if arities[fn] and not inner_vars:
            continue
        inner_atoms.append(Atom(fn, [rng.choice(inner_vars) for _ in range(arities[fn])]))
    phi = PpsFormula(inner_free, inner_bound, inner_atoms)
    outer = randgen.formula(rng, {**arities, "G": g_arity}, max_vars=6, max_atoms=5)
    if g_arity and outer.variables():
        scope = [rng.choice(outer.variables()) for _ in range(g_arity)]
        outer = PpsFormula(outer.free, outer.bound, outer.atoms + (Atom("G", scope),))
    elif not g_arity:
        outer = PpsFormula(outer.free, outer.bound, outer.atoms + (Atom("G", ()),))
    return outer, phi, env


def flatten_identity(trials: int = 100, seed: int = 0) -> VerifyResult:
    rng = random.Random(seed)
    for t in range(trials):
        psi, phi, env = nested_case(rng)
        g = evaluate(phi, env)
        lhs = evaluate(psi, {**env, "G": g})
        rhs = evaluate(flatten(psi, "G", phi), env)
        if lhs != rhs:
            return VerifyResult("flatten", False, t + 1, seed,
                                {"psi": str(psi), "phi": str(phi)})
    return VerifyResult("flatten", True, trials, seed)


def perturb(f: FnTable, delta: Fraction, signs) -> FnTable:
    """f moved by +-delta entrywise (clamped at 0), strictly inside the ball."""
    step = delta * Fraction(999, 1000)
    return FnTable(f.arity, (max(Fraction(0), v + s * step) for v, s in zip(f.values, signs)))


def tolerance(trials: int = 50, seed: int = 0, eps=Fraction(1, 64)) -> VerifyResult:
    """Perturbing the chosen atoms within the budget moves F_psi by at most eps/2.

    Each trial tries the all-up and all-down corners and a random sign pattern.
    """
    rng = random.Random(seed)
    eps = core.as_value(eps)
    checked = 0
    for t in range(trials):
        env = randgen.environment(rng, 3)
        psi = randgen.formula(rng, {k: f.arity for k, f in env.items()}, max_vars=6, max_atoms=5)
        if not psi.atoms:
            continue
        replaced = sorted(rng.sample(range(len(psi.atoms)), rng.randint(1, min(3, len(psi.atoms)))))
        delta = tolerance_budget(psi, env, replaced, eps)
        base = evaluate(psi, env)
        patterns = [lambda n: [1] * n, lambda n: [-1] * n,
                    lambda n: [rng.choice((-1, 1)) for _ in range(n)]]
        for pat in patterns:
            new_env = dict(env)
            atoms = list(psi.atoms)
            for i in replaced:
                a = atoms[i]
                f = env.get(a.fn) or core.BUILTINS[a.fn]
                name = f"P{i}"
                new_env[name] = perturb(f, delta, pat(len(f.values)))
                atoms[i] = Atom(name, a.scope)
            moved = evaluate(PpsFormula(psi.free, psi.bound, atoms), new_env)
            checked += 1
            if moved.sup_distance(base) > eps / 2:
                return VerifyResult("tolerance", False, checked, seed,
                                    {"formula": str(psi), "replaced": replaced,
                                     "delta": str(delta)})
    return VerifyResult("tolerance", True, checked, seed)


def binary_cases(trials: int = 10_000, seed: int = 0) -> VerifyResult:
    """classify_binary against a direct reading of the five conditions."""
    rng = random.Random(seed)
    for t in range(trials):
        f = randgen.binary_table(rng)
        (f00, f01), (f10, f11) = f.matrix()
        if f01 < f10:
            f01, f10 = f10, f01
        if f00 * f11 == f01 * f10:
            want = "i"
        elif f01 == f10 == 0 and f00 > 0 and f11 > 0:
            want = "ii"
        elif f00 == f11 == 0 and f01 > 0 and f10 > 0:
            want = "iii"
        elif f00 > 0 and f01 > 0 and f11 > 0 and f00 * f11 > f01 * f10:
            want = "iv"
        else:
            want = "v"
        cc = binary.classify_binary(f)
        if cc.case.value != want or cc.reproduce() != f:
            return VerifyResult("binary", False, t + 1, seed,
                                {"table": _values(f), "expected": want, "got": cc.case.value})
    return VerifyResult("binary", True, trials, seed)


LEMMAS: dict[str, Callable[..., VerifyResult]] = {
    "topkis": topkis,
    "lsm4-counterexample": lsm4_counterexample,
    "convolution": convolution,
    "p-closure": p_closure,
    "c-closure": c_closure,
    "lsm3": lsm3,
    "ising": ising,
    "evaluator": evaluator,
    "flatten": flatten_identity,
    "tolerance": tolerance,
    "binary": binary_cases,
}
