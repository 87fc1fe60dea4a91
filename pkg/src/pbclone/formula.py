"""pps-formulas, CSP instances and their exact evaluation.

A formula is a sum over bound variables of a product of atoms.  Atoms name a
function in an environment (a mapping from names to FnTables, with the
built-in constants always available) and list the variables fed to it.
Variables are strings; the character ``@`` is reserved for names generated
by :func:`flatten` and the instance constructions.
"""

from __future__ import annotations

import heapq
import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

import numpy as np

from . import core
from .core import FnTable
from .errors import ArityError, CapacityError, FormulaError

RESERVED = "@"
DEFAULT_INTERMEDIATE_CAP = 22


@dataclass(frozen=True)
class Atom:
    fn: str
    scope: tuple[str, ...]

    def __init__(self, fn: str, scope: Iterable[str]):
        object.__setattr__(self, "fn", fn)
        object.__setattr__(self, "scope", tuple(scope))

    def __str__(self) -> str:
        return f"{self.fn}({','.join(self.scope)})"


@dataclass(frozen=True)
class PpsFormula:
    free: tuple[str, ...]
    bound: tuple[str, ...]
    atoms: tuple[Atom, ...]

    def __init__(self, free: Iterable[str], bound: Iterable[str], atoms: Iterable[Atom]):
        object.__setattr__(self, "free", tuple(free))
        object.__setattr__(self, "bound", tuple(bound))
        object.__setattr__(self, "atoms", tuple(atoms))

    @property
    def arity(self) -> int:
        return len(self.free)

    def variables(self) -> tuple[str, ...]:
        return self.free + self.bound

    def validate(self, env: Mapping[str, FnTable] | None = None) -> None:
        _check_vars(self.free, self.bound)
        declared = set(self.free) | set(self.bound)
        for a in self.atoms:
            for v in a.scope:
                if v not in declared:
                    raise FormulaError(f"atom {a} uses undeclared variable {v!r}")
            if env is not None or a.fn in core.BUILTINS:
                f = resolve(env, a.fn)
                if f.arity != len(a.scope):
                    raise ArityError(f"atom {a}: {a.fn} has arity {f.arity}")

    def __str__(self) -> str:
        body = " * ".join(str(a) for a in self.atoms) or "1"
        head = f"({', '.join(self.free)})"
        if self.bound:
            return f"{head} := sum {' '.join(self.bound)} . {body}"
        return f"{head} := {body}"


@dataclass(frozen=True)
class CspInstance:
    """A formula without bound variables; Z sums over all its variables."""

    variables: tuple[str, ...]
    atoms: tuple[Atom, ...]

    def __init__(self, variables: Iterable[str], atoms: Iterable[Atom]):
        object.__setattr__(self, "variables", tuple(variables))
        object.__setattr__(self, "atoms", tuple(atoms))

    @property
    def formula(self) -> PpsFormula:
        return PpsFormula(self.variables, (), self.atoms)

    def validate(self, env: Mapping[str, FnTable] | None = None) -> None:
        self.formula.validate(env)


@dataclass(frozen=True)
class EliminationPlan:
    order: tuple[str, ...]
    arities: tuple[int, ...]
    cap: int

    @property
    def width(self) -> int:
        return max(self.arities, default=0)


def resolve(env: Mapping[str, FnTable] | None, name: str) -> FnTable:
    if env is not None and name in env:
        return env[name]
    if name in core.BUILTINS:
        return core.BUILTINS[name]
    raise FormulaError(f"undefined function {name!r}")


def _check_vars(free: Sequence[str], bound: Sequence[str]) -> None:
    if len(set(free)) != len(free):
        raise FormulaError("duplicate free variable")
    if len(set(bound)) != len(bound):
        raise FormulaError("duplicate bound variable")
    clash = set(free) & set(bound)
    if clash:
        raise FormulaError(f"variables both free and bound: {sorted(clash)}")


# --- brute force -----------------------------------------------------------

def brute_force_evaluate(psi: PpsFormula, env: Mapping[str, FnTable] | None = None) -> FnTable:
    """Direct enumeration of the defining sum; the reference oracle."""
    psi.validate(env)
    n, m = len(psi.free), len(psi.bound)
    pos = {v: i for i, v in enumerate(psi.free + psi.bound)}
    compiled = [(resolve(env, a.fn).values, [pos[v] for v in a.scope]) for a in psi.atoms]
    out = []
    for x in range(1 << n):
        total = Fraction(0)
        for y in range(1 << m):
            point = x | (y << n)
            term = Fraction(1)
            for values, scope in compiled:
                idx = 0
                for k, p in enumerate(scope):
                    idx |= ((point >> p) & 1) << k
                term *= values[idx]
                if not term:
                    break
            total += term
        out.append(total)
    return FnTable(n, out)


def brute_force_partition(inst: CspInstance, env: Mapping[str, FnTable] | None = None) -> Fraction:
    psi = PpsFormula((), inst.variables, inst.atoms)
    return brute_force_evaluate(psi, env).values[0]


def pruned_evaluate(psi: PpsFormula, env: Mapping[str, FnTable] | None = None) -> FnTable:
    """Enumeration that abandons a partial assignment as soon as a fully
    assigned atom is zero.

    The cost is proportional to the number of nonzero partial assignments,
    which suits wide formulas over relations with few satisfying points
    (ordinal sums, for instance) where elimination widths explode.
    """
    psi.validate(env)
    order = list(psi.free) + list(psi.bound)
    pos = {v: i for i, v in enumerate(order)}
    n, total_vars = len(psi.free), len(order)
    # atoms grouped by the depth at which their last variable is assigned
    at_depth: list[list[tuple[tuple, list[int]]]] = [[] for _ in range(total_vars + 1)]
    for a in psi.atoms:
        scope = [pos[v] for v in a.scope]
        at_depth[max(scope, default=-1) + 1].append((resolve(env, a.fn).values, scope))
    base = Fraction(1)
    for values, _ in at_depth[0]:
        base *= values[0]

    def weight(depth: int, x: list[int]) -> Fraction:
        w = Fraction(1)
        for values, scope in at_depth[depth]:
            idx = 0
            for k, p in enumerate(scope):
                idx |= x[p] << k
            w *= values[idx]
            if not w:
                break
        return w

    out = []
    for fx in range(1 << n):
        out.append(_dfs(fx, n, total_vars, base, weight) if base else Fraction(0))
    return FnTable(n, out)


def _dfs(fx: int, n: int, total_vars: int, base: Fraction, weight) -> Fraction:
    x = [0] * total_vars
    acc = [base] + [Fraction(0)] * total_vars   # acc[d]: weight of x[:d]
    tried = [0] * (total_vars + 1)
    total = Fraction(0)
    d = 0
    while d >= 0:
        if d == total_vars:
            total += acc[d]
            d -= 1
            continue
        choices = ((fx >> d) & 1,) if d < n else (0, 1)
        if tried[d] == len(choices):
            tried[d] = 0
            d -= 1
            continue
        x[d] = choices[tried[d]]
        tried[d] += 1
        w = acc[d] * weight(d + 1, x)
        if w:
            acc[d + 1] = w
            d += 1
    return total


# --- variable elimination --------------------------------------------------

class _UnionFind:
    def __init__(self, items: Iterable[str]):
        self.parent = {v: v for v in items}

    def find(self, v: str) -> str:
        root = v
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[v] != root:
            self.parent[v], v = root, self.parent[v]
        return root

    def union(self, a: str, b: str, prefer: Mapping[str, int]) -> None:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return
        if prefer[rb] < prefer[ra]:
            ra, rb = rb, ra
        self.parent[rb] = ra


def _is_eq_table(f: FnTable) -> bool:
    return f.arity == 2 and f.values == core.EQ.values


@dataclass
class _Prepared:
    rep: dict[str, str]               # variable -> class representative
    factors: list[tuple[tuple[str, ...], np.ndarray]]
    free_reps: tuple[str, ...]        # distinct representatives of free vars, in order
    summed: list[str]                 # bound representatives that appear in factors
    empty_sums: int                   # bound classes not touched by any factor
    rank: dict[str, int]


def _prepare(psi: PpsFormula, env) -> _Prepared:
    psi.validate(env)
    allv = psi.free + psi.bound
    # free variables win as representatives, then declaration order
    rank = {v: i for i, v in enumerate(allv)}
    uf = _UnionFind(allv)
    rest = []
    for a in psi.atoms:
        f = resolve(env, a.fn)
        if _is_eq_table(f):
            uf.union(a.scope[0], a.scope[1], rank)
        else:
            rest.append((f, a.scope))
    rep = {v: uf.find(v) for v in allv}
    factors = [_atom_factor(f, tuple(rep[v] for v in scope)) for f, scope in rest]
    free_reps = tuple(dict.fromkeys(rep[v] for v in psi.free))
    free_set = set(free_reps)
    used = set()
    for vs, _ in factors:
        used.update(vs)
    bound_reps = [r for r in dict.fromkeys(rep[v] for v in psi.bound) if r not in free_set]
    summed = [r for r in bound_reps if r in used]
    return _Prepared(rep, factors, free_reps, summed, len(bound_reps) - len(summed), rank)


def _atom_factor(f: FnTable, scope: tuple[str, ...]) -> tuple[tuple[str, ...], np.ndarray]:
    """Dense array of an atom over its distinct variables, axis i = i-th distinct var."""
    dv = tuple(dict.fromkeys(scope))
    where = [dv.index(v) for v in scope]
    vals = []
    for m in range(1 << len(dv)):
        idx = 0
        for k, p in enumerate(where):
            idx |= ((m >> p) & 1) << k
        vals.append(f.values[idx])
    arr = np.empty(len(vals), dtype=object)
    arr[:] = vals
    return dv, _lsb_array(arr, len(dv))


def _lsb_array(flat: np.ndarray, k: int) -> np.ndarray:
    # C-order reshape puts the most significant bit first; reverse the axes
    return flat.reshape((2,) * k).transpose(tuple(range(k - 1, -1, -1))) if k else flat.reshape(())


def _neighbours(factors, summed_set=None) -> dict[str, set[str]]:
    nb: dict[str, set[str]] = {}
    for vs, _ in factors:
        for v in vs:
            nb.setdefault(v, set()).update(vs)
    for v, s in nb.items():
        s.discard(v)
    return nb


def _min_degree_order(nb: dict[str, set[str]], summed: Sequence[str], rank: Mapping[str, int],
                      cap: int) -> EliminationPlan:
    nb = {v: set(s) for v, s in nb.items()}
    todo = set(summed)
    heap = [(len(nb.get(v, ())), rank[v], v) for v in summed]
    heapq.heapify(heap)
    order, arities = [], []
    while heap:
        d, _, v = heapq.heappop(heap)
        if v not in todo or d != len(nb.get(v, ())):
            continue
        if d > cap:
            raise CapacityError(
                f"elimination step {len(order) + 1} (variable {v!r}) needs an intermediate "
                f"factor of arity {d}, above the cap {cap}")
        todo.discard(v)
        order.append(v)
        arities.append(d)
        ns = nb.pop(v, set())
        for u in ns:
            nb[u].discard(v)
            nb[u].update(ns - {u})
            if u in todo:
                heapq.heappush(heap, (len(nb[u]), rank[u], u))
    return EliminationPlan(tuple(order), tuple(arities), cap)


def plan_elimination(psi: PpsFormula, env=None, cap: int = DEFAULT_INTERMEDIATE_CAP) -> EliminationPlan:
    """Greedy min-degree order over the bound variables (ties by declaration order).

    EQ atoms are first contracted by substitution, so the plan ranges over
    class representatives.  The recorded arity of a step is the arity of the
    message produced when that variable is summed out.
    """
    prep = _prepare(psi, env)
    return _min_degree_order(_neighbours(prep.factors), prep.summed, prep.rank, cap)


def _multiply(factors: Sequence[tuple[tuple[str, ...], np.ndarray]]):
    allv = tuple(dict.fromkeys(v for vs, _ in factors for v in vs))
    acc = None
    for vs, arr in factors:
        perm = sorted(range(len(vs)), key=lambda i: allv.index(vs[i]))
        a = arr.transpose(perm) if vs else arr
        shape = [2 if v in vs else 1 for v in allv]
        a = a.reshape(shape)
        acc = a if acc is None else _box(acc * a)
    if acc is None:
        acc = _box(Fraction(1))
    return allv, acc


def _box(x) -> np.ndarray:
    """Object arrays collapse to scalars at rank 0; keep them as arrays."""
    if isinstance(x, np.ndarray):
        return x
    arr = np.empty((), dtype=object)
    arr[()] = x
    return arr


def _eliminate(prep: _Prepared, plan: EliminationPlan):
    buckets: dict[str, list[int]] = {}
    store: dict[int, tuple[tuple[str, ...], np.ndarray]] = {}
    for i, fac in enumerate(prep.factors):
        store[i] = fac
        for v in fac[0]:
            buckets.setdefault(v, []).append(i)
    nxt = len(prep.factors)
    for v in plan.order:
        ids = [i for i in buckets.pop(v, []) if i in store]
        group = [store.pop(i) for i in ids]
        vs, arr = _multiply(group)
        axis = vs.index(v)
        arr = _box(arr.sum(axis=axis))
        nv = vs[:axis] + vs[axis + 1:]
        store[nxt] = (nv, arr)
        for u in nv:
            buckets.setdefault(u, []).append(nxt)
        nxt += 1
    return list(store.values())


def evaluate(psi: PpsFormula, env: Mapping[str, FnTable] | None = None,
             cap: int = DEFAULT_INTERMEDIATE_CAP, plan: EliminationPlan | None = None) -> FnTable:
    """F_psi on the free variables, computed exactly by variable elimination."""
    prep = _prepare(psi, env)
    if plan is None:
        plan = _min_degree_order(_neighbours(prep.factors), prep.summed, prep.rank, cap)
    elif sorted(plan.order) != sorted(prep.summed):
        raise FormulaError("elimination plan does not cover the summed variables")
    rest = _eliminate(prep, plan)
    vs, arr = _multiply(rest)
    scale = Fraction(2) ** prep.empty_sums
    # bring the result onto the free representatives, broadcasting absent ones
    order = prep.free_reps
    perm = [vs.index(v) for v in order if v in vs]
    arr = arr.transpose(perm) if perm else arr
    arr = arr.reshape([2 if v in vs else 1 for v in order])
    arr = np.broadcast_to(arr, (2,) * len(order))
    n = len(psi.free)
    rep_pos = [order.index(prep.rep[v]) for v in psi.free]
    out = []
    for m in range(1 << n):
        point = [None] * len(order)
        ok = True
        for i, p in enumerate(rep_pos):
            b = (m >> i) & 1
            if point[p] is None:
                point[p] = b
            elif point[p] != b:
                ok = False
                break
        out.append(arr[tuple(point)] * scale if ok else Fraction(0))
    return FnTable(n, out)


def partition_function(inst: CspInstance, env: Mapping[str, FnTable] | None = None,
                       cap: int = DEFAULT_INTERMEDIATE_CAP) -> Fraction:
    """Exact Z(I).  Instances whose constraint graph has maximum degree 2 use
    transfer matrices; everything else goes through variable elimination."""
    z = chain_partition_function(inst, env)
    if z is not None:
        return z
    psi = PpsFormula((), inst.variables, inst.atoms)
    return evaluate(psi, env, cap).values[0]


# --- formula constructions -------------------------------------------------

def flatten(psi: PpsFormula, g_name: str, phi_g: PpsFormula) -> PpsFormula:
    """Inline every ``g_name`` atom of psi by a renamed-apart copy of phi_g."""
    if any(a.fn == g_name for a in phi_g.atoms):
        raise FormulaError(f"definition of {g_name!r} refers to itself")
    taken = set(psi.free) | set(psi.bound)
    bound = list(psi.bound)
    atoms: list[Atom] = []
    j = 0
    for a in psi.atoms:
        if a.fn != g_name:
            atoms.append(a)
            continue
        if len(a.scope) != len(phi_g.free):
            raise ArityError(f"atom {a} does not match the arity {len(phi_g.free)} of its definition")
        while True:
            fresh = {b: f"{b}{RESERVED}{g_name}{j}" for b in phi_g.bound}
            j += 1
            if not taken.intersection(fresh.values()):
                break
        sub = dict(zip(phi_g.free, a.scope))
        sub.update(fresh)
        taken.update(fresh.values())
        bound.extend(fresh[b] for b in phi_g.bound)
        atoms.extend(Atom(b.fn, (sub[v] for v in b.scope)) for b in phi_g.atoms)
    out = PpsFormula(psi.free, bound, atoms)
    if len(set(out.free + out.bound)) != len(out.free) + len(out.bound):
        raise AssertionError("flatten produced a variable collision")
    return out


def tolerance_budget(psi: PpsFormula, env: Mapping[str, FnTable] | None,
                     replaced: Sequence[int], eps) -> Fraction:
    """Sup-norm tolerance for the atoms at indices ``replaced``.

    Replacing each such atom by any function within delta of it changes F_psi
    by at most eps/2 (strictly less when the replacements are strictly within
    delta).  delta = eps 2^-(s+1) 2^-m / C where C bounds every partial
    product obtained by deleting a nonempty set of replaced atoms.  The value
    is capped at 1, where the bound on products of perturbations still holds.
    """
    eps = core.as_value(eps)
    if eps <= 0:
        raise ValueError("eps must be positive")
    psi.validate(env)
    s = len(replaced)
    if s == 0:
        return Fraction(1)
    if len(set(replaced)) != s or any(not 0 <= i < len(psi.atoms) for i in replaced):
        raise FormulaError("replaced atom indices must be distinct and in range")
    rset = set(replaced)
    allv = psi.free + psi.bound
    pos = {v: i for i, v in enumerate(allv)}
    kept = [(resolve(env, a.fn).values, [pos[v] for v in a.scope])
            for i, a in enumerate(psi.atoms) if i not in rset]
    repl = [(resolve(env, psi.atoms[i].fn).values, [pos[v] for v in psi.atoms[i].scope])
            for i in replaced]

    def at(values, scope, point):
        idx = 0
        for k, p in enumerate(scope):
            idx |= ((point >> p) & 1) << k
        return values[idx]

    big = Fraction(0)
    for point in range(1 << len(allv)):
        base = Fraction(1)
        for values, scope in kept:
            base *= at(values, scope, point)
        if not base:
            continue
        a = [at(values, scope, point) for values, scope in repl]
        if all(x > 1 for x in a):
            prod = Fraction(1)
            for x in a:
                prod *= x
            best = base * prod / min(a)
        else:
            best = base
            for x in a:
                if x > 1:
                    best *= x
        big = max(big, best)
    if big == 0:
        return Fraction(1)
    delta = eps / (Fraction(2) ** (s + 1) * Fraction(2) ** len(psi.bound) * big)
    return min(delta, Fraction(1))


def _rename_apart(inst: CspInstance, taken: set[str], tag: str) -> tuple[dict[str, str], list[str]]:
    mapping = {}
    for v in inst.variables:
        w = v
        k = 0
        while w in taken:
            w = f"{v}{RESERVED}{tag}{k}"
            k += 1
        mapping[v] = w
        taken.add(w)
    return mapping, [mapping[v] for v in inst.variables]


def disjoint_sum(i: CspInstance, j: CspInstance) -> CspInstance:
    """The union of two instances on disjoint variable sets; Z multiplies."""
    taken = set(i.variables)
    mapping, jvars = _rename_apart(j, taken, "R")
    atoms = list(i.atoms) + [Atom(a.fn, (mapping[v] for v in a.scope)) for a in j.atoms]
    return CspInstance(list(i.variables) + jvars, atoms)


def ordinal_sum(i: CspInstance, j: CspInstance, fn: str = "IMP",
                env: Mapping[str, FnTable] | None = None) -> CspInstance:
    """Disjoint sum plus fn(x, y) for every x of i and y of j."""
    if resolve(env, fn).arity != 2:
        raise ArityError(f"ordinal sum needs a binary function, {fn!r} is not")
    d = disjoint_sum(i, j)
    left = d.variables[:len(i.variables)]
    right = d.variables[len(i.variables):]
    cross = [Atom(fn, (x, y)) for x in left for y in right]
    return CspInstance(d.variables, list(d.atoms) + cross)


def unit_instance() -> CspInstance:
    """The one-variable instance with no constraints (Z = 2)."""
    return CspInstance(["v"], [])


def power_of_two_instance(ell: int, prefix: str = "v") -> CspInstance:
    """ell unconstrained variables (Z = 2^ell)."""
    return CspInstance([f"{prefix}{k}" for k in range(ell)], [])


def ordinal_chain(parts: Sequence[CspInstance], fn: str = "IMP", env=None) -> CspInstance:
    """Left-nested ordinal sum of a nonempty sequence of instances."""
    if not parts:
        raise ValueError("need at least one instance")
    out = parts[0]
    for p in parts[1:]:
        out = ordinal_sum(out, p, fn, env)
    return out


# --- reduction between counting problems ----------------------------------

@dataclass(frozen=True)
class Reduction:
    instance: CspInstance
    env: dict[str, FnTable]
    eps_prime: Fraction
    k: int | None
    constants: dict[str, Fraction] = field(default_factory=dict)


def _nonzero(values: Iterable[Fraction]) -> list[Fraction]:
    return [v for v in values if v != 0]


def reduce_instance(inst: CspInstance, env: Mapping[str, FnTable], fn: str, plan, eps) -> Reduction:
    """Replace every ``fn`` constraint of inst by the plan's formula.

    ``plan`` is any object with ``instantiate(eps) -> Gadget`` (a formula,
    the environment it refers to and the repetition count used); see
    :class:`pbclone.gadgets.plan.GadgetPlan`.  The accuracy handed to the plan
    is eps' = eps/4 * C/(A+B) with
      A = (4m/mu_min) 2^n mu_max^m nu_max^m'
      B = 2^n (mu_max+1)^(m-1) nu_max^m'
      C = mu_min^m nu_min^m'
    where m counts fn-constraints, m' the others and n the variables.
    """
    eps = core.as_value(eps)
    if not 0 < eps < 1:
        raise ValueError("eps must lie in (0, 1)")
    inst.validate(env)
    target = resolve(env, fn)
    f_atoms = [a for a in inst.atoms if a.fn == fn]
    others = [a for a in inst.atoms if a.fn != fn]
    if not f_atoms:
        return Reduction(inst, dict(env), eps, None)
    used = {a.fn for a in others}
    for name in used | {fn}:
        if resolve(env, name).is_zero():
            raise ValueError(f"function {name!r} is identically zero")
    n, m, m2 = len(inst.variables), len(f_atoms), len(others)
    mu_max = target.max()
    mu_min = min([Fraction(1)] + _nonzero(target.values))
    s_vals = _nonzero(core.EQ.values)
    for name in used:
        s_vals += _nonzero(resolve(env, name).values)
    nu_max = max(s_vals)
    nu_min = min([Fraction(1)] + s_vals)
    a_const = 4 * m / mu_min * 2 ** n * mu_max ** m * nu_max ** m2
    b_const = 2 ** n * (mu_max + 1) ** (m - 1) * nu_max ** m2
    c_const = mu_min ** m * nu_min ** m2
    eps_prime = eps / 4 * c_const / (a_const + b_const)

    gadget = plan.instantiate(eps_prime)
    g_env = dict(gadget.env)
    new_env = dict(env)
    renames = {}
    for name, table in g_env.items():
        new_name = name
        k = 0
        while new_name in new_env and new_env[new_name] != table:
            new_name = f"{name}{RESERVED}{fn}{k}"
            k += 1
        new_env[new_name] = table
        renames[name] = new_name
    body = gadget.formula
    body = PpsFormula(body.free, body.bound,
                      [Atom(renames.get(a.fn, a.fn), a.scope) for a in body.atoms])
    psi = PpsFormula((), inst.variables, inst.atoms)
    flat = flatten(psi, fn, body)
    out = CspInstance(flat.bound, flat.atoms)
    consts = {"A": a_const, "B": b_const, "C": c_const, "mu_max": mu_max, "mu_min": mu_min,
              "nu_max": nu_max, "nu_min": nu_min}
    return Reduction(out, new_env, eps_prime, gadget.k, consts)


def all_assignments(n: int) -> Iterable[tuple[int, ...]]:
    return itertools.product((0, 1), repeat=n)


from .chain import chain_partition_function  # noqa: E402  (uses resolve above)
