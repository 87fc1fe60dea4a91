"""Transfer-matrix evaluation of instances whose constraint graph has degree <= 2.

Such a graph is a disjoint union of paths and cycles.  Each component is
walked once, the steps along the walk become 2x2 integer matrices, and
consecutive identical steps are run-length encoded and raised to a power by
repeated squaring.  A long IMP path therefore costs one matrix power.

Two walk builders exist: a vectorized check for atoms that are already listed
along a single path, and a general one (depth-first order from a virtual root
joined to one start node per component).
"""

from __future__ import annotations

import math
from fractions import Fraction
from itertools import chain
from operator import attrgetter
from typing import Mapping

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components, depth_first_order

from .core import FnTable
from .errors import ArityError, FormulaError

Matrix = tuple[int, int, int, int]  # row-major (m00, m01, m10, m11)
_ID: Matrix = (1, 0, 0, 1)


def _mul(a: Matrix, b: Matrix) -> Matrix:
    return (a[0] * b[0] + a[1] * b[2], a[0] * b[1] + a[1] * b[3],
            a[2] * b[0] + a[3] * b[2], a[2] * b[1] + a[3] * b[3])


def _power(a: Matrix, r: int) -> Matrix:
    out = _ID
    while r:
        if r & 1:
            out = _mul(out, a)
        r >>= 1
        if r:
            a = _mul(a, a)
    return out


def _scaled(entries) -> tuple[Matrix, int]:
    """Integer matrix and common denominator d with entries = matrix / d."""
    d = 1
    for v in entries:
        d = d * v.denominator // math.gcd(d, v.denominator)
    return tuple(v.numerator * (d // v.denominator) for v in entries), d


def _oriented(f: tuple[Fraction, ...], forward: bool) -> tuple[Fraction, ...]:
    """Rows follow the variable we come from.  Table index is a + 2b for f(a, b)."""
    return (f[0], f[2], f[1], f[3]) if forward else (f[0], f[1], f[2], f[3])


def _resolve(env, name):
    from .formula import resolve
    return resolve(env, name)


def chain_partition_function(inst, env: Mapping[str, FnTable] | None = None) -> Fraction | None:
    """Z of ``inst`` if its constraint graph has maximum degree 2, else None."""
    variables = inst.variables
    n = len(variables)
    idx = dict(zip(variables, range(n)))
    if len(idx) != n:
        raise FormulaError("duplicate variable")

    atoms = inst.atoms
    scopes = list(map(attrgetter("scope"), atoms))
    lengths = set(map(len, scopes))
    if any(k > 2 for k in lengths):
        return None
    fns = list(map(attrgetter("fn"), atoms))
    if lengths <= {2}:
        pairs, fn2, others = scopes, fns, []
    else:
        pairs = [sc for sc in scopes if len(sc) == 2]
        fn2 = [f for f, sc in zip(fns, scopes) if len(sc) == 2]
        others = [a for a in atoms if len(a.scope) != 2]
    try:
        ends = np.fromiter(map(idx.__getitem__, chain.from_iterable(pairs)),
                           dtype=np.int64, count=2 * len(pairs))
    except KeyError as exc:
        raise FormulaError(f"undeclared variable {exc.args[0]!r}") from None
    ia, ib = ends[0::2], ends[1::2]

    names = list(dict.fromkeys(fn2))
    tables: list[FnTable] = []
    for name in names:
        f = _resolve(env, name)
        if f.arity != 2:
            raise ArityError(f"{name} has arity {f.arity} but is applied to 2 variables")
        tables.append(f)
    if len(names) <= 1:
        tid = np.zeros(len(fn2), dtype=np.int64)
    else:
        name_id = {name: i for i, name in enumerate(names)}
        tid = np.array(list(map(name_id.__getitem__, fn2)), dtype=np.int64)

    nullary = Fraction(1)
    weights: dict[int, list[Fraction]] = {}
    for a in others:
        f = _resolve(env, a.fn)
        if f.arity != len(a.scope):
            raise ArityError(f"atom {a}: {a.fn} has arity {f.arity}")
        if f.arity == 0:
            nullary *= f.values[0]
            continue
        if a.scope[0] not in idx:
            raise FormulaError(f"undeclared variable {a.scope[0]!r}")
        w = weights.setdefault(idx[a.scope[0]], [Fraction(1), Fraction(1)])
        w[0] *= f.values[0]
        w[1] *= f.values[1]
    if n == 0:
        return nullary

    # binary atoms on a repeated variable are unary weights
    loops = np.flatnonzero(ia == ib)
    if len(loops):
        for e in loops.tolist():
            f = tables[tid[e]]
            w = weights.setdefault(int(ia[e]), [Fraction(1), Fraction(1)])
            w[0] *= f.values[0]
            w[1] *= f.values[3]
        keep = ia != ib
        ia, ib, tid = ia[keep], ib[keep], tid[keep]

    deg = np.bincount(np.concatenate([ia, ib]), minlength=n)
    if deg.max() > 2:
        return None
    ia, ib, tid = _merge_parallel(ia, ib, tid, tables, n)

    walk = _listed_path(ia, ib, n)
    if walk is None:
        walk = _general_walk(ia, ib, n)
    visit, step_e, closing = walk

    wlist: list[tuple[Fraction, Fraction]] = [(Fraction(1), Fraction(1))]
    wid = np.zeros(n, dtype=np.int64)
    for u, w in weights.items():
        wlist.append((w[0], w[1]))
        wid[u] = len(wlist) - 1
    nw = len(wlist)

    if len(ia):
        safe = np.maximum(step_e, 0)
        forward = (ia[safe] == visit[:-1]).astype(np.int64)
        key = (tid[safe] * 2 + forward) * nw + wid[visit[1:]]
        key = np.where(step_e >= 0, key, -1)
    else:
        key = np.full(n - 1, -1, dtype=np.int64)

    mats: dict[int, tuple[Matrix, int]] = {}

    def step_matrix(k: int) -> tuple[Matrix, int]:
        if k not in mats:
            w = wlist[k % nw]
            rest = k // nw
            m2 = _oriented(tables[rest // 2].values, bool(rest % 2))
            mats[k] = _scaled((m2[0] * w[0], m2[1] * w[1], m2[2] * w[0], m2[3] * w[1]))
        return mats[k]

    def start_matrix(u: int) -> tuple[Matrix, int]:
        w = wlist[wid[u]]
        return _scaled((w[0], Fraction(0), Fraction(0), w[1]))

    def close(u_start: int, u_last: int, acc: Matrix, den: int) -> Fraction:
        e = closing.get(u_start)
        if e is None:
            return Fraction(sum(acc), den)
        cm, cden = _scaled(_oriented(tables[tid[e]].values, int(ia[e]) == u_last))
        full = _mul(acc, cm)
        return Fraction(full[0] + full[3], den * cden)

    z = nullary
    if len(key):
        change = np.flatnonzero(np.diff(key)) + 1
        bounds = [0] + change.tolist() + [len(key)]
    else:
        bounds = []
    keys = key.tolist()
    visit_l = visit.tolist()
    cur = visit_l[0]
    acc, den = start_matrix(cur)
    for lo, hi in zip(bounds[:-1], bounds[1:]):
        k = keys[lo]
        if k < 0:
            for i in range(lo, hi):
                z *= close(cur, visit_l[i], acc, den)
                cur = visit_l[i + 1]
                acc, den = start_matrix(cur)
            continue
        mat, d = step_matrix(k)
        r = hi - lo
        acc = _mul(acc, _power(mat, r))
        den *= d ** r
    z *= close(cur, visit_l[-1], acc, den)
    return z


def _listed_path(ia: np.ndarray, ib: np.ndarray, n: int):
    """Walk for a single path whose atoms are listed end to end, else None."""
    m = len(ia)
    if m != n - 1 or m == 0:
        return None
    if m == 1:
        return np.array([ia[0], ib[0]], dtype=np.int64), np.zeros(1, dtype=np.int64), {}
    a0, b0, a1, b1 = ia[:-1], ib[:-1], ia[1:], ib[1:]
    b_shared = (b0 == a1) | (b0 == b1)
    a_shared = (a0 == a1) | (a0 == b1)
    if not np.all(a_shared ^ b_shared):
        return None
    shared = np.where(b_shared, b0, a0)
    first = ib[0] if shared[0] == ia[0] else ia[0]
    last = ib[-1] if shared[-1] == ia[-1] else ia[-1]
    visit = np.concatenate([[first], shared, [last]]).astype(np.int64)
    # every variable exactly once means the walk is a Hamiltonian path
    if np.bincount(visit, minlength=n).max() != 1:
        return None
    return visit, np.arange(m, dtype=np.int64), {}


def _general_walk(ia: np.ndarray, ib: np.ndarray, n: int):
    m = len(ia)
    ends = np.concatenate([ia, ib])
    other = np.concatenate([ib, ia])
    eids = np.concatenate([np.arange(m), np.arange(m)])
    order = np.argsort(ends, kind="stable")
    ends_s = ends[order]
    slot = np.arange(len(ends_s)) - np.searchsorted(ends_s, ends_s, side="left")
    nbr = np.full((n, 2), -1, dtype=np.int64)
    eid = np.full((n, 2), -1, dtype=np.int64)
    nbr[ends_s, slot] = other[order]
    eid[ends_s, slot] = eids[order]
    deg = (nbr >= 0).sum(axis=1)

    graph = csr_matrix((np.ones(2 * m, dtype=np.int8), (ends, other)), shape=(n, n))
    ncomp, labels = connected_components(graph, directed=False)
    # start each component at an endpoint when it has one
    pick = np.lexsort((np.arange(n), deg > 1, labels))
    _, firsts = np.unique(labels[pick], return_index=True)
    starts = pick[firsts]

    root = n
    rows = np.concatenate([ends, np.full(ncomp, root), starts])
    cols = np.concatenate([other, starts, np.full(ncomp, root)])
    g2 = csr_matrix((np.ones(len(rows), dtype=np.int8), (rows, cols)), shape=(n + 1, n + 1))
    visit = depth_first_order(g2, root, directed=True, return_predecessors=False)[1:]
    visit = visit.astype(np.int64)

    u_arr, w_arr = visit[:-1], visit[1:]
    if m:
        slot_w = np.where(nbr[u_arr, 0] == w_arr, 0, 1)
        step_e = np.where(labels[u_arr] == labels[w_arr], eid[u_arr, slot_w], -1)
    else:
        step_e = np.full(n - 1, -1, dtype=np.int64)

    closing: dict[int, int] = {}
    cyc = starts[deg[starts] == 2]
    if len(cyc):
        comp_last = np.empty(ncomp, dtype=np.int64)
        # fancy assignment keeps the last write, i.e. the last visited node
        comp_last[labels[visit]] = visit
        for s in cyc.tolist():
            last = int(comp_last[labels[s]])
            k = 0 if nbr[last, 0] == s else 1
            closing[s] = int(eid[last, k])
    return visit, step_e, closing


def _merge_parallel(ia, ib, tid, tables: list[FnTable], n: int):
    """Fold atoms sharing the same pair of variables into one binary table."""
    if len(ia) < 2:
        return ia, ib, tid
    lo = np.minimum(ia, ib)
    hi = np.maximum(ia, ib)
    pair = lo * n + hi
    order = np.argsort(pair, kind="stable")
    ps = pair[order]
    dup = np.flatnonzero(ps[1:] == ps[:-1])
    if not len(dup):
        return ia, ib, tid
    groups: dict[int, set[int]] = {}
    for d in dup.tolist():
        g = groups.setdefault(int(ps[d]), set())
        g.update((int(order[d]), int(order[d + 1])))
    drop = np.zeros(len(ia), dtype=bool)
    new_a, new_b, new_t = [], [], []
    for members in groups.values():
        members = sorted(members)
        a0 = int(ia[members[0]])
        b0 = int(ib[members[0]])
        vals = [Fraction(1)] * 4
        for e in members:
            f = tables[tid[e]].values
            same = int(ia[e]) == a0
            for x in range(4):
                xa, xb = x & 1, x >> 1
                vals[x] *= f[x] if same else f[xb | (xa << 1)]
            drop[e] = True
        tables.append(FnTable(2, vals))
        new_a.append(a0)
        new_b.append(b0)
        new_t.append(len(tables) - 1)
    keep = ~drop
    return (np.concatenate([ia[keep], np.array(new_a, dtype=np.int64)]),
            np.concatenate([ib[keep], np.array(new_b, dtype=np.int64)]),
            np.concatenate([tid[keep], np.array(new_t, dtype=np.int64)]))
