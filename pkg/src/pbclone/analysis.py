"""Decision procedures for log-supermodularity, log-modularity, product form
and the relational trichotomy.

All checks are multiplicative and exact.  Witnesses are points written as
tuples (x_1, ..., x_n); when several witnesses exist the one whose points come
first in lexicographic tuple order is reported.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from functools import lru_cache

from . import core
from .core import FnTable, bits, mask_of
from .errors import ArityError, NotPermissiveError

Point = tuple[int, ...]


@lru_cache(maxsize=None)
def _lex_masks(n: int) -> tuple[int, ...]:
    """Masks sorted by the lexicographic order of their point tuples."""
    return tuple(sorted(range(1 << n), key=lambda m: bits(m, n)))


@lru_cache(maxsize=None)
def _incomparable_pairs(n: int) -> tuple[tuple[int, int, int, int], ...]:
    """(x, y, x|y, x&y) for incomparable x, y with x before y in tuple order."""
    order = _lex_masks(n)
    out = []
    for i, x in enumerate(order):
        for y in order[i + 1:]:
            if x & y != x and x & y != y:
                out.append((x, y, x | y, x & y))
    return tuple(out)


@lru_cache(maxsize=None)
def _square_faces(n: int) -> tuple[tuple[int, int, int, int], ...]:
    """(m, m|bi, m|bj, m|bi|bj) for i < j and m free of bits i, j."""
    out = []
    for i, j in itertools.combinations(range(n), 2):
        bi, bj = 1 << i, 1 << j
        for m in range(1 << n):
            if not m & (bi | bj):
                out.append((m, m | bi, m | bj, m | bi | bj))
    return tuple(out)


@dataclass(frozen=True)
class PairResult:
    """Outcome of a check over pairs of points; ``pair`` is a violating pair."""

    holds: bool
    pair: tuple[Point, Point] | None = None

    def __bool__(self) -> bool:
        return self.holds


def _pair_check(f: FnTable, equality: bool) -> PairResult:
    v = core.integer_scaled(f.values)
    for x, y, join, meet in _incomparable_pairs(f.arity):
        lhs, rhs = v[join] * v[meet], v[x] * v[y]
        if lhs < rhs or (equality and lhs != rhs):
            return PairResult(False, (bits(x, f.arity), bits(y, f.arity)))
    return PairResult(True)


def is_lsm(f: FnTable) -> PairResult:
    """F(x or y) F(x and y) >= F(x) F(y) for all x, y."""
    return _pair_check(f, equality=False)


def is_logmodular(f: FnTable) -> PairResult:
    """F(x or y) F(x and y) = F(x) F(y) for all x, y."""
    return _pair_check(f, equality=True)


def is_lsm_topkis(f: FnTable) -> bool:
    """lsm via the 2-pinnings; valid (and accepted) for permissive F only."""
    if not core.is_permissive(f):
        raise NotPermissiveError("the 2-pinning criterion applies to permissive functions only")
    v = core.integer_scaled(f.values)
    return all(v[a] * v[d] >= v[b] * v[c] for a, b, c, d in _square_faces(f.arity))


def binary_lsm(f: FnTable) -> bool:
    if f.arity != 2:
        raise ArityError("binary_lsm needs a binary table")
    v = f.values
    return v[0] * v[3] >= v[1] * v[2]


# --- product form ----------------------------------------------------------

@dataclass(frozen=True)
class ProductFormCertificate:
    """F(x) = constant * [pins hold] * [links hold] * prod_classes weight(x_rep).

    ``classes`` lists (representative, ((position, parity), ...)); a member
    with parity 0 equals the representative and parity 1 is its negation.
    ``weights`` holds one unary (w0, w1) per class, in the same order.
    """

    arity: int
    pins: dict[int, int]
    classes: tuple[tuple[int, tuple[tuple[int, int], ...]], ...]
    weights: tuple[tuple[Fraction, Fraction], ...]
    constant: Fraction

    def reconstruct(self) -> FnTable:
        out = []
        for m in range(1 << self.arity):
            x = bits(m, self.arity)
            val = self.constant
            if any(x[p] != c for p, c in self.pins.items()):
                val = Fraction(0)
            else:
                for (rep, members), w in zip(self.classes, self.weights):
                    if any(x[p] != x[rep] ^ par for p, par in members):
                        val = Fraction(0)
                        break
                    val *= w[x[rep]]
            out.append(val)
        return FnTable(self.arity, out)


@dataclass(frozen=True)
class ProductFormResult:
    certificate: ProductFormCertificate | None
    failure: str | None = None
    detail: dict = field(default_factory=dict)

    def __bool__(self) -> bool:
        return self.certificate is not None


def product_form_test(f: FnTable) -> ProductFormResult:
    """Decide membership in the clone generated by NEQ and unary weights."""
    n = f.arity
    support = f.support()
    if not support:
        classes = tuple((i, ((i, 0),)) for i in range(n))
        weights = tuple((Fraction(1), Fraction(1)) for _ in range(n))
        return ProductFormResult(ProductFormCertificate(n, {}, classes, weights, Fraction(0)))
    points = [bits(m, n) for m in support]

    pins = {}
    for i in range(n):
        seen = {p[i] for p in points}
        if len(seen) == 1:
            pins[i] = seen.pop()
    free = [i for i in range(n) if i not in pins]

    # union-find with parity relative to the parent
    parent = {i: i for i in free}
    parity = {i: 0 for i in free}

    def find(i):
        if parent[i] == i:
            return i, 0
        r, p = find(parent[i])
        parent[i], parity[i] = r, parity[i] ^ p
        return r, parity[i]

    for i, j in itertools.combinations(free, 2):
        proj = {(p[i], p[j]) for p in points}
        if len(proj) == 4:
            continue
        if proj == {(0, 0), (1, 1)}:
            want = 0
        elif proj == {(0, 1), (1, 0)}:
            want = 1
        else:
            return ProductFormResult(None, "projection", {"positions": (i, j),
                                                           "projection": sorted(proj)})
        (ri, pi), (rj, pj) = find(i), find(j)
        if ri == rj:
            if pi ^ pj != want:
                return ProductFormResult(None, "projection", {"positions": (i, j),
                                                               "projection": sorted(proj)})
            continue
        if rj < ri:
            ri, rj, pi, pj = rj, ri, pj, pi
        parent[rj], parity[rj] = ri, pi ^ pj ^ want

    groups: dict[int, list[tuple[int, int]]] = {}
    for i in free:
        r, p = find(i)
        groups.setdefault(r, []).append((i, p))
    reps = sorted(groups)
    k = len(reps)
    if len(support) != 1 << k:
        return ProductFormResult(None, "support", {"support_size": len(support), "classes": k})

    def expand(z: int) -> int:
        x = [0] * n
        for p, c in pins.items():
            x[p] = c
        for t, r in enumerate(reps):
            b = (z >> t) & 1
            for i, par in groups[r]:
                x[i] = b ^ par
        return mask_of(x)

    g = FnTable(k, (f.values[expand(z)] for z in range(1 << k)))
    lm = is_logmodular(g)
    if not lm:
        za, zb = lm.pair
        return ProductFormResult(None, "logmodular", {
            "pair": (bits(expand(mask_of(za)), n), bits(expand(mask_of(zb)), n))})
    g0 = g.values[0]
    weights = tuple((Fraction(1), g.values[1 << t] / g0) for t in range(k))
    classes = tuple((r, tuple(groups[r])) for r in reps)
    return ProductFormResult(ProductFormCertificate(n, pins, classes, weights, g0))


# --- relations -------------------------------------------------------------

def _require_relation(r: FnTable) -> None:
    if not r.is_relation():
        raise ValueError("expected a 0/1-valued table")


def _support_lex(r: FnTable) -> list[Point]:
    return sorted(bits(m, r.arity) for m in r.support())


@dataclass(frozen=True)
class AffineResult:
    holds: bool
    triple: tuple[Point, Point, Point] | None = None
    outside: Point | None = None

    def __bool__(self) -> bool:
        return self.holds


def is_affine_relation(r: FnTable) -> AffineResult:
    """Closure under a xor b xor c."""
    _require_relation(r)
    pts = _support_lex(r)
    members = set(pts)
    for a, b, c in itertools.combinations_with_replacement(pts, 3):
        d = tuple(p ^ q ^ s for p, q, s in zip(a, b, c))
        if d not in members:
            return AffineResult(False, (a, b, c), d)
    return AffineResult(True)


class RelationKind(Enum):
    WithinID1 = "WithinID1"
    AffineIL2 = "AffineIL2"
    NonAffine = "NonAffine"


@dataclass(frozen=True)
class RelationClass:
    kind: RelationKind
    triple: tuple[Point, Point, Point] | None = None
    outside_triple: Point | None = None
    extra_tuple: Point | None = None


def id1_closure(r: FnTable) -> FnTable:
    """Conjunction of R's constant coordinates and its EQ/NEQ binary projections."""
    n = r.arity
    pts = _support_lex(r)
    pins = {}
    for i in range(n):
        seen = {p[i] for p in pts}
        if len(seen) == 1:
            pins[i] = next(iter(seen))
    links = []
    for i, j in itertools.combinations(range(n), 2):
        proj = {(p[i], p[j]) for p in pts}
        if proj == {(0, 0), (1, 1)}:
            links.append((i, j, 0))
        elif proj == {(0, 1), (1, 0)}:
            links.append((i, j, 1))

    def ok(x):
        return (all(x[p] == c for p, c in pins.items())
                and all(x[i] ^ x[j] == t for i, j, t in links))
    return FnTable.from_function(n, lambda *x: 1 if ok(x) else 0)


def relation_trichotomy(r: FnTable) -> RelationClass:
    _require_relation(r)
    if r.is_zero():
        raise ValueError("the empty relation is degenerate")
    aff = is_affine_relation(r)
    if not aff:
        return RelationClass(RelationKind.NonAffine, aff.triple, aff.outside)
    conj = id1_closure(r)
    if conj == r:
        return RelationClass(RelationKind.WithinID1)
    extra = min(bits(m, r.arity) for m in range(1 << r.arity)
                if conj.values[m] and not r.values[m])
    return RelationClass(RelationKind.AffineIL2, extra_tuple=extra)
