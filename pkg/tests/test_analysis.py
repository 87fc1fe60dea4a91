import itertools
from fractions import Fraction

import pytest

from pbclone import randgen
from pbclone.analysis import (RelationKind, is_affine_relation, is_logmodular, is_lsm,
                              is_lsm_topkis, product_form_test, relation_trichotomy)
from pbclone.core import (EQ_PERMISSIVE, IMP, NEQ, OR, XOR3, FnTable, bar, bits, from_matrix,
                          sum_out, unary)
from pbclone.errors import NotPermissiveError
from pbclone.transforms import graded_arity4


def test_is_lsm_examples():
    assert is_lsm(IMP)
    r = is_lsm(XOR3)
    assert not r
    x, y = r.pair
    join = tuple(a | b for a, b in zip(x, y))
    meet = tuple(a & b for a, b in zip(x, y))
    assert XOR3[join] * XOR3[meet] < XOR3[x] * XOR3[y]
    assert is_lsm(graded_arity4())


def test_topkis_examples():
    assert is_lsm_topkis(EQ_PERMISSIVE)
    remark = FnTable.from_function(4, lambda a, b, c, d: 1 if (a, b, c, d) in
                                   ((1, 1, 0, 0), (0, 0, 1, 1)) else 0)
    with pytest.raises(NotPermissiveError):
        is_lsm_topkis(remark)
    assert not is_lsm(remark)


def test_topkis_equivalence_random(rng):
    for _ in range(300):
        n = rng.randint(1, 6)
        f = randgen.table(rng, n, randgen.POSITIVE)
        assert bool(is_lsm(f)) == is_lsm_topkis(f)


def test_lsm_is_preserved_by_bar_product_and_sum_out(rng):
    for _ in range(200):
        n = rng.randint(1, 4)
        f = randgen.table(rng, n)
        assert bool(is_lsm(f)) == bool(is_lsm(bar(f)))
    for _ in range(60):
        f, g = randgen.lsm_permissive(rng, 3), randgen.lsm_permissive(rng, 3)
        assert is_lsm(f * g)
        assert is_lsm(sum_out(f, rng.randrange(3)))


def test_is_logmodular_examples():
    assert is_logmodular(unary(3, 7))
    assert not is_logmodular(EQ_PERMISSIVE)
    assert is_logmodular(from_matrix(1, 2, 2, 4))


def test_product_form_examples():
    f = FnTable.from_function(2, lambda x, y: (2 if x else 3) * (1 if x != y else 0) * 5)
    r = product_form_test(f)
    assert r and len(r.certificate.classes) == 1
    (rep, members), = r.certificate.classes
    assert dict(members) == {rep: 0, 1 - rep: 1}
    assert r.certificate.reconstruct() == f
    assert not product_form_test(EQ_PERMISSIVE)
    assert not product_form_test(IMP)
    assert product_form_test(FnTable.constant(3, 0))


def skeleton_oracle(f: FnTable) -> bool:
    """Brute force over pin / EQ / NEQ skeletons: some skeleton has exactly
    F's support, and F is a product of unaries of the class representatives."""
    n = f.arity
    support = {bits(m, n) for m in f.support()}
    if not support:
        return True
    for pins in itertools.product((None, 0, 1), repeat=n):
        free = [i for i in range(n) if pins[i] is None]
        for labels in itertools.product(range(len(free) or 1), repeat=len(free)):
            for parities in itertools.product((0, 1), repeat=len(free)):
                rel = set()
                for reps in itertools.product((0, 1), repeat=len(free) or 1):
                    x = [pins[i] for i in range(n)]
                    for k, i in enumerate(free):
                        x[i] = reps[labels[k]] ^ parities[k]
                    rel.add(tuple(x))
                if rel != support:
                    continue
                classes = sorted(set(labels))
                # restriction of F to the skeleton as a function of the class bits
                g = FnTable(len(classes), [
                    f[next(x for x in rel if all(x[free[k]] ^ parities[k] == ((m >> classes.index(labels[k])) & 1)
                                                 for k in range(len(free))))]
                    for m in range(1 << len(classes))])
                if is_logmodular(g):
                    return True
    return False


def test_product_form_against_skeleton_search(rng):
    for _ in range(400):
        f = randgen.table(rng, rng.randint(1, 3), (Fraction(0), Fraction(1), Fraction(2)))
        r = product_form_test(f)
        assert bool(r) == skeleton_oracle(f), f
        if r:
            assert r.certificate.reconstruct() == f


def test_product_form_products_of_unaries_and_neq(rng):
    for _ in range(50):
        u, w = unary(*rng.sample(randgen.POSITIVE, 2)), unary(*rng.sample(randgen.POSITIVE, 2))
        f = FnTable.from_function(3, lambda a, b, c: u[a] * NEQ[(a, b)] * w[c])
        r = product_form_test(f)
        assert r and r.certificate.reconstruct() == f


def test_affine_examples():
    assert is_affine_relation(XOR3)
    r = is_affine_relation(OR)
    assert not r and r.outside == (0, 0)
    assert set(r.triple) == {(0, 1), (1, 0), (1, 1)}
    assert is_affine_relation(FnTable.constant(2, 0))


def test_relation_trichotomy_examples():
    assert relation_trichotomy(IMP).kind is RelationKind.NonAffine
    assert relation_trichotomy(NEQ).kind is RelationKind.WithinID1
    assert relation_trichotomy(XOR3).kind is RelationKind.AffineIL2
