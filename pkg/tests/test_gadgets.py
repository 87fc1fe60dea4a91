import random
from fractions import Fraction

import pytest

from pbclone import randgen
from pbclone.analysis import is_lsm
from pbclone.core import EQ_PERMISSIVE, IMP, NEQ, OR, XOR3, FnTable, from_matrix
from pbclone.errors import PreconditionError
from pbclone.formula import (Atom, PpsFormula, brute_force_partition, evaluate, flatten,
                             pruned_evaluate)
from pbclone.gadgets import (Case, binary_witness, chi_builder, classify_binary, count_instance,
                             extract_nonlsm_binary, h_gadget, h_power, ising_partition_brute_force,
                             ising_reduction, least_power_below, lsm3_decompose,
                             multiple_instance, neq_from_or, oplus3_downstream, oplus3_normalize,
                             or_universal, or_universal_stages, shift_monotone, synth_unary,
                             topkis_lift)
from pbclone.gadgets.plan import Radical
from pbclone.verify import binary_cases, ising, lsm3

EPS_GRID = (Fraction(1, 2 ** 4), Fraction(1, 2 ** 10), Fraction(1, 2 ** 20))


# --- binary functions ------------------------------------------------------------

def test_classify_binary_examples():
    imp = classify_binary(IMP)
    assert imp.case is Case.IV and imp.alpha == 0
    eqp = classify_binary(EQ_PERMISSIVE)
    assert eqp.case is Case.IV and eqp.alpha == Fraction(1, 4)
    assert classify_binary(from_matrix(1, 2, 2, 4)).case is Case.I
    assert classify_binary(OR).case is Case.V
    assert classify_binary(NEQ).case is Case.III
    assert classify_binary(from_matrix(2, 0, 0, 3)).case is Case.II


def test_classify_binary_against_conditions():
    assert binary_cases(trials=10_000, seed=1).passed


def test_power_schedule_is_least_k():
    eps = Fraction(1, 1024)
    assert least_power_below(Fraction(1, 2), eps) == 11
    assert least_power_below(Fraction(1, 4), eps) == 6
    assert least_power_below(Fraction(1, 4), Fraction(1, 1025)) == 6
    assert least_power_below(0, eps) == 1


def test_imp_half_plan():
    # (1/2)^10 equals eps, so the strict bound first holds at k = 11
    f = from_matrix(1, 1, Fraction(1, 2), 1)
    plan = binary_witness(f).forward
    eps = Fraction(1, 1024)
    assert plan.schedule(eps) == 11
    value = plan.evaluate(eps)
    assert value[(1, 0)] == Fraction(1, 2 ** 11) < eps
    assert value.sup_distance(IMP) < eps


def test_weighted_neq_is_exact():
    f = FnTable.from_function(2, lambda x, y: (3 if x else Fraction(1, 2)) * NEQ[(x, y)])
    w = binary_witness(f)
    assert w.forward.exact and w.backward.exact
    assert w.forward.evaluate(Fraction(1, 2)) == NEQ
    assert w.backward.evaluate(Fraction(1, 2)) == f


def test_neq_from_or_entries():
    psi, env = neq_from_or(10)
    g = evaluate(psi, env)
    assert g.matrix() == ((0, 1), (1, Fraction(1, 4 ** 10)))


def test_rank_one_and_diagonal_have_no_witness():
    with pytest.raises(PreconditionError):
        binary_witness(from_matrix(1, 2, 2, 4))
    with pytest.raises(PreconditionError):
        binary_witness(from_matrix(1, 0, 0, 1))


def random_binary(rng):
    while True:
        f = randgen.binary_table(rng)
        if classify_binary(f).case not in (Case.I, Case.II):
            return f


@pytest.mark.parametrize("eps", EPS_GRID)
def test_binary_plans_meet_eps(eps):
    rng = random.Random(7)
    for _ in range(12):
        f = random_binary(rng)
        w = binary_witness(f)
        for plan in (w.forward, w.backward):
            assert plan.error(eps) < eps, (f, plan.name)


def _rename_env(psi, env, tag):
    mapping = {n: f"{n}{tag}" for n in env}
    atoms = [Atom(mapping.get(a.fn, a.fn), a.scope) for a in psi.atoms]
    return PpsFormula(psi.free, psi.bound, atoms), {mapping[n]: g for n, g in env.items()}


def test_binary_round_trip_within_two_eps():
    rng = random.Random(3)
    eps = Fraction(1, 256)
    for _ in range(10):
        f = random_binary(rng)
        w = binary_witness(f)
        canonical = w.forward.target
        # canonical -> F, then F -> canonical with the first plan substituted for F
        back = w.backward.instantiate(eps)
        fwd = w.forward.instantiate(eps)
        inner, inner_env = _rename_env(back.formula, back.env, "b")
        outer_env = {n: g for n, g in fwd.env.items() if n != "F"}
        outer, outer_env = _rename_env(fwd.formula, outer_env, "f")
        outer = PpsFormula(outer.free, outer.bound,
                           [Atom("F", a.scope) if a.fn == "Ff" else a for a in outer.atoms])
        composed = flatten(outer, "F", inner)
        env = {**inner_env, **outer_env}
        try:
            value = evaluate(composed, env)
        except Exception:
            value = pruned_evaluate(composed, env)
        assert value.sup_distance(canonical) < 2 * eps, f


# --- OR universality -----------------------------------------------------------------

def test_or_universal_stage_values():
    f = FnTable(2, [0, 1, 2, 4])
    st = or_universal_stages(f)
    assert st.mu == 1
    assert sorted(st.env[f"u{a}"][1] for a in st.support) == [1, 3, 7]
    assert evaluate(st.psi1, st.env).values == (1, 2, 4, 8)
    assert evaluate(st.psi2, st.env).values == (1, 2, 2, 2)


def test_or_universal_random_targets():
    rng = random.Random(9)
    for _ in range(15):
        f = randgen.table(rng, rng.randint(1, 3))
        plan = or_universal(f)
        if f.is_zero():
            assert plan.exact
            continue
        st = or_universal_stages(f)
        assert evaluate(st.psi1, st.env) == FnTable(f.arity, [
            2 * v / st.mu if v else 1 for v in f.values])
        assert evaluate(st.psi2, st.env) == FnTable(f.arity, [2 if v else 1 for v in f.values])
        for eps in EPS_GRID:
            assert plan.error(eps) < eps


def test_or_universal_full_support_is_exact():
    f = FnTable(2, [1, 2, 3, Fraction(1, 2)])
    plan = or_universal(f)
    assert plan.exact and plan.schedule(Fraction(1, 2)) == 0
    assert plan.evaluate(Fraction(1, 2)) == f


# --- threshold factors and decompositions ---------------------------------------------

def test_chi_examples():
    psi, env = chi_builder((1, 1), 3)
    assert evaluate(psi, env).values == (1, 1, 1, 3)
    psi, env = chi_builder((0, 0), 5)
    assert evaluate(psi, env) == FnTable.constant(2, 5)
    psi, env = chi_builder((1, 0, 1), 1)
    assert evaluate(psi, env) == FnTable.constant(3, 1)
    with pytest.raises(PreconditionError):
        chi_builder((1, 1), Fraction(1, 2))


def test_chi_complement():
    psi, env = chi_builder((1, 1), 3, complement=True)
    assert evaluate(psi, env).values == (3, 1, 1, 1)


def test_lsm3_examples():
    f = FnTable.from_function(3, lambda a, b, c: 2 ** (a * b + b * c))
    d = lsm3_decompose(f)
    assert d.reconstruct() == f and not d.complemented
    assert sorted((fac.point, fac.c) for fac in d.factors) == [((0, 1, 1), 2), ((1, 1, 0), 2)]
    d = lsm3_decompose(FnTable.constant(3, 7))
    assert [fac.point for fac in d.factors] == [(0, 0, 0)]
    psi, env = d.formula()
    assert evaluate(psi, env) == FnTable.constant(3, 7)


def test_lsm3_complement_route():
    f = FnTable.from_function(3, lambda a, b, c: {0: 1, 1: 1, 2: 2, 3: 4}[a + b + c])
    d = lsm3_decompose(f)
    assert d.complemented and d.reconstruct() == f
    psi, env = d.formula()
    assert evaluate(psi, env) == f


def test_lsm3_random_round_trips():
    r = lsm3(trials=200, seed=2)
    assert r.passed and r.detail["direct"] and r.detail["complemented"]


def test_lsm3_rejects_non_lsm():
    with pytest.raises(PreconditionError):
        lsm3_decompose(FnTable.from_function(3, lambda a, b, c: 1 + (a ^ b)))


def test_topkis_lift_examples(rng):
    assert topkis_lift(IMP) == FnTable.constant(2, 1)
    f = randgen.lsm_permissive(rng, 3)
    assert topkis_lift(f) == f
    g = FnTable(2, [0, 0, 1, 2])
    lifted = topkis_lift(g)
    assert all(v > 0 for v in lifted.values) and is_lsm(lifted)
    assert FnTable(2, [v and 1 for v in g.values]) * lifted == g
    for _ in range(40):
        f = randgen.lsm_permissive(rng, 3, randgen.SMALL)
        lifted = topkis_lift(f)
        assert all(v > 0 for v in lifted.values) and is_lsm(lifted)
        assert FnTable(3, [1 if v else 0 for v in f.values]) * lifted == f


def test_h_gadget_and_powers():
    assert evaluate(h_gadget()).values == (2, 1, 1, 2)
    h = evaluate(h_gadget())
    for f in (IMP, XOR3, NEQ):
        n = f.arity
        xs, ys = [f"x{i}" for i in range(n)], [f"y{i}" for i in range(n)]
        for k in (1, 2, 3):
            atoms = [Atom("F", ys)] + [Atom("H", (x, y)) for x, y in zip(xs, ys)] * k
            oracle = evaluate(PpsFormula(xs, ys, atoms), {"F": f, "H": h})
            assert h_power(f, k) == oracle


def test_extract_nonlsm_binary():
    for f in (XOR3, NEQ, from_matrix(Fraction(1, 2), 1, 1, Fraction(1, 2))):
        w = extract_nonlsm_binary(f)
        assert 1 <= w.k <= 4
        t = w.table
        assert t.arity == 2 and t[(0, 0)] * t[(1, 1)] < t[(0, 1)] * t[(1, 0)]
    with pytest.raises(PreconditionError):
        extract_nonlsm_binary(IMP)


# --- parity and Ising ----------------------------------------------------------------

def test_oplus3_normalize():
    rep = oplus3_normalize(8 * XOR3)
    assert rep.normalized == XOR3
    assert rep.u0.exact() is not None and rep.u1.exact() is not None
    rep = oplus3_normalize(XOR3)
    assert rep.u0.exact() == 1 and rep.u1.exact() == 1


def test_radical():
    assert Radical(Fraction(1, 64), 6).exact() == Fraction(1, 2)
    assert Radical(Fraction(2), 2).exact() is None
    assert abs(float(Radical(Fraction(2), 2)) - 2 ** 0.5) < 1e-12


def test_oplus3_downstream():
    psi, env = oplus3_downstream()
    assert evaluate(psi, env).values == (1, 2, 2, 1)


def test_ising_examples():
    m = [[1, 1], [1, 1]]
    red = ising_reduction(m, 3)
    assert ising_partition_brute_force(m, 3) == 20
    assert red.scale == 16
    from pbclone.formula import partition_function
    assert partition_function(red.instance, red.env) == Fraction(5, 4)
    # a zero column contributes a factor y in every configuration
    m0 = [[1, 0], [1, 0]]
    assert ising_partition_brute_force(m0, 3) == 3 * ising_partition_brute_force([[1], [1]], 3)


def test_ising_random():
    assert ising(trials=100, seed=4).passed


# --- weights ---------------------------------------------------------------------------

def test_synth_unary_routes():
    assert evaluate(synth_unary((Fraction(3, 8), Fraction(5, 8)), "IMP")).values == \
        (Fraction(3, 8), Fraction(5, 8))
    assert evaluate(synth_unary((Fraction(1, 4), Fraction(3, 4)), "OR")).values == \
        (Fraction(1, 4), Fraction(3, 4))
    assert evaluate(synth_unary((Fraction(3, 4), Fraction(1, 4)), "NAND")).values == \
        (Fraction(3, 4), Fraction(1, 4))
    assert evaluate(synth_unary((1, 1), "IMP")).values == (1, 1)
    with pytest.raises(PreconditionError):
        synth_unary((Fraction(1, 3), 1))
    with pytest.raises(PreconditionError):
        synth_unary((Fraction(3, 4), Fraction(1, 4)), "OR")


def test_count_and_multiple_instances():
    def z(inst):
        return pruned_evaluate(PpsFormula((), inst.variables, inst.atoms)).values[0]
    for a in range(1, 6):
        for ell in range(6):
            assert z(multiple_instance(a, ell)) == a * 2 ** ell - a + 1
    for v in range(1, 40):
        assert z(count_instance(v)) == v
    assert brute_force_partition(multiple_instance(3, 2)) == 10


def test_shift_monotone_examples():
    r = shift_monotone((3, 1), (2, 1))
    assert r.k == 2 and r.h_prime.values == (Fraction(3, 4), 1)
    assert shift_monotone((1, 3), (2, 1)).k == 0
    with pytest.raises(PreconditionError):
        shift_monotone((3, 1), (1, 1))


def test_shift_plan_meets_eps():
    r = shift_monotone((3, Fraction(1, 3)), (2, 1))
    for eps in EPS_GRID[:2]:
        assert r.plan.error(eps) < eps
