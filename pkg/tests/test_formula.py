from fractions import Fraction

import pytest

from pbclone import randgen
from pbclone.analysis import is_lsm
from pbclone.core import EQ_PERMISSIVE, IMP, FnTable, unary
from pbclone.errors import CapacityError, FormulaError
from pbclone.formula import (Atom, CspInstance, PpsFormula, brute_force_evaluate,
                             brute_force_partition, disjoint_sum, evaluate, flatten,
                             ordinal_sum, partition_function, plan_elimination,
                             power_of_two_instance, pruned_evaluate, reduce_instance,
                             tolerance_budget, unit_instance)
from pbclone.gadgets import binary_witness
from pbclone.verify import nested_case


def path(n, fn="IMP"):
    vs = [f"v{i}" for i in range(n)]
    return CspInstance(vs, [Atom(fn, (vs[i], vs[i + 1])) for i in range(n - 1)])


def test_h_gadget_from_imp():
    psi = PpsFormula(("x1", "x2"), ("y1", "y2"), [
        Atom("IMP", ("y1", "x1")), Atom("IMP", ("y1", "x2")),
        Atom("IMP", ("x1", "y2")), Atom("IMP", ("x2", "y2"))])
    assert evaluate(psi).values == (2, 1, 1, 2)


def test_parity_gadget_table():
    psi = PpsFormula(("x", "z"), ("y",), [Atom("XOR3", ("x", "y", "z")), Atom("U", ("y",))])
    assert evaluate(psi, {"U": unary(1, 2)}).values == (1, 2, 2, 1)


def test_empty_product_counts_bound_assignments():
    assert evaluate(PpsFormula(("x",), ("a", "b", "c"), [])) == FnTable.constant(1, 8)


def test_partition_function_examples():
    assert partition_function(path(1000)) == 1001
    assert partition_function(path(4, "NAND")) == 8
    assert partition_function(unit_instance()) == 2
    assert partition_function(CspInstance([], [])) == 1


def test_imp_path_pattern_small_n():
    for n in range(1, 13):
        assert brute_force_partition(path(n)) == n + 1


def test_evaluate_matches_brute_force(rng):
    for _ in range(200):
        env = randgen.environment(rng)
        psi = randgen.formula(rng, {k: f.arity for k, f in env.items()})
        assert evaluate(psi, env) == brute_force_evaluate(psi, env)


def test_evaluation_order_does_not_matter(rng):
    from pbclone.formula import EliminationPlan
    for _ in range(50):
        env = randgen.environment(rng)
        psi = randgen.formula(rng, {k: f.arity for k, f in env.items()}, max_vars=8)
        default = evaluate(psi, env)
        plan = plan_elimination(psi, env)
        reverse = EliminationPlan(tuple(reversed(plan.order)), plan.arities, plan.cap)
        assert evaluate(psi, env, plan=reverse) == default


def test_pruned_evaluate_matches_brute_force(rng):
    for _ in range(100):
        env = randgen.environment(rng)
        psi = randgen.formula(rng, {k: f.arity for k, f in env.items()}, max_vars=10)
        assert pruned_evaluate(psi, env) == brute_force_evaluate(psi, env)


def test_plan_widths():
    chain = PpsFormula(("a",), ("b", "c", "d"), [Atom("IMP", ("a", "b")), Atom("IMP", ("b", "c")),
                                                  Atom("IMP", ("c", "d"))])
    assert plan_elimination(chain).width <= 2
    vs = [f"v{i}" for i in range(5)]
    clique = PpsFormula((), vs, [Atom("IMP", (a, b)) for i, a in enumerate(vs) for b in vs[i + 1:]])
    assert max(plan_elimination(clique).arities[:1]) == 4
    assert plan_elimination(PpsFormula(("x",), (), [Atom("IMP", ("x", "x"))])).order == ()


def test_capacity_error_on_wide_formulas():
    vs = [f"v{i}" for i in range(8)]
    clique = PpsFormula((), vs, [Atom("NAND", (a, b)) for i, a in enumerate(vs) for b in vs[i + 1:]])
    with pytest.raises(CapacityError):
        evaluate(clique, cap=3)
    assert evaluate(clique).values == (9,)


def test_eq_atoms_are_contracted():
    psi = PpsFormula(("x", "y"), ("z",), [Atom("EQ", ("x", "z")), Atom("IMP", ("z", "y"))])
    assert evaluate(psi) == IMP


def test_malformed_formulas_are_rejected():
    with pytest.raises(FormulaError):
        evaluate(PpsFormula(("x",), ("x",), []))
    with pytest.raises(FormulaError):
        evaluate(PpsFormula(("x",), (), [Atom("IMP", ("x", "q"))]))


def test_flatten_adds_bound_variables():
    phi = PpsFormula(("a", "b"), ("m1", "m2"), [Atom("IMP", ("a", "m1")), Atom("IMP", ("m1", "m2")),
                                                 Atom("IMP", ("m2", "b"))])
    psi = PpsFormula(("x",), ("y",), [Atom("G", ("x", "y")), Atom("NAND", ("x", "y"))])
    flat = flatten(psi, "G", phi)
    assert len(flat.bound) == len(psi.bound) + len(phi.bound)
    assert evaluate(flat) == evaluate(psi, {"G": evaluate(phi)})


def test_flatten_single_atom_is_substitution():
    phi = PpsFormula(("a", "b"), (), [Atom("NAND", ("b", "a"))])
    psi = PpsFormula(("x", "y"), (), [Atom("G", ("x", "y"))])
    flat = flatten(psi, "G", phi)
    assert flat.bound == () and flat.atoms == (Atom("NAND", ("y", "x")),)


def test_flatten_random_nested(rng):
    for _ in range(100):
        psi, phi, env = nested_case(rng)
        assert evaluate(psi, {**env, "G": evaluate(phi, env)}) == \
            evaluate(flatten(psi, "G", phi), env)


def test_flatten_eq_chains():
    phi = PpsFormula(("a", "b"), ("m",), [Atom("EQ", ("a", "m")), Atom("EQ", ("m", "b"))])
    psi = PpsFormula(("x", "y"), ("z",), [Atom("G", ("x", "z")), Atom("G", ("z", "y")),
                                          Atom("EQP", ("x", "y"))])
    env = {"EQP": EQ_PERMISSIVE}
    assert evaluate(flatten(psi, "G", phi), env) == evaluate(psi, {**env, "G": evaluate(phi)})


def test_tolerance_budget_examples():
    psi = PpsFormula(("x",), (), [Atom("U", ("x",))])
    assert tolerance_budget(psi, {"U": unary(1, 1)}, [0], 1) == Fraction(1, 4)
    psi2 = PpsFormula(("x",), (), [Atom("U", ("x",)), Atom("W", ("x",))])
    env = {"U": unary(1, 1), "W": unary(2, 2)}
    assert tolerance_budget(psi2, env, [0], 1) == Fraction(1, 8)


def test_tolerance_budget_perturbation():
    from pbclone.verify import tolerance
    assert tolerance(trials=60, seed=11).passed


def test_sum_constructions():
    two = power_of_two_instance(1)
    assert partition_function(disjoint_sum(two, two)) == 4
    assert partition_function(ordinal_sum(two, two, "IMP")) == 3
    three = ordinal_sum(ordinal_sum(power_of_two_instance(2, "a"), power_of_two_instance(2, "b")),
                        power_of_two_instance(2, "c"))
    assert brute_force_partition(three) == 10


def test_reduce_instance_exact_plan():
    inst = CspInstance(["a", "b"], [Atom("IMP", ("a", "b"))])
    from pbclone.gadgets.plan import exact_plan
    plan = exact_plan("IMP", IMP, {"J": IMP}, PpsFormula(("x1", "x2"), (), [Atom("J", ("x1", "x2"))]))
    red = reduce_instance(inst, {}, "IMP", plan, Fraction(1, 2))
    assert partition_function(red.instance, red.env) == 3


def test_reduce_instance_through_a_limit_plan():
    # IMP obtained from EQ' by powering, substituted into a small IMP instance
    eps = Fraction(1, 1024)
    inst = CspInstance(["a", "b", "c"], [Atom("IMP", ("a", "b")), Atom("IMP", ("b", "c")),
                                         Atom("W", ("a",))])
    env = {"W": unary(1, 3)}
    plan = binary_witness(EQ_PERMISSIVE).forward
    red = reduce_instance(inst, env, "IMP", plan, eps)
    z = brute_force_partition(inst, env)
    z2 = partition_function(red.instance, red.env)
    assert red.k > 0
    assert abs(z2 - z) / z < eps


def test_reduce_instance_constants_by_hand():
    # one IMP constraint on two variables: m = 1, m' = 0, n = 2
    inst = CspInstance(["a", "b"], [Atom("IMP", ("a", "b"))])
    plan = binary_witness(EQ_PERMISSIVE).forward
    red = reduce_instance(inst, {}, "IMP", plan, Fraction(1, 2))
    c = red.constants
    assert (c["mu_max"], c["mu_min"], c["nu_max"], c["nu_min"]) == (1, 1, 1, 1)
    assert c["A"] == 4 * 4 and c["B"] == 4 and c["C"] == 1
    assert red.eps_prime == Fraction(1, 2) / 4 / 20


def test_lsm_atoms_give_lsm_formulas(rng):
    for _ in range(40):
        env = {f"L{i}": randgen.lsm_permissive(rng, 2) for i in range(3)}
        env["I"] = IMP
        psi = randgen.formula(rng, {k: 2 for k in env}, max_vars=6, max_atoms=6)
        assert is_lsm(evaluate(psi, env))
