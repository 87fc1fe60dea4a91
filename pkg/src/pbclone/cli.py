"""Command-line front end.

    pbclone eval FILE [--env FILE ...] [--target NAME]
    pbclone analyze FILE [--name NAME]
    pbclone classify PATH ...
    pbclone synth KIND ...
    pbclone verify LEMMA [--n N] [--trials T]

Exit codes: 0 success or property holds, 1 property fails (a witness is
printed), 2 usage, parse or evaluation error.
"""

from __future__ import annotations

import argparse
import inspect
import json
import sys
from decimal import Decimal, localcontext
from fractions import Fraction
from pathlib import Path
from typing import Sequence

from . import core, dsl, verify
from .classify import classify_language, function_report, witness_report
from .core import FnTable
from .errors import CapacityError, CloneError, ParseError
from .formula import (Atom, CspInstance, PpsFormula, evaluate, flatten, partition_function,
                      pruned_evaluate)
from .gadgets import (binary_witness, chi_builder, ising_reduction, lsm3_decompose,
                      or_universal, shift_monotone, synth_unary)
from .gadgets.plan import GadgetPlan

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2
FUNCTION_SUFFIXES = (".pbf", ".fn", ".txt")


class UsageError(Exception):
    pass


# --- helpers -------------------------------------------------------------------

def _fraction(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise UsageError(f"not a rational number: {text!r}") from exc


def _pair(text: str) -> tuple[Fraction, Fraction]:
    parts = text.replace(",", " ").split()
    if len(parts) != 2:
        raise UsageError(f"expected two values, got {text!r}")
    return _fraction(parts[0]), _fraction(parts[1])


def _matrix(text: str) -> list[list[int]]:
    rows = [r.strip() for r in text.replace(";", ",").split(",") if r.strip()]
    if not rows or any(set(r) - {"0", "1"} for r in rows):
        raise UsageError(f"matrix rows must be 0/1 strings, got {text!r}")
    return [[int(c) for c in r] for r in rows]


def render(v: Fraction, precision: int | None) -> str:
    if precision is None:
        return str(v)
    with localcontext() as ctx:
        ctx.prec = max(precision, 1) + 40
        d = Decimal(v.numerator) / Decimal(v.denominator)
        return str(d.quantize(Decimal(1).scaleb(-precision)))


def _pick_function(ws: dsl.Workspace, name: str | None) -> tuple[str, FnTable]:
    if name is not None:
        if name not in ws.functions:
            raise UsageError(f"no function named {name!r}")
        return name, ws.functions[name]
    if not ws.functions:
        raise UsageError("the file defines no function")
    return next(iter(ws.functions.items()))


def _function_paths(paths: Sequence[str]) -> list[Path]:
    out = []
    for p in map(Path, paths):
        if p.is_dir():
            out += sorted(q for q in p.iterdir()
                          if q.is_file() and q.suffix in FUNCTION_SUFFIXES)
        else:
            out.append(p)
    return out


def _load(paths: Sequence[str | Path]) -> dsl.Workspace:
    try:
        return dsl.load(*paths)
    except OSError as exc:
        raise UsageError(str(exc)) from exc


def resolve_references(psi: PpsFormula, formulas: dict[str, PpsFormula],
                       stack: tuple[str, ...] = ()) -> PpsFormula:
    """Inline atoms naming other workspace formulas, innermost first."""
    for name in dict.fromkeys(a.fn for a in psi.atoms):
        if name in formulas:
            if name in stack:
                raise UsageError(f"formula {name!r} refers to itself")
            inner = resolve_references(formulas[name], formulas, stack + (name,))
            psi = flatten(psi, name, inner)
    return psi


def _evaluate_target(obj, ws: dsl.Workspace) -> FnTable:
    env = ws.env()
    if isinstance(obj, CspInstance):
        if not any(a.fn in ws.formulas for a in obj.atoms):
            try:
                return core.nullary(partition_function(obj, env))
            except CapacityError:
                pass
        obj = PpsFormula((), obj.variables, obj.atoms)
    psi = resolve_references(obj, ws.formulas)
    try:
        return evaluate(psi, env)
    except CapacityError:
        return pruned_evaluate(psi, env)


def _print_json(obj) -> None:
    print(json.dumps(obj, indent=2, sort_keys=False))


# --- commands --------------------------------------------------------------------

def cmd_eval(args) -> int:
    ws = _load([args.file])
    extra = _load(args.env) if args.env else dsl.Workspace()
    targets = dict(dsl.iter_targets(ws))
    ws.merge(extra)
    if args.target:
        obj = ws.formulas.get(args.target) or ws.instances.get(args.target)
        if obj is None:
            raise UsageError(f"no formula or instance named {args.target!r}")
        targets = {args.target: obj}
    if not targets:
        raise UsageError("nothing to evaluate: the file defines no formula or instance")
    results = {name: _evaluate_target(obj, ws) for name, obj in targets.items()}
    if args.json:
        _print_json({name: {"arity": f.arity,
                            "values": [render(v, args.precision) for v in f.values]}
                     for name, f in results.items()})
        return EXIT_OK
    for name, f in results.items():
        text = " ".join(render(v, args.precision) for v in f.values)
        print(text if len(results) == 1 else f"{name}: {text}")
    return EXIT_OK


def cmd_analyze(args) -> int:
    ws = _load([args.file])
    if args.name:
        items = [_pick_function(ws, args.name)]
    else:
        items = list(ws.functions.items())
        if not items:
            raise UsageError("the file defines no function")
    reports = [function_report(f, n) for n, f in items]
    _print_json(reports[0] if len(reports) == 1 else {"functions": reports})
    return EXIT_OK


def cmd_classify(args) -> int:
    paths = _function_paths(args.paths)
    ws = _load(paths) if paths else dsl.Workspace()
    if not ws.functions:
        _print_json(witness_report({}))
        return EXIT_OK
    report = witness_report(ws.functions)
    cls = classify_language(list(ws.functions.values()))
    ok = cls.verify(list(ws.functions.values()))
    report["classification"]["verified"] = ok
    if args.json:
        _print_json(report)
    else:
        entry = report["classification"]
        line = entry["class"]
        if "witnessName" in entry:
            line += f" witness={entry['witnessName']}"
        if "pair" in entry:
            line += f" pair={entry['pair']}"
        print(line)
    return EXIT_OK if ok else EXIT_FAIL


# --- synthesis ---------------------------------------------------------------------

def _emit_env(env: dict[str, FnTable]) -> str:
    return "".join(dsl.format_function(n, f) for n, f in env.items()
                   if core.BUILTINS.get(n) != f)


def _emit_plan(name: str, plan: GadgetPlan, eps: Fraction, edit=None) -> str:
    k = plan.schedule(eps)
    psi = plan.formula(k)
    if edit is not None:
        psi = edit(psi)
    return (f"# {plan.name}: {plan.note}\n" if plan.note else f"# {plan.name}\n") + \
        dsl.format_formula(name, psi) + \
        dsl.format_schedule(name, dsl.Schedule(eps, k, plan.exact))


def _rename_functions(psi: PpsFormula, mapping: dict[str, str]) -> PpsFormula:
    atoms = [Atom(mapping.get(a.fn, a.fn), a.scope) for a in psi.atoms]
    return PpsFormula(psi.free, psi.bound, atoms)


def _synth_binary(args) -> tuple[str, dict]:
    name, f = _pick_function(_load([args.file]), args.name)
    w = binary_witness(f)
    fwd_env = {n: g for n, g in w.forward.env.items() if n != "F"}
    # the two directions may reuse a weight name with different tables
    mapping = {n: f"back{n}" for n in w.backward.env if n in fwd_env or n == "F"}
    back_env = {mapping.get(n, n): g for n, g in w.backward.env.items()}
    text = dsl.format_function("F", f) + _emit_env(fwd_env) + _emit_env(back_env)
    text += _emit_plan("forward", w.forward, args.eps)
    text += _emit_plan("backward", w.backward, args.eps,
                       lambda psi: _rename_functions(psi, mapping))
    info = {"function": name, "case": w.case.case.value, "subcase": w.case.subcase,
            "canonical": w.case.canonical,
            "forwardK": w.forward.schedule(args.eps), "backwardK": w.backward.schedule(args.eps)}
    if args.check:
        info["forwardError"] = str(w.forward.error(args.eps))
        info["backwardError"] = str(w.backward.error(args.eps))
    return text, info


def _synth_or_universal(args) -> tuple[str, dict]:
    name, f = _pick_function(_load([args.file]), args.name)
    plan = or_universal(f)
    text = _emit_env(plan.env)
    for stage, psi in plan.stages.items():
        text += dsl.format_formula(stage, psi)
    text += _emit_plan("plan", plan, args.eps)
    info = {"function": name, "k": plan.schedule(args.eps), "exact": plan.exact}
    if args.check:
        info["error"] = str(plan.error(args.eps))
    return text, info


def _synth_chi(args) -> tuple[str, dict]:
    psi, env = chi_builder(args.point, _fraction(args.c), complement=args.complement)
    table = evaluate(psi, env)
    text = _emit_env(env) + dsl.format_formula("chi", psi)
    return text, {"table": [str(v) for v in table.values]}


def _synth_lsm3(args) -> tuple[str, dict]:
    name, f = _pick_function(_load([args.file]), args.name)
    d = lsm3_decompose(f)
    psi, env = d.formula()
    text = _emit_env(env) + dsl.format_formula("decomposition", psi)
    return text, {"function": name, "complemented": d.complemented,
                  "factors": [{"point": list(c.point), "c": str(c.c)} for c in d.factors]}


def _synth_ising(args) -> tuple[str, dict]:
    m = _matrix(args.matrix)
    red = ising_reduction(m, _fraction(args.y))
    text = (f"# Z_Ising = {red.scale} * Z(ising), w = {red.w}\n"
            + _emit_env(red.env) + dsl.format_instance("ising", red.instance))
    return text, {"scale": str(red.scale), "w": str(red.w)}


def _synth_weights(args) -> tuple[str, dict]:
    g = _pair(args.g)
    psi = synth_unary(g, args.base)
    text = dsl.format_formula("weight", psi)
    return text, {"target": [str(v) for v in g], "base": args.base}


def _synth_shift(args) -> tuple[str, dict]:
    res = shift_monotone(_pair(args.h), _pair(args.g), args.base)
    text = _emit_env(res.plan.env) + _emit_plan("shifted", res.plan, args.eps)
    info = {"k": res.k, "hPrime": [str(v) for v in res.h_prime.values]}
    if args.check:
        info["error"] = str(res.plan.error(args.eps))
    return text, info


SYNTH = {
    "binary": _synth_binary,
    "or-universal": _synth_or_universal,
    "chi": _synth_chi,
    "lsm3": _synth_lsm3,
    "ising": _synth_ising,
    "weights": _synth_weights,
    "shift": _synth_shift,
}


def cmd_synth(args) -> int:
    text, info = SYNTH[args.kind](args)
    if args.output:
        Path(args.output).write_text(text, encoding="utf-8")
    if args.json:
        _print_json({**info, "dsl": text})
    elif not args.output:
        sys.stdout.write(text)
    return EXIT_OK


# --- verification ------------------------------------------------------------------

def _run_lemma(name: str, args) -> verify.VerifyResult:
    fn = verify.LEMMAS[name]
    params = inspect.signature(fn).parameters
    kwargs = {}
    for key in ("n", "trials", "seed"):
        value = getattr(args, key)
        if value is not None and key in params:
            kwargs[key] = value
    return fn(**kwargs)


def cmd_verify(args) -> int:
    names = list(verify.LEMMAS) if args.lemma == "all" else [args.lemma]
    results = [_run_lemma(n, args) for n in names]
    if args.json:
        _print_json([r.as_dict() for r in results])
    else:
        for r in results:
            seed = "" if r.seed is None else f" seed={r.seed}"
            detail = "".join(f" {k}={v}" for k, v in r.detail.items())
            print(f"{'PASS' if r.passed else 'FAIL'} {r.name} checked={r.checked}{seed}{detail}")
            if r.counterexample is not None:
                print("counterexample: " + json.dumps(r.counterexample))
    return EXIT_OK if all(r.passed for r in results) else EXIT_FAIL


# --- parser ------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--precision", type=int, default=None,
                        help="render values as decimals with this many digits")
    common.add_argument("--arity-cap", type=int, default=None,
                        help="largest arity of a stored table")
    common.add_argument("--seed", type=int, default=None, help="seed for randomized checks")
    common.add_argument("--json", action="store_true", help="machine-readable output")
    common.add_argument("--threads", type=int, default=1,
                        help="accepted for compatibility; work runs serially")

    parser = argparse.ArgumentParser(prog="pbclone", parents=[common],
                                     description="Pseudo-Boolean functional clone toolkit.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("eval", parents=[common], help="evaluate formulas and instances")
    p.add_argument("file")
    p.add_argument("--env", nargs="*", default=[], help="extra definition files")
    p.add_argument("--target", help="evaluate only this formula or instance")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("analyze", parents=[common], help="JSON report for functions in a file")
    p.add_argument("file")
    p.add_argument("--name")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("classify", parents=[common], help="classify a constraint language")
    p.add_argument("paths", nargs="*", help="function files or directories of them")
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("synth", parents=[common], help="emit a gadget as DSL text")
    p.add_argument("kind", choices=sorted(SYNTH))
    p.add_argument("file", nargs="?", help="function file (binary, or-universal, lsm3)")
    p.add_argument("--name", help="function to use from the file")
    p.add_argument("--eps", type=_fraction, default=Fraction(1, 1024))
    p.add_argument("--point", help="chi: threshold point as a bit string x1 x2 ...")
    p.add_argument("--c", help="chi: value on the upper set")
    p.add_argument("--complement", action="store_true")
    p.add_argument("--matrix", help="ising: rows as 0/1 strings, comma separated")
    p.add_argument("--y", default="3")
    p.add_argument("--g", help="weights/shift: unary G as 'g0,g1'")
    p.add_argument("--h", help="shift: unary H as 'h0,h1'")
    p.add_argument("--base", default=None, help="IMP, OR or NAND")
    p.add_argument("--check", action="store_true", help="also report the exact error")
    p.add_argument("-o", "--output", help="write the DSL text here")
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("verify", parents=[common], help="run an invariant check")
    p.add_argument("lemma", choices=sorted(verify.LEMMAS) + ["all"])
    p.add_argument("--n", type=int, default=None)
    p.add_argument("--trials", type=int, default=None)
    p.set_defaults(func=cmd_verify)
    return parser


_REQUIRED = {
    "binary": ("file",), "or-universal": ("file",), "lsm3": ("file",),
    "chi": ("point", "c"), "ising": ("matrix",), "weights": ("g",), "shift": ("h", "g"),
}
_DEFAULT_BASE = {"weights": "IMP", "shift": "OR"}


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "synth":
        missing = [k for k in _REQUIRED[args.kind] if getattr(args, k) is None]
        if missing:
            parser.error(f"synth {args.kind} needs " + ", ".join(missing))
        if args.base is None:
            args.base = _DEFAULT_BASE.get(args.kind)
    previous = core.arity_cap()
    try:
        if args.arity_cap is not None:
            core.set_arity_cap(args.arity_cap)
        return args.func(args)
    except ParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (UsageError, CloneError, ValueError, ZeroDivisionError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    finally:
        core.set_arity_cap(previous)


if __name__ == "__main__":
    sys.exit(main())
