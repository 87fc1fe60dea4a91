"""Approximation-complexity classification of finite constraint languages.

The decision structure is: product form for every function gives an FPRAS;
otherwise a non-lsm function makes the problem as hard as #SAT; otherwise
the problem is #BIS-hard.  Outputs are claims under that theorem together
with witnesses that re-verify through :mod:`pbclone.analysis`.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Mapping, Sequence

from . import analysis, transforms
from .core import FnTable
from .gadgets.binary import classify_binary


class ComplexityClass(Enum):
    ProductForm_FPRAS = "ProductForm_FPRAS"
    BISHard = "BISHard"
    SATHard = "SATHard"


@dataclass(frozen=True)
class Classification:
    kind: ComplexityClass
    certificates: tuple[analysis.ProductFormCertificate, ...] = ()
    witness_index: int | None = None
    witness: FnTable | None = None
    pair: tuple[tuple[int, ...], tuple[int, ...]] | None = None
    notes: tuple[str, ...] = field(default_factory=tuple)

    def verify(self, language: Sequence[FnTable]) -> bool:
        """Re-check the witnesses against the language."""
        if self.kind is ComplexityClass.ProductForm_FPRAS:
            return (len(self.certificates) == len(language)
                    and all(c.reconstruct() == f for c, f in zip(self.certificates, language)))
        f = language[self.witness_index]
        if self.kind is ComplexityClass.SATHard:
            x, y = self.pair
            join = tuple(a | b for a, b in zip(x, y))
            meet = tuple(a & b for a, b in zip(x, y))
            return f[join] * f[meet] < f[x] * f[y]
        return not analysis.product_form_test(f) and bool(analysis.is_lsm(f))


_NOTES = (
    "classes are claims under the classification theorem for conservative languages",
    "the finite set of unary weights required by the theorem is not synthesised",
)


def classify_language(language: Sequence[FnTable]) -> Classification:
    if not language:
        raise ValueError("the language must be nonempty")
    results = [analysis.product_form_test(f) for f in language]
    if all(results):
        return Classification(ComplexityClass.ProductForm_FPRAS,
                              tuple(r.certificate for r in results), notes=_NOTES)
    for i, f in enumerate(language):
        lsm = analysis.is_lsm(f)
        if not lsm:
            return Classification(ComplexityClass.SATHard, witness_index=i, witness=f,
                                  pair=lsm.pair, notes=_NOTES)
    i = next(i for i, r in enumerate(results) if not r)
    return Classification(ComplexityClass.BISHard, witness_index=i, witness=language[i],
                          notes=_NOTES)


# --- reports -------------------------------------------------------------------

REFS = {
    "lsm": ["lattice inequality F(x or y) F(x and y) >= F(x) F(y)"],
    "productForm": ["clone of NEQ and unary weights"],
    "inP": ["nonnegative Fourier spectrum"],
    "inC": ["every pinning G has G* with nonnegative spectrum"],
    "binaryCase": ["five-case lemma for binary functions"],
    "classification": ["trichotomy for conservative constraint languages"],
}


def _frac(v: Fraction) -> str:
    return str(v)


def _point(p) -> list[int]:
    return list(p)


def function_report(f: FnTable, name: str | None = None) -> dict:
    """JSON-ready record of the per-function analyses."""
    out: dict = {"name": name, "arity": f.arity, "values": [_frac(v) for v in f.values]}
    lsm = analysis.is_lsm(f)
    out["lsm"] = lsm.holds
    if not lsm.holds:
        out["lsmPair"] = [_point(p) for p in lsm.pair]
    pf = analysis.product_form_test(f)
    out["productForm"] = bool(pf)
    if not pf:
        out["productFormFailure"] = pf.failure
    p = transforms.in_class_P(f)
    out["inP"] = p.holds
    if not p.holds:
        out["inPWitness"] = {"point": _point(p.mask), "value": _frac(p.value)}
    c = transforms.in_class_C(f)
    out["inC"] = c.holds
    if not c.holds:
        out["inCWitness"] = {"pinning": {str(k): v for k, v in c.pinning.items()},
                             "point": _point(c.mask), "value": _frac(c.value)}
    if f.arity == 2:
        cc = classify_binary(f)
        out["binaryCase"] = {"case": cc.case.value, "subcase": cc.subcase,
                             "transposed": cc.transposed,
                             "alpha": None if cc.alpha is None else _frac(cc.alpha),
                             "canonical": cc.canonical}
    out["refs"] = {k: v for k, v in REFS.items() if k in out}
    return out


def witness_report(language: Sequence[FnTable] | Mapping[str, FnTable]) -> dict:
    if isinstance(language, Mapping):
        items = list(language.items())
    else:
        items = [(None, f) for f in language]
    if not items:
        return {}
    tables = [f for _, f in items]
    report = {"functions": [function_report(f, n) for n, f in items]}
    cls = classify_language(tables)
    entry: dict = {"class": cls.kind.value, "notes": list(cls.notes),
                   "refs": REFS["classification"]}
    if cls.witness_index is not None:
        entry["witnessIndex"] = cls.witness_index
        entry["witnessName"] = items[cls.witness_index][0]
    if cls.pair is not None:
        entry["pair"] = [_point(p) for p in cls.pair]
    if cls.certificates:
        entry["certificates"] = [_certificate_json(c) for c in cls.certificates]
    report["classification"] = entry
    return report


def _certificate_json(c: analysis.ProductFormCertificate) -> dict:
    return {
        "arity": c.arity,
        "pins": {str(k): v for k, v in c.pins.items()},
        "classes": [{"rep": rep, "members": [list(m) for m in members]}
                    for rep, members in c.classes],
        "weights": [[_frac(a), _frac(b)] for a, b in c.weights],
        "constant": _frac(c.constant),
    }
