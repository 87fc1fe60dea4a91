"""Exact pseudo-Boolean functions, pps-formulas and functional clone gadgets."""

from .core import (EQ, EQ_PERMISSIVE, HALF, IMP, NAND, NEQ, OR, XOR3, FnTable, bar,
                   from_matrix, nullary, pin, star, sum_out, unary)
from .errors import (ArityError, CapacityError, CloneError, FormulaError,
                     NotPermissiveError, ParseError, PreconditionError)
from .formula import (Atom, CspInstance, PpsFormula, brute_force_evaluate, evaluate, flatten,
                      partition_function, pruned_evaluate, tolerance_budget)
from .analysis import is_lsm, is_lsm_topkis, product_form_test, relation_trichotomy
from .transforms import fourier, in_class_C, in_class_P, mobius
from .classify import ComplexityClass, classify_language, witness_report
from .dsl import Workspace, dumps, load, parse

__version__ = "0.1.0"

__all__ = [
    "EQ", "EQ_PERMISSIVE", "HALF", "IMP", "NAND", "NEQ", "OR", "XOR3", "FnTable", "bar",
    "from_matrix", "nullary", "pin", "star", "sum_out", "unary",
    "ArityError", "CapacityError", "CloneError", "FormulaError", "NotPermissiveError",
    "ParseError", "PreconditionError",
    "Atom", "CspInstance", "PpsFormula", "brute_force_evaluate", "evaluate", "flatten",
    "partition_function", "pruned_evaluate", "tolerance_budget",
    "is_lsm", "is_lsm_topkis", "product_form_test", "relation_trichotomy",
    "fourier", "in_class_C", "in_class_P", "mobius",
    "ComplexityClass", "classify_language", "witness_report",
    "Workspace", "dumps", "load", "parse",
]
