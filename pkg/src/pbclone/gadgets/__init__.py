"""Executable constructions: binary-case witnesses, universality of OR,
threshold factors, parity gadgets and unary weight synthesis."""

from .binary import (BinaryWitness, Case, CloneCase, binary_witness, classify_binary,
                     neq_from_or, neq_plan_from_or)
from .lsm import (ChiFactor, Lsm3Decomposition, NonLsmWitness, chi_builder,
                  extract_nonlsm_binary, h_gadget, h_power, lsm3_decompose, topkis_lift)
from .parity import (IsingReduction, Oplus3Report, ising_partition_brute_force,
                     ising_reduction, oplus3_downstream, oplus3_normalize)
from .plan import Gadget, GadgetPlan, Radical, least_power_below
from .universal import OrStages, or_universal, or_universal_stages
from .weights import (ShiftResult, constant_formula, count_instance, multiple_instance,
                      shift_monotone, synth_unary, truncate)

__all__ = [
    "BinaryWitness", "Case", "ChiFactor", "CloneCase", "Gadget", "GadgetPlan",
    "IsingReduction", "Lsm3Decomposition", "NonLsmWitness", "Oplus3Report", "OrStages",
    "Radical", "ShiftResult", "binary_witness", "chi_builder", "classify_binary",
    "constant_formula", "count_instance", "extract_nonlsm_binary", "h_gadget", "h_power",
    "ising_partition_brute_force", "ising_reduction", "least_power_below", "lsm3_decompose",
    "multiple_instance", "neq_from_or", "neq_plan_from_or", "oplus3_downstream",
    "oplus3_normalize", "or_universal", "or_universal_stages", "shift_monotone",
    "synth_unary", "topkis_lift", "truncate",
]
