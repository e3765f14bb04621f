"""Exact simulation of one-way quantum computing on three-qubit (CCZ) resources."""

from bowtie_mbqc.errors import BranchImpossibleError, ConfigurationError, PreconditionError
from bowtie_mbqc.qcore import (
    MeasurementRecord,
    PauliBasis,
    StateVector,
    apply_ccz,
    apply_cz,
    apply_single,
    fidelity,
    is_product,
    measure,
    prepare_product,
)
from bowtie_mbqc.frame import ByproductFrame

__all__ = [
    "BranchImpossibleError",
    "ByproductFrame",
    "ConfigurationError",
    "MeasurementRecord",
    "PauliBasis",
    "PreconditionError",
    "StateVector",
    "apply_ccz",
    "apply_cz",
    "apply_single",
    "fidelity",
    "is_product",
    "measure",
    "prepare_product",
]

__version__ = "0.1.0"
