"""Quantum Fisher information bounds for k-nonseparability and k-partite entanglement."""

__version__ = "0.1.0"

from .criteria import BoundSpec, Partition, Verdict, generic_bound, prod_bound, sep_bound, verdict
from .observables import CollectiveObservable, pauli_site
from .qfi import QfiResult, qfi, qfi_dense, qfi_structured, variance
from .states import (
    DensityMatrix,
    DickeNoiseParams,
    GhzMixtureParams,
    PureState,
    StructuredState,
    chi_state,
    densify,
    dicke,
    dicke_noise,
    ghz,
    ghz_mixture,
    ghz_tilde,
)

__all__ = [
    "BoundSpec",
    "CollectiveObservable",
    "DensityMatrix",
    "DickeNoiseParams",
    "GhzMixtureParams",
    "Partition",
    "PureState",
    "QfiResult",
    "StructuredState",
    "Verdict",
    "chi_state",
    "densify",
    "dicke",
    "dicke_noise",
    "generic_bound",
    "ghz",
    "ghz_mixture",
    "ghz_tilde",
    "pauli_site",
    "prod_bound",
    "qfi",
    "qfi_dense",
    "qfi_structured",
    "sep_bound",
    "variance",
    "verdict",
]
