"""Statevector VQE for 1D spin chains: depth scaling of accuracy and entanglement."""

from .statevector import (BipartitionSpectrum, StateVector, apply_cz, apply_ry,
                          half_chain_entropy, init_zero, schmidt_spectrum,
                          von_neumann_entropy)
from .circuit import (CircuitSpec, circuit_from_record, circuit_record,
                      cut_crossing_count, param_count, prepare_state)
from .hamiltonian import (GroundTruth, HamiltonianSpec, apply_h, dense_matrix,
                          energy_expectation, exact_ground)
from .vqe import (AavqeSchedule, OptimizerConfig, VqeResult, XFieldSpec, aavqe,
                  gradient, gradient_adjoint, linear_schedule, minimize, objective)

__all__ = [
    "AavqeSchedule", "BipartitionSpectrum", "CircuitSpec", "GroundTruth",
    "HamiltonianSpec", "OptimizerConfig", "StateVector", "VqeResult",
    "XFieldSpec", "aavqe", "apply_cz", "apply_h", "apply_ry",
    "circuit_from_record", "circuit_record", "cut_crossing_count",
    "dense_matrix", "energy_expectation", "exact_ground", "gradient",
    "gradient_adjoint", "half_chain_entropy", "init_zero", "linear_schedule",
    "minimize", "objective", "param_count", "prepare_state", "schmidt_spectrum",
    "von_neumann_entropy",
]
