"""Topological pressure, equilibrium states and KMS diagnostics for shift
dynamics on quantum spin chains and subshifts of finite type."""

from .algebra import (AlgebraElement, FiniteDimAlgebra, SiteEmbedding,
                      canonical_trace, commutator, embed, from_matrix,
                      herm_eig, herm_exp, log_trace_exp, op_norm)
from .chain import (FiniteVolumePoint, GapSchedule, SpinChainModel,
                    finite_volume_hamiltonian, gapped_pressure,
                    pressure_estimate, pressure_sequence)
from .gibbs import (GibbsState, LocalObservable, energy, entropy,
                    evolve_series, gibbs_state, kms_residual,
                    variational_identity_check)
from .riesz import RieszSpec, decompose, fourier_coefficient, partial_density
from .sft import (MarkovMeasure, RpfData, SftModel, classical_pressure,
                  diagonal_bridge, gibbs_markov_measure, rpf_eigendata,
                  transfer_matrix, variational_optimize)

__version__ = "0.1.0"

__all__ = [
    "AlgebraElement", "FiniteDimAlgebra", "SiteEmbedding", "canonical_trace",
    "commutator", "embed", "from_matrix", "herm_eig", "herm_exp",
    "log_trace_exp", "op_norm",
    "FiniteVolumePoint", "GapSchedule", "SpinChainModel",
    "finite_volume_hamiltonian", "gapped_pressure", "pressure_estimate",
    "pressure_sequence",
    "GibbsState", "LocalObservable", "energy", "entropy", "evolve_series",
    "gibbs_state", "kms_residual", "variational_identity_check",
    "RieszSpec", "decompose", "fourier_coefficient", "partial_density",
    "MarkovMeasure", "RpfData", "SftModel", "classical_pressure",
    "diagonal_bridge", "gibbs_markov_measure", "rpf_eigendata",
    "transfer_matrix", "variational_optimize",
]
