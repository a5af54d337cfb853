"""Coherence of a controlling system A over a target B: classical-quantum
free states, the operations that keep them free, the relative-entropy
monotone Delta_Z, variational bounds on recoverable coherence and a DQC1
simulator."""

__version__ = "0.1.0"

from .states import (DensityMatrix, OrthonormalBasis, Spectrum, dephase, eig_hermitian,
                     fidelity, haar_unitary, partial_trace, random_state, relative_entropy,
                     tensor, von_neumann_entropy)
from .channels import (GoiaProgram, KrausChannel, Povm, apply, controlled_translation,
                       controlled_unitary, is_cq_state, is_incoherent_channel, make_channel,
                       measure_on_B, measure_with_register, postselect, random_goia_program)
from .measures import (additivity_check, coherence_rel_ent, convexity_check, delta_Z,
                       delta_is_min_oracle, monotonicity_check)
from .optimize import (BoundResult, OptimizerConfig, lqicc_lower_bound, min_basis_delta,
                       pure_state_recoverable, upper_bound_report)
from .dqc1 import ProbeSpec, dqc1_exact, dqc1_sample, precision_vs_coherence

__all__ = [
    "__version__",
    "DensityMatrix",
    "OrthonormalBasis",
    "Spectrum",
    "dephase",
    "eig_hermitian",
    "fidelity",
    "haar_unitary",
    "partial_trace",
    "random_state",
    "relative_entropy",
    "tensor",
    "von_neumann_entropy",
    "GoiaProgram",
    "KrausChannel",
    "Povm",
    "apply",
    "controlled_translation",
    "controlled_unitary",
    "is_cq_state",
    "is_incoherent_channel",
    "make_channel",
    "measure_on_B",
    "measure_with_register",
    "postselect",
    "random_goia_program",
    "additivity_check",
    "coherence_rel_ent",
    "convexity_check",
    "delta_Z",
    "delta_is_min_oracle",
    "monotonicity_check",
    "BoundResult",
    "OptimizerConfig",
    "lqicc_lower_bound",
    "min_basis_delta",
    "pure_state_recoverable",
    "upper_bound_report",
    "ProbeSpec",
    "dqc1_exact",
    "dqc1_sample",
    "precision_vs_coherence",
]
