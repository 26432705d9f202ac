"""Quantum Fisher information, coherence measures, and resource-theory axiom audits."""
from ._accel import USE_NUMBA
from .audit import (AuditReport, NoViolationFound, ViolationWitness, audit_c1, audit_c2a,
                    audit_c2b, audit_c3, counterexample, replay, run_audit,
                    search_max_violation)
from .channels import (KrausChannel, OutcomeEnsemble, apply_channel, build_dephasing,
                       build_permutation_unitary, build_swap_unitary, is_incoherent_kraus,
                       is_incoherent_state, kraus_channel, sample_density_matrix,
                       sample_incoherent_channel, selective_outcomes)
from .errors import CoherenceError
from .linalg import (DensityMatrix, Observable, PureState, Spectrum, eigh, expectation,
                     observable, validate_density, validate_pure)
from .measures import (CoherenceMeasure, EqualSpacingHamiltonian, c_l1, c_rel_ent,
                       equal_spacing_hamiltonian, make_measure, qfi_measure, qfi_pure,
                       qfi_spectral)

__version__ = "0.1.0"
