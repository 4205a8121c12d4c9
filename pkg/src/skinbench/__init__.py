"""Arbitrary-precision numerics for non-Hermitian lattice models.

The package builds asymmetric-hopping chain Hamiltonians, diagonalizes them
at a chosen decimal precision, and measures the quantities that expose how
strongly the results depend on that precision: eigenvector condition numbers,
resolvent norms on a grid, perturbed eigenvalue clouds, free-fermion quench
dynamics, and small interacting sectors.
"""

__version__ = "0.1.0"

from .errors import (SkinbenchError, NoConvergence, SingularMatrix, NotHermitian,
                     InfiniteCondition, VanishingOverlap, NoClosedForm,
                     ExceptionalBoundary, DegenerateOrbitals, InsufficientWindow,
                     DimensionTooLarge, FitFailure)
from .mpcore import (PrecisionContext, with_precision, double_equivalent,
                     zeros, eye, from_list, to_scalar, to_complex128,
                     format_scalar, conj_transpose, frobenius_norm,
                     householder_qr, lu_factor, lu_apply, lu_apply_adjoint,
                     lu_solve, matrix_exp)
from .linalg import (SpectrumResult, SchurForm, hessenberg, schur_qr, eig,
                     eig_hermitian, extreme_singular_values, condition_number,
                     first_order_eigenshift)
from .models import (ModelSpec, build, exact_spectrum, exact_wavefunctions,
                     localization_length, exact_condition_number,
                     condition_asymptote, analytical_reference)
from .gaussdyn import (GaussianState, ObservableSeries, SteadyStateMetrics,
                       neel_init, evolve_step, correlation_matrix, measure,
                       run_evolution, steady_state_metrics, propagator_norm_series)
from .pseudospec import (GridSpec, PseudospectrumGrid, PerturbedCloud,
                         thread_count, resolvent_norm_grid, sandwich_check,
                         perturbed_eigencloud)
from .manybody import (ManyBodySpec, FockBasis, fock_basis, build_interacting,
                       weight_span, interacting_condition_closed_form,
                       mb_propagator_norm, disorder_condition_sweep)
from .cli import audit_precision
