"""cdkit: Christoffel-Darboux kernel machinery for OPRL and OPUC.

Measures -> recurrence coefficients -> orthogonal polynomials -> CD kernels,
Gaussian quadrature with Markov-Stieltjes certificates, scaling-limit
experiments (universality, clock spacing), and point-mass measure updates.
"""

from .asymptotics import (ac_set_diagnostic, capacity, christoffel_limit_scan,
                          clock_spacing, equilibrium_cdf, equilibrium_density,
                          kernel_measure, lubinsky_inequality_check,
                          moment_compare, nevai_delta_metric,
                          regularity_index, sinc, universality_scan,
                          zero_counting_measure,
                          zero_histogram_vs_equilibrium)
from .errors import (CdkitError, CoarseMeasureError, ConfluentPointsError,
                     DegreeError, IllConditionedError, InsufficientAtomsError,
                     MeasureError, OverflowFlag)
from .kernels import (ABCMatrices, KernelValue, Route, abc, christoffel,
                      kernel_cd_circle, kernel_cd_real, kernel_diag_circle,
                      kernel_diag_derivative, kernel_diag_real, kernel_direct,
                      minimizer_poly, mixed_kernels)
from .measures import (AtomicMeasure, MomentMatrix, NamedMeasure, SupportKind,
                       add_point_mass, cdf, inner_product, moments)
from .oprl import (JacobiParams, PolyEval, eval_polys, orthonormal_values,
                   second_kind_shift_check, second_kind_values,
                   stieltjes_recurrence)
from .opuc import (CirclePolyEval, VerblunskyParams, circle_values,
                   eval_circle_polys, szego_recurrence)
from .quadrature import (InterlacingReport, MarkovStieltjesBounds,
                         QuadratureRule, TruncatedJacobi, atom_mass_bound,
                         exactness_check, gauss_rule, interlacing_check,
                         kernel_diag_values, markov_stieltjes,
                         markov_stieltjes_interval,
                         spacing_lower_bound_check, zeros_pn, zeros_pn_indexed,
                         zeros_shifted)
from .updates import (GeronimusResult, JacobiPointMassReport, WongResult,
                      geronimus_update, jacobi_pointmass_diffs, wong_update)

__version__ = "0.1.0"
