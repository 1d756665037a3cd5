"""Operators diagonalized by discrete orthonormal expansions: local spectra,
local spectral radii and resolvents for the torus, Jacobi, Hermite and
Laguerre families."""
from .bases import (BasisFamily, Custom, Hermite, Jacobi, Laguerre, Torus, WeightSpec,
                    basis_norm_sequence, eig_map, eval_basis, jacobi_sup_bound)
from .core import (CoefficientSequence, EigenvalueMap, IndexSet, SupportSet, apply_power,
                   neumann_partial_sum, resolvent_coeffs, resolvent_derivative_coeffs, support)
from .errors import (AccuracyError, AdmissibilityError, ConfigError, DomainError, MarginError,
                     NumericalError, ParameterError, PowerOverflowError, QuadratureError,
                     ResolutionError, SingularResolventError, SpecDiagError, ZeroShiftError)
from .norms import LogNorm, basis_function_norm, laguerre_condition, lp_norm
from .oracle import (FiniteDifferenceStencil, apply_operator_grid, crosscheck_eigenrelation,
                     fornberg_weights, operator_function)
from .quadrature import QuadratureRule, composite_rule, family_rule, gauss_rule
from .spectral import (SpectralReport, local_spectrum, radius_via_iterates, radius_via_support,
                       svep_probe, verify_lsrf, verify_resolvent)
from .transforms import (DecayReport, GridFunction, SmoothFunction, analyze, coefficient_function,
                         decay_report, synthesize)

__version__ = "0.1.0"
