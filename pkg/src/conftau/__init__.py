"""Moments, tau-function and dispersionless Hirota identities of planar domains."""

from .calculus import F_of_t, SecondDerivatives, Stencil, Times, apply_calD, apply_D, apply_Dbar, fd_first, fd_second, hessian
from .dirichlet import GreenEvaluator, conformal_map_w, green_function, solve_dirichlet
from .errors import (
    ConditioningWarning,
    ConfigError,
    ConftauError,
    ConvergenceError,
    GeometryError,
    QuadratureError,
    TruncationError,
    TruncationWarning,
)
from .field import FieldValue, energy_oracle, field_value, free_energy, free_energy_oracle, phi_tilde
from .geometry import (
    BackgroundPotential,
    DomainShape,
    MomentVector,
    bump_deform,
    compute_moments,
    generalized_moment,
    schwarz_eval,
)
from .hierarchy import HierarchyData, HierarchyFamily, build_hierarchy, residual_canonical, residual_lax_sato, residual_string
from .inverse import SolveOptions, solve_inverse
from .series import LaurentSeries, poisson_bracket, project_parts
from .verify import Base, VerificationReport, default_bases, run_identity, run_suite

__version__ = "0.1.0"
