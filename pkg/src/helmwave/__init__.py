"""Helmholtz eigenmodes, RBF wavelet series and transient solvers on point clouds."""
from .bkm_eigen import Eigenpair, Spectrum, eigen_algebraic, eigen_scan, eigenfunction_eval, load_spectrum, save_spectrum
from .exceptions import (
    ConditioningError,
    ConfigError,
    DomainError,
    EmptyDomainError,
    GeometryError,
    HelmwaveError,
    ResonanceError,
    SingularityError,
    UnsupportedFeatureError,
    UnsupportedOrderError,
)
from .geometry import (
    BoundaryCondition,
    Domain,
    QuadratureRule,
    ball_domain,
    build_domain,
    disk_domain,
    domain_quadrature,
    interval_domain,
    load_geometry,
    rectangle_domain,
)
from .special_fn import KernelKind, KernelSpec, general_solution, modified_kernel
from .transform import TransformField, forward_transform, helmholtz_property_check, inverse_transform
from .transient_solver import (
    EquationSpec,
    TransientSolution,
    evaluate_solution,
    fit_initial_conditions,
    lift_inhomogeneous,
    solve_transient,
    temporal_modes,
)
from .wavelet_series import (
    SeriesExpansion,
    WaveletBasis,
    admissibility_constant,
    build_basis,
    evaluate_series,
    expand_collocation,
    expand_direct,
)

__version__ = "0.1.0"
