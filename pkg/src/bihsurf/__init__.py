"""CMC biharmonic flat surfaces in spheres: construction, verification,
periodicity and torus admissibility."""

from .core import (
    Check,
    DomainError,
    ExactnessError,
    VerificationReport,
    rational_sqrt_exact,
)
from .parameters import (
    MiyataData,
    StructureParams,
    canonicalize,
    angle_family_data,
    lift_structure,
    miyata_from_dict,
    rho_max,
    rho_tilde_of,
    s_of_rho,
    structure_params,
    t_of_s,
    validate_miyata,
)
from .immersion import (
    Immersion,
    build,
    extend_dimension,
    from_structure,
    sasahara_data,
    symmetric_weights_data,
)
from .geometry import (
    bitension,
    boruvka_params,
    diagonal_sum_check,
    fd_bitension_oracle,
    fd_partial_table,
    fundamental_forms,
    gaussian_brioschi_fd,
    mean_curvature,
    tension,
    verify_immersion,
)
from .periodicity import (
    Lattice2,
    closing_ratios,
    period_lattice,
    periodic_direction_search,
    same_lattice,
    torus_case_i,
    torus_case_ii,
    torus_exists,
)
from .admissibility import (
    admissible,
    circle_points,
    dual_lattice,
    parse_lattice,
    witness_weights,
)

__all__ = [
    "Check",
    "DomainError",
    "ExactnessError",
    "Immersion",
    "Lattice2",
    "MiyataData",
    "StructureParams",
    "VerificationReport",
    "admissible",
    "bitension",
    "boruvka_params",
    "build",
    "canonicalize",
    "circle_points",
    "closing_ratios",
    "diagonal_sum_check",
    "dual_lattice",
    "extend_dimension",
    "fd_bitension_oracle",
    "fd_partial_table",
    "from_structure",
    "fundamental_forms",
    "gaussian_brioschi_fd",
    "angle_family_data",
    "lift_structure",
    "mean_curvature",
    "miyata_from_dict",
    "parse_lattice",
    "period_lattice",
    "periodic_direction_search",
    "rational_sqrt_exact",
    "rho_max",
    "rho_tilde_of",
    "s_of_rho",
    "same_lattice",
    "sasahara_data",
    "structure_params",
    "symmetric_weights_data",
    "t_of_s",
    "tension",
    "torus_case_i",
    "torus_case_ii",
    "torus_exists",
    "validate_miyata",
    "verify_immersion",
]
