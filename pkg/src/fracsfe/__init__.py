"""Ground states of fractional scalar field equations on a periodic box.

Solves ``(-Delta + a)^s u = f(u)`` with ``0 < s <= 1`` and ``a >= 0`` by
Fourier pseudospectral discretization and descent on the dilation-augmented
energy.
"""
from .errors import (
    BadCaseClassification,
    BoxTooSmall,
    ConditionF3Violated,
    FormatError,
    FracSFEError,
    GridMismatch,
    IncompatibleGrid,
    NoBracket,
    NonRealResult,
    NoPositivePotential,
    NotConverged,
    NoZeroAtZeta,
    ParseError,
    StepUnderflow,
    SupportOverflow,
    ValidationError,
)
from .functionals import (
    AugmentedPoint,
    EnergyBreakdown,
    FiberModel,
    augmented_energy,
    augmented_gradient,
    energy,
    pde_residual_norm,
    pohozaev,
    potential,
)
from .io import load_field, save_field
from .nonlinearity import (
    MassCase,
    NonlinearitySpec,
    classify_case,
    f_eval,
    F_eval,
    find_zeta1,
    modify_eps,
    split_pm,
    truncate_above,
)
from .solver import (
    SolutionReport,
    SolverConfig,
    certify,
    descent_step,
    fibering_gap,
    multi_start_search,
    nodal_seed,
    optimal_dilation,
    solve_ground_state,
    solve_nodal,
    solve_with_continuation,
)
from .spectral import (
    Field,
    FracParams,
    Grid,
    Spectrum,
    apply_fractional,
    decays_in_shell,
    dilate_resample,
    ds_seminorm_sq,
    forward_transform,
    hsa_norm_sq,
    inverse_transform,
    scaled_hsa_norm_sq,
)
from .symmetry import (
    NO_SYMMETRY,
    RADIAL,
    SymmetryClass,
    SymmetryKind,
    antisymmetry_defect,
    build_block_tent,
    choose_tent_radius,
    project,
    radial_defect,
    schwarz_rearrange,
)

__version__ = "0.1.0"
