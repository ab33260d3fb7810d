"""Darboux transformations for two-level systems: exact seeds, new solvable
potentials, and a residual-based verification harness."""
from .closed_forms import (
    Case1Params,
    Case2Params,
    Case3Params,
    case1_alpha_beta,
    case1_match,
    case1_pair,
    case1_poles,
    case1_potential,
    case2_alpha_beta,
    case2_pair,
    case2_potential,
    case3_alpha_beta,
    case3_pair,
    case3_potential,
)
from .darboux import (
    ChainResult,
    DarbouxPair,
    alpha_beta_from_p,
    conjugate_spinor,
    darboux_chain,
    mu_from_alpha_beta,
    p_vector,
    pair_from_solution,
    transform_spinor,
    transform_spinor_p_form,
    transformed_potential,
)
from .errors import DarbouxError
from .hypergeom import Hyp2F1Params, gauss_2f1, hyp2f1
from .numerics import TimeGrid, Trajectory, finite_difference, grid_derivative, rk_integrate
from .seeds import (
    ConstantSeedParams,
    TanhSeedParams,
    constant_seed,
    constant_seed_real,
    tanh_seed_general,
    tanh_seed_real,
)
from .system import (
    Case1,
    Case2,
    Case3,
    Constant,
    Custom,
    Sech,
    Tabulated,
    TanhStep,
    TwoLevelSystem,
    potential_eval,
    residual,
    residual_profile,
    spinor,
    zs_to_two_level,
)
from .verify import CheckReport, Discrepancy

__version__ = "0.1.0"
