"""Desk-scale numerics for mollified moments of Dirichlet L-functions at s = 1/2."""

__version__ = "0.1.0"

from ._kernels import BACKEND
from .characters import CharacterSet, enumerate_characters, epsilon_chi, even_orthogonality, phi_star
from .expsums import di_quintuple_sum, kloosterman, ramanujan, reciprocity_defect
from .lvalue import KernelConfig, lvalue_direct, lvalue_sq_afe, z_kernel
from .mollifier import MollifierSpec, PolySpec, lambda_coeff
from .moments import build_modulus_set, census, cs_lower_bound, evaluate
from .optimizer import c_eta, nv_ratio, optimize, sandwich_value, theta_max
from .weights import WeightConfig, fourier_b, phi_split, validate_config

__all__ = [
    "__version__",
    "BACKEND",
    "CharacterSet",
    "enumerate_characters",
    "epsilon_chi",
    "even_orthogonality",
    "phi_star",
    "di_quintuple_sum",
    "kloosterman",
    "ramanujan",
    "reciprocity_defect",
    "KernelConfig",
    "lvalue_direct",
    "lvalue_sq_afe",
    "z_kernel",
    "MollifierSpec",
    "PolySpec",
    "lambda_coeff",
    "build_modulus_set",
    "census",
    "cs_lower_bound",
    "evaluate",
    "c_eta",
    "nv_ratio",
    "optimize",
    "sandwich_value",
    "theta_max",
    "WeightConfig",
    "fourier_b",
    "phi_split",
    "validate_config",
]
