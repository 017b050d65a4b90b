"""Separable low-rank approximation of bivariate functions.

Greedy empirical interpolation is run along x and along y, the resulting
tensor-product interpolant is compressed by an SVD of its collocation
matrix, and every error bound is checked at runtime.
"""

from .diag import DiagnosticsReport, lebesgue_constant, sup_error, verify_bounds
from .eim import (
    Direction,
    DirectionalBasis,
    EimConfig,
    directional_interpolate,
    evaluate_basis,
    run_directional_eim,
)
from .errors import (
    ConfigError,
    DomainError,
    ExprSyntaxError,
    InvalidGrid,
    InvalidRank,
    NumericError,
    SeptensorError,
    UnsupportedOffGrid,
    ZeroFunction,
)
from .expr import eval_expr, parse
from .gridfn import (
    FunctionSource,
    Grid,
    Interval,
    builtin_registry,
    eval_source,
    make_uniform_grid,
    read_tabulated_csv,
)
from .lowrank import LowRankApprox, SvdFactors, evaluate_lowrank, frobenius_tail, svd_decompose, truncate
from .pipeline import RunConfig, decompose, reproduce_paper
from .tensor import TensorInterpolant, build_tensor_interpolant, evaluate_interpolant

__version__ = "0.1.0"
