"""Randomized regression under Orlicz and symmetric norms.

Two pipelines:

* :func:`orlicz_regression` -- leverage-score row sampling, giving a
  (1+eps)-approximate minimiser of ||Ax - b||_G;
* :func:`symnorm_regression` -- one SymSketch embedding into l2 followed by
  a small least-squares solve.
"""
from ._backend import available as available_backends
from ._backend import kernels, set_backend, use_backend
from .diagnostics import DistortionReport, empirical_mmc, estimate_median, measure_distortion
from .errors import DimensionError, InputError, NormSketchError, NumericalError, RankDeficientError
from .exact import exact_orlicz, exact_regression
from .matrix import as_csr, augment, estimate_row_norms, least_squares_solve, qr_decompose, spmv
from .norms import (
    Lp,
    MaxMix,
    Orlicz,
    OrliczFunction,
    SampleWeights,
    SumMix,
    SymmetricNorm,
    TopK,
    absolute,
    eval_symmetric_norm,
    fair,
    from_callbacks,
    huber,
    l1l2,
    level_weight,
    orlicz_norm,
    power,
    square,
    weighted_orlicz_norm,
)
from .orlicz import (
    ConditionedBasis,
    LeverageScores,
    RegressionSolution,
    orlicz_leverage_scores,
    orlicz_regression,
    sample_weights,
    solve_weighted_orlicz,
    well_conditioned_basis,
)
from .sketch import (
    CountSketchOp,
    GaussianOp,
    SymSketch,
    apply_composed,
    apply_countsketch,
    apply_gaussian,
    apply_symsketch,
    build_composed,
    build_symsketch,
)
from .symnorm import symnorm_regression

__version__ = "0.1.0"
