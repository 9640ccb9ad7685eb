"""Entropic (multiplicative) Landweber iteration for nonnegative inverse problems."""

from .grid import Density, Grid, GridFunction, inner, integrate, l1_norm
from .metrics import (
    continuity_constant,
    entropy,
    kl_divergence,
    l1_kl_bound_slack,
    surrogate_D,
)
from .operators import (
    ComplexSpace,
    DenseOperator,
    FourierAccumulator,
    FourierSamplingOperator,
    IntegralKernelOperator,
    RealGridSpace,
    identity_operator,
    make_kernel_operator,
    partition_blocks,
)
from .solvers import (
    APriori,
    Discrepancy,
    IterationRecord,
    MaxIter,
    ModifiedDiscrepancy,
    Problem,
    QuadraticFidelity,
    RunResult,
    SolverAbort,
    SolverConfig,
    SolverState,
    WeightedQuadraticFidelity,
    check_monotonicity,
    em_step,
    entropic_step,
    fit_rate,
    general_fidelity_step,
    projected_landweber_step,
    read_sidecar,
    read_trace,
    run,
    stochastic_entropic_step,
    write_sidecar,
    write_trace,
)

__all__ = [
    "APriori",
    "check_monotonicity",
    "ComplexSpace",
    "continuity_constant",
    "DenseOperator",
    "Density",
    "Discrepancy",
    "em_step",
    "entropic_step",
    "entropy",
    "fit_rate",
    "FourierAccumulator",
    "FourierSamplingOperator",
    "general_fidelity_step",
    "Grid",
    "GridFunction",
    "identity_operator",
    "inner",
    "IntegralKernelOperator",
    "integrate",
    "IterationRecord",
    "kl_divergence",
    "l1_kl_bound_slack",
    "l1_norm",
    "make_kernel_operator",
    "MaxIter",
    "ModifiedDiscrepancy",
    "partition_blocks",
    "Problem",
    "projected_landweber_step",
    "QuadraticFidelity",
    "read_sidecar",
    "read_trace",
    "RealGridSpace",
    "run",
    "RunResult",
    "SolverAbort",
    "SolverConfig",
    "SolverState",
    "stochastic_entropic_step",
    "surrogate_D",
    "WeightedQuadraticFidelity",
    "write_sidecar",
    "write_trace",
]

__version__ = "0.1.0"
