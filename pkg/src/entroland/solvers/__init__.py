"""Iteration schemes, stopping rules and run diagnostics."""

from .config import SolverConfig, SolverState
from .diagnostics import MonotonicityReport, Violation, check_monotonicity, fit_loglog, fit_rate
from .fidelity import QuadraticFidelity, WeightedQuadraticFidelity
from .runner import METHODS, IterationRecord, Problem, RunResult, run
from .steps import (
    SolverAbort,
    em_step,
    entropic_step,
    general_fidelity_step,
    projected_landweber_step,
    stochastic_entropic_step,
)
from .stopping import APriori, Discrepancy, MaxIter, ModifiedDiscrepancy
from .trace_io import read_sidecar, read_trace, write_sidecar, write_trace

__all__ = [
    "APriori",
    "check_monotonicity",
    "Discrepancy",
    "em_step",
    "entropic_step",
    "fit_loglog",
    "fit_rate",
    "general_fidelity_step",
    "IterationRecord",
    "MaxIter",
    "METHODS",
    "ModifiedDiscrepancy",
    "MonotonicityReport",
    "Problem",
    "projected_landweber_step",
    "QuadraticFidelity",
    "read_sidecar",
    "read_trace",
    "run",
    "RunResult",
    "SolverAbort",
    "SolverConfig",
    "SolverState",
    "stochastic_entropic_step",
    "Violation",
    "WeightedQuadraticFidelity",
    "write_sidecar",
    "write_trace",
]
