"""Steady-state entanglement of a two-qubit autonomous thermal machine."""
from .core import (
    INF, DensityMatrix, ThermalQubit, eigenvalues, kron, partial_trace, thermal_qubit,
    thermal_state, trace_distance, vectorize, devectorize,
)
from .models import (
    DotParams, FluxParams, JumpTerm, Liouvillian, ResetParams, build_hdot, build_h0, build_hint,
    build_liouvillian, dot_liouvillian, dot_rates, flux_liouvillian, flux_rates,
    lindblad_liouvillian, make_params, reset_liouvillian,
)
from .steady import (
    NoConvergence, NonUniqueSteadyState, SteadyStateError, SteadyStateResult, StepSizeTooLarge,
    analytic_reset_steady, evolve, solve_steady,
)
from .analytics import (
    ConcurrenceBreakdown, SweepRecord, concurrence, concurrence_closed_form, heat_current,
    purity, steady_report,
)
from .optimize import (
    OptimizationProblem, OptimizationResult, critical_cold_temperature, maximize_concurrence,
    maximize_over_hot_temperature, threshold_hot_temperature,
)

__version__ = "0.1.0"
