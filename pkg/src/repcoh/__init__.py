"""Logical error channels of the repetition code under coherent and stochastic noise."""

from .errchan import (
    ChannelMetrics,
    ErrorParams,
    FailurePrediction,
    PhysicalRates,
    ReducedPTM,
    compose,
    extract_params,
    from_physical_rates,
    metrics,
    pauli_twirl,
    power,
    predict,
    reduced_ptm,
    worst_case_infidelity,
)
from .repcode import (
    LogicalChannel,
    SyndromeClass,
    exact_logical_params,
    logical_reduced_ptm,
    overlap_coefficient,
    syndrome_classes,
)
from .recurse import LevelTrace, coherence_table, recurse_exact, recurse_leading

__version__ = "0.1.0"
