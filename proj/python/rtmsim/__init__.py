"""Two-photon interferometry simulator: Python bindings to the C++ core."""

from ._core import (
    AnalysisError,
    LinalgError,
    MeasurementError,
    SpecError,
    beam_splitter,
    check,
    chsh,
    circuit_unitary,
    coincidence_law,
    joint_probabilities,
    local_coherence,
    marginals,
    partial_trace,
    run_preset,
    sample_events,
    source_density,
)

__all__ = [
    "AnalysisError",
    "LinalgError",
    "MeasurementError",
    "SpecError",
    "beam_splitter",
    "check",
    "chsh",
    "circuit_unitary",
    "coincidence_law",
    "joint_probabilities",
    "local_coherence",
    "marginals",
    "partial_trace",
    "run_preset",
    "sample_events",
    "source_density",
]
