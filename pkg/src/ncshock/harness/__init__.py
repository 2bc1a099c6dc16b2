"""Experiment layer: configurations, runs, diagnostics and studies."""

from .analysis import (ExactRiemann, count_sign_changes, l1_error, locate_jump, resample_to_fixed_grid,
                       shock_positions, spike_diagnostics, transition_cells)
from .config import RunConfig, SchemeName, TrigData, builtin_test
from .runner import RunError, RunResult, Snapshot, run, write_run
from .study import compare, histogram_study

__all__ = [
    "ExactRiemann", "RunConfig", "RunError", "RunResult", "SchemeName", "Snapshot", "TrigData",
    "builtin_test", "compare", "count_sign_changes", "histogram_study", "l1_error", "locate_jump",
    "resample_to_fixed_grid", "run", "shock_positions", "spike_diagnostics", "transition_cells",
    "write_run",
]
