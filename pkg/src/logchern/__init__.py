"""Log Chern numbers of arrangements of sections of ruled surfaces, their
log resolutions, and the Chern numbers of p-th root covers."""

from .arrangement import (
    ArrangementSpec,
    ContactPoint,
    ExtensionChoice,
    FiberData,
    InvalidArrangement,
    InvalidChoice,
    admissible_choices,
    classify,
    load_spec,
    tau,
    validate,
)
from .catalog import builtin
from .invariants import LogChernPair, check_inequalities, format_ratio, log_chern_extended, log_chern_partial
from .resolution import build_resolution, chern_of_Y, log_chern_via_graph
from .surface import chern_of_X, converge, sample_solution

__version__ = "0.1.0"

__all__ = [
    "ArrangementSpec",
    "ContactPoint",
    "ExtensionChoice",
    "FiberData",
    "InvalidArrangement",
    "InvalidChoice",
    "LogChernPair",
    "admissible_choices",
    "build_resolution",
    "builtin",
    "check_inequalities",
    "chern_of_X",
    "chern_of_Y",
    "classify",
    "converge",
    "format_ratio",
    "load_spec",
    "log_chern_extended",
    "log_chern_partial",
    "log_chern_via_graph",
    "sample_solution",
    "tau",
    "validate",
]
