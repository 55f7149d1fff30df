"""Python front end for the rydnhqc gate simulations."""

from ._rydnhqc import (
    Config,
    ConfigError,
    LayoutError,
    Result,
    ScheduleError,
    __version__,
    average_fidelity,
    controls,
    emit_outputs,
    qs_closed_form,
    run,
    systematic_error_sensitivity,
    target_gate,
)

__all__ = [
    "Config",
    "ConfigError",
    "LayoutError",
    "Result",
    "ScheduleError",
    "__version__",
    "average_fidelity",
    "controls",
    "emit_outputs",
    "qs_closed_form",
    "run",
    "systematic_error_sensitivity",
    "target_gate",
]
