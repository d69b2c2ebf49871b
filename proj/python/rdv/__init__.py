"""Minimum-propellant cooperative rendezvous by successive convexification."""

from ._core import (
    ConfigError,
    RunConfig,
    RunRecord,
    Scenario,
    SolverError,
    hohmann_dm,
    load_config,
    load_preset,
    parse_config,
    preset_names,
    solve,
    sweep,
    sweep_columns,
    tf_range,
    transfer_cost,
)

__all__ = [
    "ConfigError",
    "RunConfig",
    "RunRecord",
    "Scenario",
    "SolverError",
    "hohmann_dm",
    "load_config",
    "load_preset",
    "parse_config",
    "preset_names",
    "solve",
    "sweep",
    "sweep_columns",
    "tf_range",
    "transfer_cost",
]
