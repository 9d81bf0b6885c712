"""Inertia security regions over adjustable regional inertia.

Thin wrapper over the compiled core: scenario loading, the analytic
worst-case rate of change of frequency, time-domain cross-checks, point
assessment and the traced-and-decomposed security cells.
"""

from ._risr import (
    Assessment,
    GlobalMax,
    NumericalError,
    ScenarioError,
    SecureCells,
    System,
    assess,
    coi_critical_inertia,
    global_rocof_max,
    load_scenario,
    load_scenario_file,
    rocof_at,
    secure_cells,
    simulated_peak,
)

__all__ = [
    "Assessment",
    "GlobalMax",
    "NumericalError",
    "ScenarioError",
    "SecureCells",
    "System",
    "assess",
    "coi_critical_inertia",
    "global_rocof_max",
    "load_scenario",
    "load_scenario_file",
    "rocof_at",
    "secure_cells",
    "simulated_peak",
]
