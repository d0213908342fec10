"""Python bindings for the parea core library."""

import json

from ._core import (
    EnergySpec,
    Field,
    Grid,
    Measure,
    SchemaError,
    SolverConfig,
    SolveResult,
    area_density,
    energy,
    first_variation,
    graph_first_variation,
    graph_second_variation,
    invariant_names,
    line_energy,
    mean_curvature,
    second_variation,
    singular_set,
    solve,
    structural_identity_residual,
    verify_json,
)


def verify(seed=0):
    """Run the invariant suite and return the report as a dict."""
    return json.loads(verify_json(seed))


__all__ = [name for name in dir() if not name.startswith("_") and name not in ("json", "verify_json")]
