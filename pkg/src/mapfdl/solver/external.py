"""Adapter that hands a model to HiGHS through an MPS file.

Only used for cross-checks; ``highspy`` is an optional dependency.
"""
from __future__ import annotations

import importlib.util
import os
import tempfile
import time

import numpy as np

from ..ilp import IlpModel, export_mps
from .bnb import STATUS_OPTIMAL, STATUS_TIMEOUT, IlpSolution, SolverConfig, SolverStats


def highs_available() -> bool:
    return importlib.util.find_spec("highspy") is not None


def solve_mps_text(mps: str, time_limit: float = 60.0) -> tuple[str, float, np.ndarray]:
    """Solve MPS text with HiGHS; returns ``(status, objective, column values)``."""
    import highspy

    fd, path = tempfile.mkstemp(suffix=".mps")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(mps)
        h = highspy.Highs()
        h.setOptionValue("output_flag", False)
        h.setOptionValue("time_limit", float(time_limit))
        h.readModel(path)
        h.run()
        status = h.modelStatusToString(h.getModelStatus())
        info = h.getInfo()
        values = np.array(h.getSolution().col_value)
        return status, float(info.objective_function_value), values
    finally:
        os.unlink(path)


def solve_ilp_external(model: IlpModel, config: SolverConfig = SolverConfig()) -> IlpSolution:
    start = time.perf_counter()
    status, objective, values = solve_mps_text(export_mps(model), config.time_limit)
    stats = SolverStats(wall_time=time.perf_counter() - start)
    if status != "Optimal":
        return IlpSolution(STATUS_TIMEOUT, None, None, stats)
    x = np.rint(values).astype(np.int64) if model.num_vars else np.zeros(0, dtype=np.int64)
    return IlpSolution(STATUS_OPTIMAL, int(round(objective)), x, stats)
