"""Regression metrics, matching the featurizer pipeline's conventions."""

from __future__ import annotations

import math

import numpy as np


def regression_metrics(y, yhat) -> dict:
    """{"mse", "mape", "r2"}; mape is None when any actual value is zero."""
    ya = np.asarray(y, dtype=np.float64)
    pa = np.asarray(yhat, dtype=np.float64)
    if ya.shape != pa.shape or ya.ndim != 1 or ya.size < 2:
        raise ValueError("metrics expect two equal-length 1-d arrays, n >= 2")
    residuals = ya - pa
    mse = float(np.mean(residuals**2))
    mape = (
        None
        if np.any(ya == 0)
        else float(np.mean(np.abs(residuals / ya)) * 100.0)
    )
    ss_res = float(np.sum(residuals**2))
    ss_tot = float(np.sum((ya - ya.mean()) ** 2))
    if ss_tot == 0:
        r2 = 1.0 if ss_res == 0 else -math.inf
    else:
        r2 = 1.0 - ss_res / ss_tot
    return {"mse": mse, "mape": mape, "r2": r2}
