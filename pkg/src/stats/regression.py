"""Least-squares line fit with coefficient of determination."""

import numpy as np
from pydantic import BaseModel
from scipy import stats as sps

from src.errors import DegenerateInputError


class FitResult(BaseModel):
    slope: float
    intercept: float
    r_squared: float


def linear_fit(x, y):
    """Fit y = slope * x + intercept; r² = 1 - SSres/SStot."""
    x = np.asarray(x, dtype=np.float64).ravel()
    y = np.asarray(y, dtype=np.float64).ravel()
    if x.shape != y.shape:
        raise DegenerateInputError(f"x and y differ in length ({x.size} vs {y.size})")
    if np.unique(x).size < 2:
        raise DegenerateInputError("linear fit needs at least 2 distinct x values")
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    if ss_tot == 0.0:
        raise DegenerateInputError("linear fit of a constant y has undefined r-squared")
    fit = sps.linregress(x, y)
    residuals = y - (fit.slope * x + fit.intercept)
    r_squared = 1.0 - float(np.sum(residuals**2)) / ss_tot
    return FitResult(
        slope=float(fit.slope),
        intercept=float(fit.intercept),
        r_squared=min(1.0, max(0.0, r_squared)),
    )
