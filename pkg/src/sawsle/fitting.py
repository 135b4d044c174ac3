"""Weighted least squares for the two exponent analyses.

The exponent pair (b, bbar) is fit from log ECDF = b log d0 + bbar log di
over the four threshold grids, with no intercept because the normalization
is pinned by the weighting identity.  The angular slope fit estimates
b - bbar from a log-log regression of the binned weighted angular
expectation against sin(theta) at bin midpoints, with an intercept for the
unknown normalizing constant.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import conformal
from .constants import SAW_EXPONENTS, Exponents
from .estimators import STAT_NAMES, Finalized

#: Grid points whose ECDF is at or below this are dominated by log noise.
MIN_ECDF = 1e-6

#: Minimum weighted effective sample count behind a usable point or bin.
MIN_EFFECTIVE = 10.0


@dataclass
class FitResult:
    coefficients: np.ndarray
    covariance: np.ndarray
    rss: float
    n_used: int
    n_excluded: int

    @property
    def stderr(self) -> np.ndarray:
        return np.sqrt(np.diag(self.covariance))


def wls(predictors, response, sigma) -> FitResult:
    """Minimize sum(((response - predictors @ beta) / sigma)^2).

    The covariance is the inverse normal matrix of the sigma-scaled design;
    a rank-deficient design raises ValueError.
    """
    x = np.atleast_2d(np.asarray(predictors, dtype=float))
    y = np.asarray(response, dtype=float)
    s = np.asarray(sigma, dtype=float)
    if x.shape[0] != y.shape[0] or y.shape != s.shape:
        raise ValueError("predictors, response and sigma must have matching rows")
    if np.any(s <= 0):
        raise ValueError("all sigma values must be positive")
    n, k = x.shape
    if n < k:
        raise ValueError(f"need at least {k} rows, got {n}")
    a = x / s[:, None]
    rhs = y / s
    normal = a.T @ a
    if np.linalg.matrix_rank(normal) < k:
        raise ValueError("singular normal matrix")
    cov = np.linalg.inv(normal)
    beta = cov @ (a.T @ rhs)
    resid = rhs - a @ beta
    return FitResult(
        coefficients=beta,
        covariance=cov,
        rss=float(resid @ resid),
        n_used=n,
        n_excluded=0,
    )


def fit_b_bbar(
    final: Finalized,
    exponents: Exponents = SAW_EXPONENTS,
    intercept: bool = False,
    min_rows: int = 100,
) -> FitResult:
    """Two-parameter exponent fit over all four threshold grids.

    Rows are excluded when the factors are degenerate at the domain edge,
    the ECDF is at most MIN_ECDF, the blocking error is zero or undefined,
    or fewer than MIN_EFFECTIVE effective samples sit below the threshold.
    Sigma for the log response comes from the delta method, stderr / ecdf.
    """
    rows_x = []
    rows_y = []
    rows_s = []
    offered = 0
    for stat in STAT_NAMES:
        ws = final.thresholds[stat]
        offered += len(ws)
        d0, di, _ = conformal.factor_table(stat, ws, exponents)
        ecdf = final.ecdf[stat]
        err = final.ecdf_stderr[stat]
        with np.errstate(divide="ignore", invalid="ignore"):
            keep = (
                np.isfinite(d0)
                & np.isfinite(di)
                & (d0 > 0)
                & (di > 0)
                & (ecdf > MIN_ECDF)
                & np.isfinite(err)
                & (err > 0)
                & (ecdf * final.n_eff >= MIN_EFFECTIVE)
            )
        rows_x.append(np.column_stack((np.log(d0[keep]), np.log(di[keep]))))
        rows_y.append(np.log(ecdf[keep]))
        rows_s.append(err[keep] / ecdf[keep])
    x = np.vstack(rows_x)
    y = np.concatenate(rows_y)
    s = np.concatenate(rows_s)
    if x.shape[0] < min_rows:
        raise ValueError(f"only {x.shape[0]} usable grid points, need {min_rows}")
    if intercept:
        x = np.column_stack((x, np.ones(x.shape[0])))
    result = wls(x, y, s)
    result.n_excluded = offered - x.shape[0]
    return result


def fit_angular_slope(
    final: Finalized,
    exponents: Exponents = SAW_EXPONENTS,
    min_bins: int = 50,
) -> FitResult:
    """Log-log slope of the angular expectation against sin at bin centers.

    Coefficients are (slope, intercept); the slope estimates b - bbar.
    """
    x_log, y_log, s_log, excluded = angular_fit_points(final)
    if x_log.shape[0] < min_bins:
        raise ValueError(f"only {x_log.shape[0]} usable angular bins, need {min_bins}")
    design = np.column_stack((x_log, np.ones(x_log.shape[0])))
    result = wls(design, y_log, s_log)
    result.n_excluded = excluded
    return result


def angular_fit_points(final: Finalized):
    """(log sin(mid), log expectation, sigma, n_excluded) for usable bins."""
    mid = final.ang_mid
    expect = final.ang_expectation
    err = final.ang_stderr
    sin_mid = np.sin(mid)
    with np.errstate(divide="ignore", invalid="ignore"):
        keep = (
            (expect > 0)
            & np.isfinite(err)
            & (err > 0)
            & (final.ang_neff >= MIN_EFFECTIVE)
            & (sin_mid > 0)
        )
    x_log = np.log(sin_mid[keep])
    y_log = np.log(expect[keep])
    s_log = err[keep] / expect[keep]
    return x_log, y_log, s_log, int(len(mid) - keep.sum())
