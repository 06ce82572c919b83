"""Projected PCA estimation for Tucker tensor factor models.

Tensor series are numpy arrays of shape (T, p_1, ..., p_K): time first,
then the modes. Modes are numbered from 0 in this package.
"""

import csv
import io

import numpy as np

from . import _tenfac
from ._tenfac import IoError, ResourceError, fold, loading_distance, mode_product, unfold

__all__ = [
    "IoError",
    "ResourceError",
    "benchmark",
    "fit",
    "fold",
    "loading_distance",
    "mode_product",
    "preset",
    "read_tsr",
    "rolling_validate",
    "select_ranks",
    "simulate",
    "unfold",
    "write_tsr",
]


def _to_native(x):
    x = np.asarray(x, dtype=np.float64)
    if x.ndim < 3:
        raise ValueError("expected an array of shape (T, p_1, ..., p_K) with K >= 2")
    return np.moveaxis(x, 0, -1)


def _from_native(a):
    return np.moveaxis(a, -1, 0)


def fit(x, ranks, estimator="pe", tol=1e-6, star_cap=4096, center=False, scale=False):
    """Estimate loadings and factors.

    estimator is one of "ie", "pe", "pe-star" or "iterate:S". Returns a dict
    with "loadings" (list of p_k x r_k arrays), "eigenvalues", "factors" and
    "common" (both shaped like the input, time first) and "iterations".
    """
    out = _tenfac.fit(_to_native(x), list(ranks), estimator, tol, star_cap, center, scale)
    out["factors"] = _from_native(out["factors"])
    out["common"] = _from_native(out["common"])
    return out


def select_ranks(x, method="pe-er", r_max=8, c=None, penalty="mean", sweeps=10, update_from_projected=False):
    """Eigenvalue-ratio selection of the factor numbers ("pe-er" or "ie-er")."""
    return _tenfac.select_ranks(_to_native(x), method, r_max, c, penalty, sweeps, update_from_projected)


def simulate(dims, ranks, T, phi=0.1, psi=0.1, seed=0, rep=0, noise_scale=1.0):
    """Draw one seeded dataset; returns "x", "loadings", "factors" and "common"."""
    out = _tenfac.simulate(list(dims), list(ranks), T, phi, psi, seed, rep, noise_scale)
    for key in ("x", "factors", "common"):
        out[key] = _from_native(out[key])
    return out


def preset(name):
    """Dimensions, ranks, AR coefficients and sample sizes of a named setting."""
    return _tenfac.preset(name)


def rolling_validate(x, ranks, window, period, estimator="pe", tol=1e-6):
    """Rolling out-of-sample reconstruction MSE, one dict per fold."""
    return _tenfac.rolling_validate(_to_native(x), list(ranks), window, period, estimator, tol)


def benchmark(setting, Ts=(), estimators=("ie", "pe"), reps=100, seed=0, threads=0, r_max=0):
    """Monte Carlo comparison on a named setting; one dict per (estimator, mode, T)."""
    text = _tenfac.benchmark(setting, list(Ts), list(estimators), reps, seed, threads, r_max)
    rows = list(csv.DictReader(io.StringIO(text)))
    for row in rows:
        for key in ("mode", "T", "reps"):
            row[key] = int(row[key])
        for key in ("mean_D", "se_D", "mean_MSE", "rank_hit_rate"):
            row[key] = float(row[key])
    return rows


def read_tsr(path):
    return _from_native(_tenfac.read_tsr(str(path)))


def write_tsr(x, path):
    _tenfac.write_tsr(_to_native(x), str(path))
