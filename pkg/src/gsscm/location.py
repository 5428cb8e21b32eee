"""Robust multivariate location: spatial median and k-step LTS."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ConvergenceError, EmptyInputError


@dataclass(frozen=True)
class LocationEstimate:
    center: np.ndarray
    iterations_used: int
    objective: float
    method: str = "spatial_median"
    # objective value after each iteration, starting point first
    history: tuple = field(default=(), repr=False)


def as_dataset(X) -> np.ndarray:
    X = np.asarray(X, dtype=float)
    if X.ndim == 1:
        X = X[:, None]
    if X.ndim != 2:
        raise ValueError(f"dataset must be a 2-d array, got shape {X.shape}")
    if X.shape[0] == 0:
        raise EmptyInputError("dataset has no rows")
    if not np.all(np.isfinite(X)):
        raise ValueError("dataset contains non-finite values")
    return X


def _sum_dist(X, theta):
    return float(np.linalg.norm(X - theta, axis=1).sum())


def _vertex_is_optimal(X, k):
    """Subgradient test: is data point ``X[k]`` a minimiser of the sum of distances?"""
    diff = X - X[k]
    d = np.linalg.norm(diff, axis=1)
    away = d > 0
    mult = X.shape[0] - int(away.sum())
    if not away.any():
        return True
    pull = (diff[away] / d[away, None]).sum(axis=0)
    return float(np.linalg.norm(pull)) <= mult


def spatial_median(X, tol: float = 1e-10, max_iter: int = 1000) -> LocationEstimate:
    """Geometric median by Weiszfeld iteration with the Vardi-Zhang modification.

    Each iteration also tries a Newton step on the (locally smooth) objective
    and keeps it when it lowers the sum of distances more than the Weiszfeld
    step does; this removes the slow linear convergence near data points.

    The iteration stops when the step is smaller than ``tol`` relative to the
    scale of the problem. Whenever the iterate gets close to a data point the
    subgradient optimality test is run on that point, so minimisers located at
    an observation (the usual slow case for Weiszfeld) are found exactly.
    """
    X = as_dataset(X)
    if tol <= 0:
        raise ValueError("tol must be positive")
    theta = np.median(X, axis=0)
    hist = [_sum_dist(X, theta)]
    checked = set()
    for it in range(1, max_iter + 1):
        diff = X - theta
        d = np.linalg.norm(diff, axis=1)
        scale = max(float(np.linalg.norm(theta)), float(d.mean()), np.finfo(float).tiny)

        k = int(np.argmin(d))
        if k not in checked and d[k] <= 1e-3 * scale:
            checked.add(k)
            if _vertex_is_optimal(X, k):
                new = X[k].copy()
                obj = _sum_dist(X, new)
                if obj <= hist[-1]:
                    hist.append(obj)
                    return LocationEstimate(new, it, obj, "spatial_median", tuple(hist))

        zero = d == 0
        eta = int(zero.sum())
        if eta == X.shape[0]:
            return LocationEstimate(theta, it, 0.0, "spatial_median", tuple(hist))
        w = np.zeros_like(d)
        w[~zero] = 1.0 / d[~zero]
        target = (w[:, None] * X).sum(axis=0) / w.sum()
        if eta:
            pull = (diff[~zero] * w[~zero, None]).sum(axis=0)
            rnorm = float(np.linalg.norm(pull))
            if rnorm <= eta:
                obj = _sum_dist(X, theta)
                return LocationEstimate(theta, it, obj, "spatial_median", tuple(hist))
            frac = eta / rnorm
            new = (1.0 - frac) * target + frac * theta
        else:
            new = target
        obj_new = _sum_dist(X, new)
        if not eta:
            # Newton step on the smooth objective; kept only if it does better
            u = diff / d[:, None]
            H = np.eye(X.shape[1]) * w.sum() - (u * w[:, None]).T @ u
            g = -(u.sum(axis=0))
            try:
                cand = theta - np.linalg.solve(H, g)
            except np.linalg.LinAlgError:
                cand = None
            if cand is not None and np.all(np.isfinite(cand)):
                obj_c = _sum_dist(X, cand)
                if obj_c < obj_new:
                    new, obj_new = cand, obj_c
        step = float(np.linalg.norm(new - theta))
        theta = new
        hist.append(obj_new)
        if step <= tol * scale:
            return LocationEstimate(theta, it, hist[-1], "spatial_median", tuple(hist))
    raise ConvergenceError(
        f"spatial median did not converge in {max_iter} iterations",
        last_iterate=theta,
        iterations=max_iter,
    )


def lts_h(n: int) -> int:
    return (n + 1) // 2


def lts_objective(X, theta) -> float:
    """Sum of the h smallest squared distances to ``theta``, h = floor((n+1)/2)."""
    X = as_dataset(X)
    d2 = ((X - theta) ** 2).sum(axis=1)
    h = lts_h(X.shape[0])
    return float(np.partition(d2, h - 1)[:h].sum())


def _c_step(X, t_prev):
    h = lts_h(X.shape[0])
    d2 = ((X - t_prev) ** 2).sum(axis=1)
    # stable sort: ties at rank h go to the lowest indices
    idx = np.sort(np.argsort(d2, kind="stable")[:h])
    return X[idx].mean(axis=0), idx


def c_step(X, t_prev) -> np.ndarray:
    """Mean of the h = floor((n+1)/2) points closest to ``t_prev``."""
    X = as_dataset(X)
    t_prev = np.asarray(t_prev, dtype=float).reshape(X.shape[1])
    return _c_step(X, t_prev)[0]


def kstep_lts(X, k=5, tol: float = 1e-10, max_iter: int = 1000) -> LocationEstimate:
    """k C-steps started from the spatial median.

    ``k=None`` or ``k=math.inf`` iterates until the selected h-subset repeats.
    The reported objective is the LTS objective at the returned center.
    """
    X = as_dataset(X)
    until_fixed = k is None or (isinstance(k, float) and math.isinf(k))
    if not until_fixed and (int(k) != k or k < 0):
        raise ValueError(f"k must be a nonnegative integer, None or inf; got {k!r}")
    t = spatial_median(X, tol=tol, max_iter=max_iter).center
    hist = [lts_objective(X, t)]
    steps = 0
    prev_idx = None
    limit = max_iter if until_fixed else int(k)
    while steps < limit:
        t_new, idx = _c_step(X, t)
        steps += 1
        t = t_new
        hist.append(lts_objective(X, t))
        if until_fixed:
            if prev_idx is not None and np.array_equal(idx, prev_idx):
                break
            prev_idx = idx
    else:
        if until_fixed:
            raise ConvergenceError(
                f"C-steps did not reach a fixed point in {max_iter} steps",
                last_iterate=t,
                iterations=steps,
            )
    return LocationEstimate(t, steps, hist[-1], "kstep_lts", tuple(hist))
