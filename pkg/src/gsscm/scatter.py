"""The generalized spatial sign covariance matrix and related matrix utilities."""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .errors import (
    DegenerateScatterError,
    InvalidMatrixError,
    SampleTooSmallError,
    SingularScatterError,
)
from .location import as_dataset, kstep_lts, spatial_median
from .radial import Cutoffs, RadialMethod, compute_cutoffs, sample_weights, xi
from .rng import DEFAULT_SEED, child_rng

EIG_FLOOR = 1e-10


@dataclass(frozen=True)
class ScatterEstimate:
    matrix: np.ndarray
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    location: np.ndarray
    method: RadialMethod
    cutoffs: Cutoffs | None
    weights: np.ndarray = field(repr=False, default=None)

    @property
    def p(self) -> int:
        return self.matrix.shape[0]


def eigendecompose(S, tol: float = 1e-10):
    """Spectral decomposition sorted by decreasing eigenvalue.

    Each eigenvector is signed so that its largest-magnitude entry is positive
    (the first such entry on ties).
    """
    S = np.asarray(S, dtype=float)
    if S.ndim != 2 or S.shape[0] != S.shape[1]:
        raise InvalidMatrixError(f"expected a square matrix, got shape {S.shape}")
    scale = max(float(np.max(np.abs(S))), np.finfo(float).tiny) if S.size else 1.0
    if np.max(np.abs(S - S.T), initial=0.0) > tol * scale:
        raise InvalidMatrixError("matrix is not symmetric")
    vals, vecs = np.linalg.eigh(0.5 * (S + S.T))
    order = np.argsort(vals)[::-1]
    vals, vecs = vals[order], vecs[:, order]
    lead = np.argmax(np.abs(vecs), axis=0)
    signs = np.sign(vecs[lead, np.arange(vecs.shape[1])])
    signs[signs == 0] = 1.0
    return vals, vecs * signs


def _resolve_location(X, location, k):
    if isinstance(location, str):
        mode = location.lower()
        if mode in ("lts", "kstep_lts"):
            return kstep_lts(X, k=k).center
        if mode in ("spatial", "spatial_median"):
            return spatial_median(X).center
        if mode == "mean":
            return X.mean(axis=0)
        raise ValueError(f"unknown location mode {location!r}")
    center = np.asarray(location, dtype=float).ravel()
    if center.shape != (X.shape[1],):
        raise ValueError(f"fixed location has length {center.size}, data has {X.shape[1]} columns")
    return center


def _finish(M, center, method, cut, w):
    M = 0.5 * (M + M.T)
    if not np.any(M):
        raise DegenerateScatterError("all observations received zero weight")
    vals, vecs = eigendecompose(M)
    floor = EIG_FLOOR * max(1.0, float(vals[0]))
    if vals[-1] < -floor:
        raise DegenerateScatterError(f"scatter matrix has a negative eigenvalue {vals[-1]:.3e}")
    vals = np.where(vals < 0, 0.0, vals)
    return ScatterEstimate(M, vals, vecs, center, method, cut, w)


def weighted_scatter(centered, method, p=None):
    """GSSCM of already centred rows. Returns (matrix, cutoffs, weights)."""
    method = RadialMethod.parse(method)
    n, dim = centered.shape
    p = dim if p is None else p
    d = np.linalg.norm(centered, axis=1)
    if method.uses_cutoffs and n < p + 1:
        raise SampleTooSmallError(f"{method} needs at least p+1 = {p + 1} observations, got n = {n}")
    w, cut = sample_weights(method, d, p)
    G = centered * w[:, None]
    return G.T @ G / n, cut, w


def gsscm(X, method="winsor", location="lts", k=5) -> ScatterEstimate:
    """Generalized spatial sign covariance matrix.

    Parameters
    ----------
    X : array of shape (n, p)
    method : RadialMethod or its name
    location : "lts" (k-step LTS), "spatial", "mean", or a fixed p-vector
    k : number of C-steps for the LTS location
    """
    X = as_dataset(X)
    method = RadialMethod.parse(method)
    n, p = X.shape
    if n < 2:
        raise SampleTooSmallError(f"need at least 2 observations, got {n}")
    if method.uses_cutoffs and n < p + 1:
        raise SampleTooSmallError(f"{method} needs at least p+1 = {p + 1} observations, got n = {n}")
    center = _resolve_location(X, location, k)
    M, cut, w = weighted_scatter(X - center, method)
    return _finish(M, center, method, cut, w)


def pairwise_differences(X) -> np.ndarray:
    X = as_dataset(X)
    i, j = np.triu_indices(X.shape[0], k=1)
    return X[i] - X[j]


def symmetrized_gsscm(X, method="winsor") -> ScatterEstimate:
    """GSSCM of the n(n-1)/2 pairwise differences, centred at zero."""
    X = as_dataset(X)
    method = RadialMethod.parse(method)
    if X.shape[0] < 2:
        raise SampleTooSmallError("symmetrization needs at least 2 observations")
    D = pairwise_differences(X)
    p = X.shape[1]
    if method.uses_cutoffs and D.shape[0] < p + 1:
        raise SampleTooSmallError(
            f"{method} needs at least p+1 = {p + 1} pairwise differences, got {D.shape[0]}"
        )
    M, cut, w = weighted_scatter(D, method)
    return _finish(M, np.zeros(p), method, cut, w)


def _matrix_of(S):
    return S.matrix if isinstance(S, ScatterEstimate) else np.asarray(S, dtype=float)


def shape(S) -> np.ndarray:
    """Scatter normalised to determinant one."""
    M = _matrix_of(S)
    sign, logdet = np.linalg.slogdet(M)
    if sign <= 0 or not np.isfinite(logdet):
        raise SingularScatterError("shape matrix needs a positive determinant")
    return M * np.exp(-logdet / M.shape[0])


@lru_cache(maxsize=None)
def _exact_factor(method, p):
    from .model import consistency_factor_exact

    return consistency_factor_exact(method, p)


def consistency_factor(method, p: int, mc_samples: int | None = None, seed=DEFAULT_SEED) -> float:
    """E[g_1(X)^2] at X ~ N(0, I_p), the factor making a GSSCM consistent there.

    By default computed by radial quadrature at the exact population cutoffs.
    With ``mc_samples`` it is estimated by Monte Carlo instead: cutoffs from a
    10^6 calibration draw of ||X||, then the expectation from ``mc_samples``
    fresh draws.
    """
    method = RadialMethod.parse(method)
    if p < 1:
        raise ValueError("dimension must be positive")
    if mc_samples is None:
        return _exact_factor(method, int(p))
    if method is RadialMethod.CLASSICAL:
        return 1.0
    if method is RadialMethod.SSCM:
        return 1.0 / p
    calib = np.linalg.norm(child_rng(seed, 0).standard_normal((1_000_000, p)), axis=1)
    cut = compute_cutoffs(calib, p)
    rng = child_rng(seed, 1)
    total, done = 0.0, 0
    while done < mc_samples:
        m = min(1_000_000, mc_samples - done)
        Z = rng.standard_normal((m, p))
        r = np.linalg.norm(Z, axis=1)
        total += float(np.sum((r * xi(method, r, cut)) ** 2)) / p
        done += m
    return total / mc_samples
