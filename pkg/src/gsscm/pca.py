"""Principal component analysis on a GSSCM and the PCA outlier map."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import stats

from .errors import DegenerateColumnError
from .location import as_dataset
from .radial import MAD_CONSISTENCY, RadialMethod
from .scatter import gsscm

FLAGS = ("regular", "orthogonal_outlier", "score_outlier", "bad_leverage")
OD_ZERO = 1e-10


def _mad(a, axis=0):
    med = np.median(a, axis=axis, keepdims=True)
    return np.median(np.abs(a - med), axis=axis) * MAD_CONSISTENCY


def standardize(X, mode: str = "robust"):
    """Column-wise standardisation.

    ``robust`` uses the median and the 1.4826-scaled MAD, ``classical`` the
    mean and the sample standard deviation. Returns ``(Z, params)`` with
    ``params`` an array of shape (p, 2) holding (location, scale) per column.
    """
    X = as_dataset(X)
    if mode == "robust":
        loc = np.median(X, axis=0)
        scale = _mad(X)
    elif mode == "classical":
        loc = X.mean(axis=0)
        scale = X.std(axis=0, ddof=1) if X.shape[0] > 1 else np.zeros(X.shape[1])
    else:
        raise ValueError(f"unknown standardisation mode {mode!r}")
    bad = np.flatnonzero(~(scale > 0))
    if bad.size:
        raise DegenerateColumnError(f"column {int(bad[0])} has zero {mode} scale")
    return (X - loc) / scale, np.column_stack([loc, scale])


def unstandardize(Z, params):
    params = np.asarray(params, dtype=float)
    return np.asarray(Z, dtype=float) * params[:, 1] + params[:, 0]


@dataclass(frozen=True)
class PcaModel:
    center: np.ndarray
    loadings: np.ndarray
    eigenvalues: np.ndarray
    method: RadialMethod
    column_standardization: np.ndarray | None
    all_eigenvalues: np.ndarray = None

    @property
    def k(self):
        return self.loadings.shape[1]

    def transform(self, X):
        """Standardised, centred observations z_i."""
        X = as_dataset(X)
        if X.shape[1] != self.loadings.shape[0]:
            raise ValueError(f"data has {X.shape[1]} columns, model expects {self.loadings.shape[0]}")
        if self.column_standardization is not None:
            prm = self.column_standardization
            X = (X - prm[:, 0]) / prm[:, 1]
        return X - self.center


def fit_pca(X, k: int, method="winsor", standardization="auto", location="lts", lts_k=5) -> PcaModel:
    """Fit a PCA subspace spanned by the top-k eigenvectors of a GSSCM.

    ``standardization`` is "robust", "classical", "none" or "auto" (classical
    for the classical covariance, robust otherwise). ``location`` defaults to
    the k-step LTS, except for the classical method where the mean is used.
    """
    X = as_dataset(X)
    method = RadialMethod.parse(method)
    p = X.shape[1]
    if not 1 <= k <= p:
        raise ValueError(f"number of components must be in [1, {p}], got {k}")
    if standardization == "auto":
        standardization = "classical" if method is RadialMethod.CLASSICAL else "robust"
    if standardization == "none":
        Z, params = X, None
    else:
        Z, params = standardize(X, standardization)
    if method is RadialMethod.CLASSICAL and location == "lts":
        location = "mean"
    est = gsscm(Z, method, location=location, k=lts_k)
    return PcaModel(
        center=est.location,
        loadings=est.eigenvectors[:, :k].copy(),
        eigenvalues=est.eigenvalues[:k].copy(),
        method=method,
        column_standardization=params,
        all_eigenvalues=est.eigenvalues.copy(),
    )


def explained_variance(model: PcaModel) -> np.ndarray:
    """Cumulative eigenvalue fractions of the fitted scatter (reporting only)."""
    vals = model.all_eigenvalues
    return np.cumsum(vals) / vals.sum()


def scores(model: PcaModel, X) -> np.ndarray:
    return model.transform(X) @ model.loadings


def score_distance(s, scales) -> float:
    s = np.asarray(s, dtype=float)
    scales = np.asarray(scales, dtype=float)
    if np.any(scales <= 0):
        raise ValueError("score scales must be positive")
    return float(np.sqrt(np.sum((s / scales) ** 2)))


def orthogonal_distance(z, model: PcaModel, s) -> float:
    z = np.asarray(z, dtype=float).ravel()
    s = np.asarray(s, dtype=float).ravel()
    if z.size != model.loadings.shape[0] or s.size != model.k:
        raise ValueError("dimension mismatch between observation, scores and loadings")
    return float(np.linalg.norm(z - model.loadings @ s))


def score_scales(model: PcaModel, S, mad_scaled: bool = True) -> np.ndarray:
    """Standard deviation of the scores for classical PCA, MAD otherwise."""
    if model.method is RadialMethod.CLASSICAL:
        return S.std(axis=0, ddof=1)
    med = np.median(S, axis=0)
    mad = np.median(np.abs(S - med), axis=0)
    return mad * MAD_CONSISTENCY if mad_scaled else mad


def od_cutoff(od, level: float = 0.975) -> float:
    """Wilson-Hilferty cutoff: normal quantile on OD^(2/3), mapped back by the 3/2 power."""
    y = np.asarray(od, dtype=float) ** (2.0 / 3.0)
    mu = float(np.median(y))
    sigma = float(np.median(np.abs(y - mu))) * MAD_CONSISTENCY
    return max(mu + sigma * stats.norm.ppf(level), 0.0) ** 1.5


@dataclass(frozen=True)
class OutlierMapRow:
    index: int
    sd: float
    od: float
    sd_cutoff: float
    od_cutoff: float
    flag: str


def classify(sd, od, sd_cut, od_cut) -> str:
    high_sd = sd > sd_cut
    high_od = od > od_cut and od > OD_ZERO
    if high_sd and high_od:
        return "bad_leverage"
    if high_od:
        return "orthogonal_outlier"
    if high_sd:
        return "score_outlier"
    return "regular"


def outlier_map(X, k: int, method="winsor", level: float = 0.975, mad_scaled: bool = True, model=None):
    """Score and orthogonal distances with cutoffs and a four-way flag per row."""
    X = as_dataset(X)
    if model is None:
        model = fit_pca(X, k, method)
    Z = model.transform(X)
    S = Z @ model.loadings
    scl = score_scales(model, S, mad_scaled)
    if np.any(scl <= 0):
        raise ValueError("a score column has zero scale")
    sd = np.sqrt(np.sum((S / scl) ** 2, axis=1))
    od = np.linalg.norm(Z - S @ model.loadings.T, axis=1)
    sd_cut = float(np.sqrt(stats.chi2.ppf(level, model.k)))
    od_cut = od_cutoff(od, level)
    return [
        OutlierMapRow(i, float(sd[i]), float(od[i]), sd_cut, od_cut, classify(sd[i], od[i], sd_cut, od_cut))
        for i in range(X.shape[0])
    ]
