"""Convolution of gamma distributions and the quantile transform experiment.

The law of ``||X||^2`` for ``X ~ N(0, Sigma)`` is a sum of independent
Gamma(1/2, 2*lambda_i) variables, lambda_i the eigenvalues of Sigma. Its
density is evaluated with the Moschopoulos (1985) series, which writes the
convolution as a mixture of Gamma(rho + k, beta_min) laws,

    f(y) = sum_k w_k * gamma_pdf(y; rho + k, beta_min),   sum_k w_k = 1,

so the truncation error of the CDF is bounded by the discarded weight.
"""

from __future__ import annotations

import warnings
from concurrent.futures import ThreadPoolExecutor

import numpy as np
from scipy import optimize, special, stats

from .errors import NumericError
from .radial import MAD_CONSISTENCY
from .rng import DEFAULT_SEED, child_rng

TRANSFORM_POWERS = {"square": 2.0, "fisher": 1.0, "wilson_hilferty": 2.0 / 3.0}
EIGEN_SETTINGS = ("constant", "linear", "quadratic")


class CogaDistribution:
    """Sum of independent Gamma(shape_i, scale_i) variables."""

    def __init__(self, shapes, scales, tail_tol=1e-14, max_terms=200_000):
        shapes = np.atleast_1d(np.asarray(shapes, dtype=float))
        scales = np.atleast_1d(np.asarray(scales, dtype=float))
        if shapes.shape != scales.shape or shapes.ndim != 1 or shapes.size == 0:
            raise ValueError("shapes and scales must be nonempty vectors of equal length")
        if np.any(shapes <= 0) or np.any(scales <= 0):
            raise ValueError("shapes and scales must be strictly positive")
        self.shapes = shapes
        self.scales = scales
        self.tail_tol = tail_tol
        self.max_terms = max_terms
        self._weights = None

    @classmethod
    def from_eigenvalues(cls, eigenvalues):
        """Law of ||X||^2 for a centred Gaussian with the given covariance eigenvalues."""
        lam = np.asarray(eigenvalues, dtype=float)
        return cls(np.full(lam.shape, 0.5), 2.0 * lam)

    @classmethod
    def chi2(cls, p):
        return cls(np.full(p, 0.5), np.full(p, 2.0))

    def __repr__(self):
        return f"CogaDistribution(shapes={self.shapes.tolist()}, scales={self.scales.tolist()})"

    @property
    def rho(self):
        return float(self.shapes.sum())

    @property
    def beta(self):
        return float(self.scales.min())

    def mean(self):
        return float((self.shapes * self.scales).sum())

    def var(self):
        return float((self.shapes * self.scales**2).sum())

    @property
    def weights(self):
        """Mixture weights of the series, truncated once the tail is below ``tail_tol``."""
        if self._weights is None:
            self._weights = self._series()
        return self._weights

    def _series(self):
        a, b = self.shapes, self.scales
        b1 = b.min()
        ratio = 1.0 - b1 / b
        log_c = float(np.sum(a * np.log(b1 / b)))
        if log_c < -700:
            raise NumericError("coga series leading constant underflows; scales too spread")
        c = np.exp(log_c)
        active = ratio > 0
        a_act, r_act = a[active], ratio[active]
        if a_act.size == 0:
            return np.array([1.0])

        rmax = float(r_act.max())
        cap = 1024
        w = np.zeros(cap)
        kgam = np.zeros(cap)  # kgam[i-1] = i * gamma_i
        w[0] = c
        total = c
        rpow = np.ones_like(r_act)
        k = 0
        while True:
            k += 1
            if k > self.max_terms:
                raise NumericError(
                    f"coga series did not converge in {self.max_terms} terms "
                    f"(remaining weight {1.0 - total:.3e})"
                )
            if k >= cap:
                w = np.concatenate([w, np.zeros(cap)])
                kgam = np.concatenate([kgam, np.zeros(cap)])
                cap *= 2
            rpow = rpow * r_act
            kgam[k - 1] = np.dot(a_act, rpow)
            # w_k = (1/k) sum_{i=1}^{k} (i gamma_i) w_{k-i}
            w[k] = np.dot(kgam[:k], w[k - 1 :: -1][:k]) / k
            total += w[k]
            if 1.0 - total <= self.tail_tol:
                break
            # past the mode the weights decay at least geometrically with rate rmax
            if w[k] < w[k - 1] and w[k] * rmax / (1.0 - rmax) <= self.tail_tol:
                break
        return w[: k + 1].copy()

    def _shape_terms(self):
        return self.rho + np.arange(self.weights.size)

    def pdf(self, x):
        scalar = np.ndim(x) == 0
        x = np.atleast_1d(np.asarray(x, dtype=float))
        if np.any(x < 0):
            raise ValueError("coga density evaluated at a negative point")
        out = np.zeros_like(x)
        w, shp, beta = self.weights, self._shape_terms(), self.beta
        for sl in _chunks(x.size):
            xs = x[sl, None]
            with np.errstate(divide="ignore"):
                lp = stats.gamma.logpdf(xs, shp[None, :], scale=beta)
            out[sl] = np.exp(lp) @ w
        return float(out[0]) if scalar else out

    def cdf(self, x):
        scalar = np.ndim(x) == 0
        x = np.atleast_1d(np.asarray(x, dtype=float))
        if np.any(x < 0):
            raise ValueError("coga CDF evaluated at a negative point")
        out = np.zeros_like(x)
        w, shp, beta = self.weights, self._shape_terms(), self.beta
        for sl in _chunks(x.size):
            out[sl] = special.gammainc(shp[None, :], x[sl, None] / beta) @ w
        np.clip(out, 0.0, 1.0, out=out)
        return float(out[0]) if scalar else out

    def quantile(self, prob):
        prob = float(prob)
        if not 0.0 < prob < 1.0:
            raise ValueError("quantile probability must lie in (0, 1)")
        hi = self.mean() + 10.0 * np.sqrt(self.var())
        while self.cdf(hi) < prob:
            hi *= 2.0
        return float(optimize.brentq(lambda t: self.cdf(t) - prob, 0.0, hi, xtol=1e-300, rtol=1e-15, maxiter=500))

    def sample(self, rng, size):
        draws = rng.gamma(self.shapes, self.scales, size=(int(size), self.shapes.size))
        return draws.sum(axis=1)


def _chunks(n, block=2048):
    for start in range(0, n, block):
        yield slice(start, min(start + block, n))


def coga_pdf(d: CogaDistribution, x):
    return d.pdf(x)


def coga_cdf(d: CogaDistribution, x):
    return d.cdf(x)


def coga_quantile(d: CogaDistribution, prob):
    return d.quantile(prob)


def wh_quantile_estimate(r_samples, transform: str, prob: float, mad_scaled: bool = True) -> float:
    """Quantile of ``r`` from a normal fit to a power transform of ``r``.

    The transformed values ``r**power`` get location = median and scale =
    MAD (times 1.4826 when ``mad_scaled``); the normal quantile is mapped back
    with the inverse power.
    """
    if transform not in TRANSFORM_POWERS:
        raise ValueError(f"unknown transform {transform!r}")
    if not 0.0 < prob < 1.0:
        raise ValueError("prob must lie in (0, 1)")
    r = np.asarray(r_samples, dtype=float).ravel()
    if r.size == 0:
        raise ValueError("no samples")
    if np.any(r < 0):
        raise ValueError("samples must be nonnegative")
    power = TRANSFORM_POWERS[transform]
    h = r**power
    mu = float(np.median(h))
    sigma = float(np.median(np.abs(h - mu)))
    if mad_scaled:
        sigma *= MAD_CONSISTENCY
    if sigma == 0.0:
        if prob != 0.5:
            warnings.warn("zero MAD: quantile estimate collapses to the median", RuntimeWarning)
        return mu ** (1.0 / power)
    q = mu + sigma * stats.norm.ppf(prob)
    return max(q, 0.0) ** (1.0 / power)


def setting_scales(p: int, setting: str) -> np.ndarray:
    """Gamma scale parameters for an eigenvalue setting, standardised to sum to 2p."""
    base = np.arange(p, 0, -1, dtype=float)
    if setting == "constant":
        s = np.full(p, 2.0)
    elif setting == "linear":
        s = base
    elif setting == "quadratic":
        s = base**2
    else:
        raise ValueError(f"unknown eigenvalue setting {setting!r}")
    return s * (2.0 * p / s.sum())


def _wh_cell(p, setting, n_samples, seed, prob, mad_scaled):
    dist = CogaDistribution(np.full(p, 0.5), setting_scales(p, setting))
    rng = child_rng(seed, p, EIGEN_SETTINGS.index(setting))
    r = np.sqrt(dist.sample(rng, n_samples))
    rows = []
    for transform in TRANSFORM_POWERS:
        q = wh_quantile_estimate(r, transform, prob, mad_scaled=mad_scaled)
        rows.append(
            {
                "p": p,
                "setting": setting,
                "transform": transform,
                "f_coga_at_q3sq": float(dist.cdf(q * q)),
                "seed": int(seed),
            }
        )
    return rows


def wh_experiment(
    p_range,
    eigen_setting="constant",
    n_samples: int = 100_000,
    seed: int = DEFAULT_SEED,
    prob: float = 0.75,
    mad_scaled: bool = True,
    threads: int = 1,
):
    """Evaluate the coga CDF at the squared estimated quantile for each transform.

    ``eigen_setting`` is one setting name or a sequence of them. Returns rows
    ordered by (setting, p, transform) regardless of ``threads``.
    """
    settings = [eigen_setting] if isinstance(eigen_setting, str) else list(eigen_setting)
    for s in settings:
        if s not in EIGEN_SETTINGS:
            raise ValueError(f"unknown eigenvalue setting {s!r}")
    cells = [(int(p), s) for s in settings for p in p_range]
    if any(p < 1 for p, _ in cells):
        raise ValueError("dimensions must be positive")

    def run(cell):
        return _wh_cell(cell[0], cell[1], n_samples, seed, prob, mad_scaled)

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            blocks = list(pool.map(run, cells))
    else:
        blocks = [run(c) for c in cells]
    return [row for block in blocks for row in block]
