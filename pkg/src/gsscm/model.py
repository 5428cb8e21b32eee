"""Radial law of the standard Gaussian model N(0, I_p).

With ``R = ||X||`` we have ``R^2 ~ chi2_p`` and the cutoffs are functionals
of ``G``, the law of ``R^(2/3)``. Everything here is exact up to 1-d root
finding and adaptive quadrature; no sampling.
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np
from scipy import integrate, optimize, stats

from .coga import CogaDistribution
from .radial import MAD_CONSISTENCY, Cutoffs, RadialMethod, xi

TAIL_MASS = 1e-13


class GaussianRadialModel:
    def __init__(self, p: int):
        if p < 1:
            raise ValueError("dimension must be positive")
        self.p = int(p)
        self.chi = stats.chi(self.p)
        self.coga = CogaDistribution.chi2(self.p)
        self.r_max = float(self.chi.isf(TAIL_MASS))
        self.median_g = float(stats.chi2(self.p).median()) ** (1.0 / 3.0)
        self.mad_g = self._solve_mad()
        m, s = self.median_g, self.mad_g
        self.cutoffs = Cutoffs(
            max(m - s, 0.0) ** 1.5,
            m**1.5,
            (m + s) ** 1.5,
            (m + MAD_CONSISTENCY * s) ** 1.5,
        )

    def cdf_g(self, t):
        t = np.maximum(np.asarray(t, dtype=float), 0.0)
        return self.chi.cdf(t**1.5)

    def pdf_g(self, t):
        """Density of R^(2/3): f_coga(t^3) * 3 t^2."""
        t = np.asarray(t, dtype=float)
        out = np.zeros_like(t)
        pos = t > 0
        out[pos] = self.coga.pdf(t[pos] ** 3) * 3.0 * t[pos] ** 2
        return float(out) if out.ndim == 0 else out

    def pdf_r(self, r):
        return self.chi.pdf(r)

    def _solve_mad(self):
        m = self.median_g

        def excess(s):
            return float(self.cdf_g(m + s) - self.cdf_g(m - s)) - 0.5

        hi = m
        while excess(hi) < 0:
            hi *= 2.0
        return float(optimize.brentq(excess, 0.0, hi, xtol=1e-15, rtol=1e-15))

    def expect(self, fn, breaks=()):
        """E[fn(R)] by adaptive quadrature split at ``breaks``."""
        pts = sorted({0.0, self.r_max, *[b for b in breaks if 0.0 < b < self.r_max]})
        total = 0.0
        for lo, hi in zip(pts[:-1], pts[1:]):
            val, _ = integrate.quad(
                lambda r: fn(r) * self.chi.pdf(r), lo, hi, epsabs=1e-14, epsrel=1e-12, limit=200
            )
            total += val
        return total


@lru_cache(maxsize=None)
def gaussian_model(p: int) -> GaussianRadialModel:
    return GaussianRadialModel(p)


def population_cutoffs(p: int) -> Cutoffs:
    return gaussian_model(p).cutoffs


def consistency_factor_exact(method, p: int) -> float:
    """c_g = E[g_1(X)^2] = E[R^2 xi(R)^2] / p at N(0, I_p)."""
    method = RadialMethod.parse(method)
    if method is RadialMethod.CLASSICAL:
        return 1.0
    if method is RadialMethod.SSCM:
        return 1.0 / p
    model = gaussian_model(p)
    cut = model.cutoffs
    val = model.expect(lambda r: r * r * xi(method, r, cut) ** 2, cut.as_tuple())
    return val / p
