"""Influence functions of the GSSCM family at the standard Gaussian N(0, I_p).

For a radial function whose cutoffs depend on the distribution, the influence
function of ``S_g`` has three parts: the contribution of the contaminating
point ``g(z) g(z)^T``, the loss of mass ``-Xi_g`` and the effect of ``z`` on
the cutoffs. At a spherical model ``Xi_g = c_g I`` and, by isotropy, the cutoff
effect is also a multiple of the identity,

    IF(z) = xi(||z||)^2 z z^T - c_g I + kappa(z) I,

where ``kappa`` is linear in the influence functions of the cutoffs. For the
continuous radial functions (Winsor, Quad, LR)

    kappa = (2/p) E[R^2 xi(R) d/de xi_e(R)],

and for Ball and Shell the derivative of the indicator is a surface term at
the cutoff radius Q, contributing ``(1/p) Q^2 f_R(Q) IF(z, Q)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import SingularIFError
from .model import gaussian_model
from .radial import MAD_CONSISTENCY, RadialMethod, xi
from .scatter import consistency_factor


@dataclass(frozen=True)
class IFResult:
    z: np.ndarray
    matrix: np.ndarray
    method: RadialMethod
    normalized: bool = False


@dataclass(frozen=True)
class CutoffIFs:
    if_q1: float
    if_q2: float
    if_q3: float
    if_q3star: float


def if_classical(z, sigma) -> np.ndarray:
    z = np.asarray(z, dtype=float).ravel()
    sigma = np.asarray(sigma, dtype=float)
    return np.outer(z, z) - sigma


def if_sscm(z, p: int | None = None) -> np.ndarray:
    """IF of the SSCM at N(0, I_p); at z = 0 the spatial sign is taken as 0."""
    z = np.asarray(z, dtype=float).ravel()
    p = z.size if p is None else p
    r = float(np.linalg.norm(z))
    u = z / r if r > 0 else np.zeros_like(z)
    return np.outer(u, u) - np.eye(p) / p


def _sign(x):
    return float(np.sign(x))


def median_mad_ifs(t: float, p: int):
    """Influence of a point t on the median and (unscaled) MAD of G = law of ||X||^(2/3)."""
    model = gaussian_model(p)
    m, s = model.median_g, model.mad_g
    f_m = float(model.pdf_g(m))
    f_hi = float(model.pdf_g(m + s))
    f_lo = float(model.pdf_g(m - s)) if m - s > 0 else 0.0
    if f_m <= 0 or f_hi + f_lo <= 0:
        raise SingularIFError("density of ||X||^(2/3) vanishes at the median or median +- mad")
    if_med = _sign(t - m) / (2.0 * f_m)
    if_mad = (0.5 * _sign(abs(t - m) - s) - if_med * (f_hi - f_lo)) / (f_hi + f_lo)
    return if_med, if_mad


def if_cutoffs(z, p: int | None = None) -> CutoffIFs:
    z = np.asarray(z, dtype=float).ravel()
    p = z.size if p is None else p
    model = gaussian_model(p)
    m, s = model.median_g, model.mad_g
    t = float(np.linalg.norm(z)) ** (2.0 / 3.0)
    i_med, i_mad = median_mad_ifs(t, p)
    c = MAD_CONSISTENCY
    q1 = 1.5 * np.sqrt(m - s) * (i_med - i_mad) if m > s else 0.0
    return CutoffIFs(
        float(q1),
        float(1.5 * np.sqrt(m) * i_med),
        float(1.5 * np.sqrt(m + s) * (i_med + i_mad)),
        float(1.5 * np.sqrt(m + c * s) * (i_med + c * i_mad)),
    )


@lru_cache(maxsize=None)
def _kappa_coefficients(method: RadialMethod, p: int):
    """Coefficients (a1, a2, a3, a3s) with kappa = sum a_j * IF(z, Q_j)."""
    model = gaussian_model(p)
    cut = model.cutoffs
    q1, q2, q3, q3s = cut.as_tuple()
    bps = cut.as_tuple()
    if method is RadialMethod.WINSOR:
        # xi = q2/r, d xi = IF2 / r beyond q2
        a2 = 2.0 / p * model.expect(lambda r: r * r * (q2 / r) / r if r > q2 else 0.0, bps)
        return (0.0, a2, 0.0, 0.0)
    if method is RadialMethod.QUAD:
        # xi = q2^2/r^2, d xi = 2 q2 IF2 / r^2 beyond q2
        a2 = 2.0 / p * model.expect(lambda r: 2.0 * q2**3 / r**2 if r > q2 else 0.0, bps)
        return (0.0, a2, 0.0, 0.0)
    if method is RadialMethod.LR:
        den = (q3s - q2) ** 2

        def lr_xi(r):
            return (q3s - r) / (q3s - q2)

        def band(fn):
            return lambda r: fn(r) if q2 <= r <= q3s else 0.0

        a3s = 2.0 / p * model.expect(band(lambda r: r * r * lr_xi(r) * (r - q2) / den), bps)
        a2 = 2.0 / p * model.expect(band(lambda r: r * r * lr_xi(r) * (q3s - r) / den), bps)
        return (0.0, a2, 0.0, a3s)
    if method is RadialMethod.BALL:
        return (0.0, q2 * q2 * float(model.pdf_r(q2)) / p, 0.0, 0.0)
    if method is RadialMethod.SHELL:
        a1 = -q1 * q1 * float(model.pdf_r(q1)) / p
        a3 = q3 * q3 * float(model.pdf_r(q3)) / p
        return (a1, 0.0, a3, 0.0)
    return (0.0, 0.0, 0.0, 0.0)


def cutoff_correction(z, method, p: int | None = None) -> float:
    """The scalar kappa(z) multiplying the identity in the influence function."""
    method = RadialMethod.parse(method)
    z = np.asarray(z, dtype=float).ravel()
    p = z.size if p is None else p
    if not method.uses_cutoffs:
        return 0.0
    coef = _kappa_coefficients(method, p)
    c = if_cutoffs(z, p)
    return float(np.dot(coef, (c.if_q1, c.if_q2, c.if_q3, c.if_q3star)))


def if_gsscm(z, method, p: int | None = None, normalize: bool = False) -> IFResult:
    """Influence function of the GSSCM functional (location fixed at 0) at N(0, I_p)."""
    method = RadialMethod.parse(method)
    z = np.asarray(z, dtype=float).ravel()
    p = z.size if p is None else p
    if z.size != p:
        raise ValueError(f"z has length {z.size}, expected {p}")
    if not np.all(np.isfinite(z)):
        raise ValueError("z must be finite")
    eye = np.eye(p)
    if method is RadialMethod.CLASSICAL:
        M = if_classical(z, eye)
    elif method is RadialMethod.SSCM:
        M = if_sscm(z, p)
    else:
        cut = gaussian_model(p).cutoffs
        w = xi(method, float(np.linalg.norm(z)), cut)
        c_g = consistency_factor(method, p)
        M = w * w * np.outer(z, z) + (cutoff_correction(z, method, p) - c_g) * eye
    if normalize:
        M = M / consistency_factor(method, p)
    return IFResult(z, 0.5 * (M + M.T), method, normalize)


DIRECTIONS = ("diag_xy", "axis_x")


def if_grid(method, direction: str, z_values, p: int = 2, normalize: bool = True):
    """Rows (z, method, s11, s12, s22, normalized) for contamination at (z, z) or (z, 0)."""
    method = RadialMethod.parse(method)
    if p != 2:
        raise ValueError("if_grid is defined for the bivariate case p = 2")
    if direction not in DIRECTIONS:
        raise ValueError(f"direction must be one of {DIRECTIONS}")
    rows = []
    for zv in z_values:
        zv = float(zv)
        point = (zv, zv) if direction == "diag_xy" else (zv, 0.0)
        M = if_gsscm(point, method, p=2, normalize=normalize).matrix
        rows.append(
            {
                "z": zv,
                "method": method.value,
                "s11": float(M[0, 0]),
                "s12": float(M[0, 1]),
                "s22": float(M[1, 1]),
                "normalized": bool(normalize),
            }
        )
    return rows
