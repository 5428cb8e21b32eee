"""Order-statistic scale summaries, distance cutoffs and radial weight functions.

A radial function maps the Euclidean distance ``r = ||x - T||`` of a centred
observation to a weight ``xi(r)``; the transformed point is ``(x - T) xi(r)``.
The cutoff-based functions use four thresholds computed from the distances
after the 2/3 power (Wilson-Hilferty) transform.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .errors import DimensionExceedsSampleError, EmptyInputError

MAD_CONSISTENCY = 1.4826


class RadialMethod(str, enum.Enum):
    CLASSICAL = "classical"
    SSCM = "sscm"
    WINSOR = "winsor"
    QUAD = "quad"
    BALL = "ball"
    SHELL = "shell"
    LR = "lr"

    @classmethod
    def parse(cls, value) -> "RadialMethod":
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).lower())
        except ValueError:
            names = ", ".join(m.value for m in cls)
            raise ValueError(f"unknown radial method {value!r} (expected one of {names})") from None

    @property
    def uses_cutoffs(self) -> bool:
        return self not in (RadialMethod.CLASSICAL, RadialMethod.SSCM)

    def __str__(self) -> str:
        return self.value


GSSCM_METHODS = (
    RadialMethod.WINSOR,
    RadialMethod.QUAD,
    RadialMethod.BALL,
    RadialMethod.SHELL,
    RadialMethod.LR,
)


@dataclass(frozen=True)
class Cutoffs:
    q1: float
    q2: float
    q3: float
    q3star: float

    def as_tuple(self):
        return (self.q1, self.q2, self.q3, self.q3star)


def h_index(n: int, p: int) -> int:
    """Rank ``floor((n + p + 1) / 2)`` used by hmed/hmad (1-based)."""
    return (n + p + 1) // 2


def _check(values, p):
    y = np.asarray(values, dtype=float).ravel()
    n = y.size
    if n == 0:
        raise EmptyInputError("hmed of an empty sample")
    h = h_index(n, p)
    if h > n:
        raise DimensionExceedsSampleError(
            f"order statistic h={h} exceeds sample size n={n} (dimension p={p})"
        )
    return y, h


def hmed(values, p: int) -> float:
    """The h-th smallest value with h = floor((n+p+1)/2)."""
    y, h = _check(values, p)
    return float(np.partition(y, h - 1)[h - 1])


def hmad(values, p: int) -> float:
    """hmed of absolute deviations from hmed."""
    y, h = _check(values, p)
    center = float(np.partition(y, h - 1)[h - 1])
    dev = np.abs(y - center)
    return float(np.partition(dev, h - 1)[h - 1])


def compute_cutoffs(distances, p: int) -> Cutoffs:
    """Cutoffs Q1 <= Q2 <= Q3 <= Q3* from Euclidean distances.

    Q1, Q3 and Q3* are computed on the 2/3-power scale and mapped back by the
    3/2 power. Q2 is taken as the raw order statistic, which is the same
    quantity (x -> x^(3/2) is monotone) without the rounding of the round trip,
    so that at least h distances satisfy ``d <= Q2`` exactly.
    """
    d = np.asarray(distances, dtype=float).ravel()
    if np.any(d < 0):
        raise ValueError("distances must be nonnegative")
    y = d ** (2.0 / 3.0)
    med = hmed(y, p)
    mad = hmad(y, p)
    q2 = hmed(d, p)
    q1 = max(med - mad, 0.0) ** 1.5
    q3 = (med + mad) ** 1.5
    q3star = (med + MAD_CONSISTENCY * mad) ** 1.5
    # keep the ordering exact despite the different rounding paths
    q1 = min(q1, q2)
    q3 = max(q3, q2)
    q3star = max(q3star, q3)
    return Cutoffs(q1, q2, q3, q3star)


def xi(method, r, cutoffs: Cutoffs | None = None):
    """Evaluate the radial function of ``method`` at distance(s) ``r``.

    Scalars in, scalar out; arrays in, array out. SSCM gives weight 0 at r = 0.
    """
    method = RadialMethod.parse(method)
    scalar = np.ndim(r) == 0
    r = np.asarray(r, dtype=float)
    if np.any(r < 0):
        raise ValueError("radial function evaluated at a negative distance")
    if method.uses_cutoffs and cutoffs is None:
        raise ValueError(f"method {method} needs cutoffs")

    if method is RadialMethod.CLASSICAL:
        w = np.ones_like(r)
    elif method is RadialMethod.SSCM:
        w = np.zeros_like(r)
        pos = r > 0
        w[pos] = 1.0 / r[pos]
    else:
        q1, q2, q3, q3s = cutoffs.as_tuple()
        inner = r <= q2
        if method is RadialMethod.WINSOR:
            w = np.where(inner, 1.0, q2 / np.where(inner, 1.0, r))
        elif method is RadialMethod.QUAD:
            w = np.where(inner, 1.0, (q2 / np.where(inner, 1.0, r)) ** 2)
        elif method is RadialMethod.BALL:
            w = inner.astype(float)
        elif method is RadialMethod.SHELL:
            w = ((r >= q1) & (r <= q3)).astype(float)
        else:  # LR
            w = np.zeros_like(r)
            w[inner] = 1.0
            mid = (~inner) & (r <= q3s)
            if np.any(mid):
                # q3s > q2 whenever a point lies strictly between them
                w[mid] = (q3s - r[mid]) / (q3s - q2)
    return float(w) if scalar else w


def sample_weights(method, distances, p: int):
    """Weights xi(d_i) of a sample together with the cutoffs computed from it.

    Same as ``xi(method, d, compute_cutoffs(d, p))`` except that the Shell band
    is tested on the 2/3-power scale, ``|d^(2/3) - hmed| <= hmad``. The
    observation that attains the hmad lies exactly on a band edge; testing it
    on the scale where the edge was computed keeps its weight free of the
    rounding in the 3/2-power round trip.
    """
    method = RadialMethod.parse(method)
    d = np.asarray(distances, dtype=float).ravel()
    if not method.uses_cutoffs:
        return xi(method, d), None
    cut = compute_cutoffs(d, p)
    if method is RadialMethod.SHELL:
        y = d ** (2.0 / 3.0)
        w = (np.abs(y - hmed(y, p)) <= hmad(y, p)).astype(float)
        return w, cut
    return xi(method, d, cut), cut
