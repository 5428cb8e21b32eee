"""Simulation study and empirical breakdown experiments.

Data are Gaussian with diagonal covariance (constant, linear or quadratic
eigenvalues), optionally with a fraction of rows replaced by the point
(0, ..., 0, gamma) along the last eigenvector. Estimates are compared with
the true covariance by the Gaussian Kullback-Leibler divergence, on raw and
on determinant-one (shape) matrices.

Replication ``r`` draws its standard normals from ``child_rng(seed, r)``, so
all cells of a study see the same underlying samples and the comparison
between methods, settings and contamination levels is paired.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, fields

import numpy as np

from .errors import GsscmError, NotPositiveDefiniteError
from .location import kstep_lts
from .radial import RadialMethod
from .rng import DEFAULT_SEED, child_rng
from .scatter import consistency_factor, gsscm, shape, weighted_scatter

SIGMA_SETTINGS = ("constant", "linear", "quadratic")
DEFAULT_METHODS = ("sscm", "winsor", "quad", "ball", "shell", "lr")
DEFAULT_GAMMAS = (0.5, 1.0, 2.0, 4.0, 8.0, 16.0, 32.0, 64.0)


def sigma_diagonal(p: int, setting: str) -> np.ndarray:
    base = np.arange(p, 0, -1, dtype=float)
    if setting == "constant":
        return np.ones(p)
    if setting == "linear":
        return base
    if setting == "quadratic":
        return base**2
    raise ValueError(f"unknown covariance setting {setting!r}")


def n_contaminated(n: int, eps: float) -> int:
    # guard against 0.2 * 100 = 20.000000000000004
    return int(math.ceil(eps * n - 1e-9))


@dataclass(frozen=True)
class SimConfig:
    n: int = 100
    p: int = 10
    sigma_setting: str = "constant"
    eps: float = 0.0
    gamma: float = 0.0
    replications: int = 200
    methods: tuple = DEFAULT_METHODS
    seed: int = DEFAULT_SEED
    normalize: bool = False
    lts_k: int = 5

    def __post_init__(self):
        if not 0.0 <= self.eps < 0.5:
            raise ValueError("contamination fraction must lie in [0, 0.5)")
        if self.n < self.p + 1:
            raise ValueError("need n >= p + 1")
        if self.replications < 1:
            raise ValueError("need at least one replication")
        if self.sigma_setting not in SIGMA_SETTINGS:
            raise ValueError(f"unknown covariance setting {self.sigma_setting!r}")
        object.__setattr__(self, "methods", tuple(RadialMethod.parse(m) for m in self.methods))

    @property
    def sigma(self) -> np.ndarray:
        return np.diag(sigma_diagonal(self.p, self.sigma_setting))


def generate(config: SimConfig, replication_index: int) -> np.ndarray:
    rng = child_rng(config.seed, replication_index)
    Z = rng.standard_normal((config.n, config.p))
    X = Z * np.sqrt(sigma_diagonal(config.p, config.sigma_setting))
    m = n_contaminated(config.n, config.eps)
    if m:
        X[config.n - m :] = 0.0
        X[config.n - m :, -1] = config.gamma
    return X


def _check_pd(A, name):
    A = np.asarray(A, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise NotPositiveDefiniteError(f"{name} must be a square matrix")
    try:
        np.linalg.cholesky(0.5 * (A + A.T))
    except np.linalg.LinAlgError:
        raise NotPositiveDefiniteError(f"{name} is not positive definite") from None
    return A


def kldiv(s_hat, sigma) -> float:
    """trace(S Sigma^-1) - log det(S Sigma^-1) - p."""
    A = _check_pd(s_hat, "estimate")
    B = _check_pd(sigma, "reference")
    p = A.shape[0]
    tr = float(np.trace(np.linalg.solve(B, A)))
    logdet = np.linalg.slogdet(A)[1] - np.linalg.slogdet(B)[1]
    return max(tr - logdet - p, 0.0)


def kldivshape(s_hat, sigma) -> float:
    return kldiv(shape(_check_pd(s_hat, "estimate")), shape(_check_pd(sigma, "reference")))


def replicate(config: SimConfig, replication_index: int):
    """KLdiv and KLdivshape of every method on one dataset; NaN marks a failure."""
    X = generate(config, replication_index)
    sigma = config.sigma
    out = {}
    try:
        center = kstep_lts(X, k=config.lts_k).center
    except GsscmError:
        return {m: (math.nan, math.nan) for m in config.methods}
    centered = X - center
    for m in config.methods:
        try:
            S = weighted_scatter(centered, m)[0]
            S = 0.5 * (S + S.T)
            if config.normalize:
                S = S / consistency_factor(m, config.p)
            out[m] = (kldiv(S, sigma), kldivshape(S, sigma))
        except (GsscmError, np.linalg.LinAlgError):
            out[m] = (math.nan, math.nan)
    return out


def replicate_cell(config: SimConfig):
    """Per-replication arrays {method: (kldiv[reps], kldivshape[reps])}."""
    kl = {m: np.empty(config.replications) for m in config.methods}
    ks = {m: np.empty(config.replications) for m in config.methods}
    for r in range(config.replications):
        for m, (a, b) in replicate(config, r).items():
            kl[m][r] = a
            ks[m][r] = b
    return {m: (kl[m], ks[m]) for m in config.methods}


@dataclass(frozen=True)
class SimRecord:
    method: str
    setting: str
    eps: float
    gamma: float
    mean_kldiv: float
    mean_kldivshape: float
    n_fail: int
    replications: int
    seed: int


RECORD_COLUMNS = [f.name for f in fields(SimRecord)]


def summarize(config: SimConfig, cell) -> list:
    rows = []
    for m in config.methods:
        kl, ks = cell[m]
        ok = np.isfinite(kl) & np.isfinite(ks)
        rows.append(
            SimRecord(
                method=m.value,
                setting=config.sigma_setting,
                eps=float(config.eps),
                gamma=float(config.gamma),
                mean_kldiv=float(kl[ok].mean()) if ok.any() else math.nan,
                mean_kldivshape=float(ks[ok].mean()) if ok.any() else math.nan,
                n_fail=int((~ok).sum()),
                replications=config.replications,
                seed=int(config.seed),
            )
        )
    return rows


@dataclass(frozen=True)
class StudyGrid:
    n: int = 100
    p: int = 10
    settings: tuple = SIGMA_SETTINGS
    eps_values: tuple = (0.0, 0.2, 0.4)
    gammas: tuple = DEFAULT_GAMMAS
    replications: int = 200
    methods: tuple = DEFAULT_METHODS
    seed: int = DEFAULT_SEED
    normalize: bool = False
    lts_k: int = 5
    extra: dict = field(default_factory=dict, compare=False)

    def cells(self):
        """Configs in canonical order: setting, eps, gamma (eps = 0 has a single gamma = 0)."""
        out = []
        for s in self.settings:
            for e in sorted(self.eps_values):
                for g in ([0.0] if e == 0 else sorted(self.gammas)):
                    out.append(
                        SimConfig(
                            n=self.n,
                            p=self.p,
                            sigma_setting=s,
                            eps=float(e),
                            gamma=float(g),
                            replications=self.replications,
                            methods=self.methods,
                            seed=self.seed,
                            normalize=self.normalize,
                            lts_k=self.lts_k,
                        )
                    )
        return out


def run_study(grid, threads: int = 1) -> list:
    """Mean KLdiv / KLdivshape per (setting, eps, gamma, method).

    ``grid`` is a :class:`StudyGrid` or an iterable of :class:`SimConfig`.
    Output order is canonical and independent of ``threads``.
    """
    configs = grid.cells() if isinstance(grid, StudyGrid) else list(grid)
    # fill the factor cache before fanning out
    for cfg in configs:
        for m in cfg.methods:
            consistency_factor(m, cfg.p)

    def run(cfg):
        return summarize(cfg, replicate_cell(cfg))

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            blocks = list(pool.map(run, configs))
    else:
        blocks = [run(c) for c in configs]
    return [rec for block in blocks for rec in block]


@dataclass(frozen=True)
class BreakdownResult:
    lambda_max: float
    lambda_min: float
    trace: float
    location_shift: float
    n: int
    p: int
    m: int
    magnitude: float
    method: str
    placement: str
    seed: int


def breakdown_design(n: int, p: int) -> dict:
    """Contamination counts around the scatter breakdown value floor((n-p+1)/2)."""
    m_star = (n - p + 1) // 2
    return {"below": m_star - 1, "at": m_star}


def contaminate(X, m: int, magnitude: float, placement: str, rng):
    """Replace the last ``m`` rows.

    ``spread``: points at distance ``magnitude`` in random directions.
    ``part2``: points ``c + magnitude * a_j`` with ``a_j = (M + 2 + j) u`` on a
    ray leaving the clean data (``c`` the clean mean, ``M`` the clean radius),
    so they are pairwise >= ``magnitude`` apart and >= ``magnitude`` from every
    clean point.
    """
    X = np.array(X, dtype=float, copy=True)
    n, p = X.shape
    if m == 0:
        return X
    if not 0 < m < n:
        raise ValueError("need 0 <= m < n")
    clean = X[: n - m]
    if placement == "spread":
        U = rng.standard_normal((m, p))
        U /= np.linalg.norm(U, axis=1, keepdims=True)
        X[n - m :] = magnitude * U
    elif placement == "part2":
        c = clean.mean(axis=0)
        radius = float(np.max(np.linalg.norm(clean - c, axis=1)))
        u = rng.standard_normal(p)
        u /= np.linalg.norm(u)
        steps = radius + 2.0 + np.arange(m, dtype=float)
        X[n - m :] = c + magnitude * steps[:, None] * u
    else:
        raise ValueError(f"unknown placement {placement!r}")
    return X


def breakdown_experiment(
    n: int,
    p: int,
    m: int,
    magnitude: float,
    method="winsor",
    seed: int = DEFAULT_SEED,
    placement: str = "spread",
    lts_k: int = 5,
) -> BreakdownResult:
    """Eigenvalue extremes, trace and location shift after replacing m of n points."""
    method = RadialMethod.parse(method)
    X = child_rng(seed, 0).standard_normal((n, p))
    Xc = contaminate(X, m, magnitude, placement, child_rng(seed, 1))
    est = gsscm(Xc, method, location="lts", k=lts_k)
    t_clean = kstep_lts(X, k=lts_k).center
    return BreakdownResult(
        lambda_max=float(est.eigenvalues[0]),
        lambda_min=float(est.eigenvalues[-1]),
        trace=float(np.trace(est.matrix)),
        location_shift=float(np.linalg.norm(est.location - t_clean)),
        n=n,
        p=p,
        m=m,
        magnitude=float(magnitude),
        method=method.value,
        placement=placement,
        seed=int(seed),
    )


STUDY_KEYS = {
    "n": int,
    "p": int,
    "settings": "list_str",
    "eps": "list_float",
    "gammas": "list_float",
    "replications": int,
    "methods": "list_str",
    "seed": int,
    "normalize": "bool",
    "lts_k": int,
}


def parse_study_config(text: str) -> StudyGrid:
    """Parse a flat ``key = value`` study file into a :class:`StudyGrid`.

    Keys: n, p, settings, eps, gammas, replications, methods, seed, normalize,
    lts_k. Lists are comma separated; ``#`` starts a comment. Unknown keys are
    rejected.
    """
    import configparser

    cp = configparser.ConfigParser(inline_comment_prefixes=("#",), interpolation=None)
    cp.read_string("[study]\n" + text)
    kwargs = {}
    for key, raw in cp["study"].items():
        kind = STUDY_KEYS.get(key)
        if kind is None:
            raise ValueError(f"unknown study config key {key!r}")
        items = [v.strip() for v in raw.split(",") if v.strip()]
        if kind == "list_str":
            val = tuple(items)
        elif kind == "list_float":
            val = tuple(float(v) for v in items)
        elif kind == "bool":
            val = cp["study"].getboolean(key)
        else:
            val = kind(raw.strip())
        kwargs["eps_values" if key == "eps" else key] = val
    grid = StudyGrid(**kwargs)
    for s in grid.settings:
        if s not in SIGMA_SETTINGS:
            raise ValueError(f"unknown covariance setting {s!r}")
    for m in grid.methods:
        RadialMethod.parse(m)
    return grid
