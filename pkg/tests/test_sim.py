import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from gsscm.errors import NotPositiveDefiniteError
from gsscm.sim import (
    RECORD_COLUMNS,
    SimConfig,
    StudyGrid,
    breakdown_design,
    breakdown_experiment,
    contaminate,
    generate,
    kldiv,
    kldivshape,
    n_contaminated,
    parse_study_config,
    replicate,
    replicate_cell,
    run_study,
    sigma_diagonal,
)


def _spd(seed, p=4):
    A = np.random.default_rng(seed).standard_normal((p, p + 2))
    return A @ A.T + 0.1 * np.eye(p)


def test_sigma_settings():
    np.testing.assert_array_equal(sigma_diagonal(3, "constant"), [1, 1, 1])
    np.testing.assert_array_equal(sigma_diagonal(3, "linear"), [3, 2, 1])
    np.testing.assert_array_equal(sigma_diagonal(3, "quadratic"), [9, 4, 1])
    with pytest.raises(ValueError):
        sigma_diagonal(3, "cubic")


def test_n_contaminated():
    assert n_contaminated(100, 0.2) == 20
    assert n_contaminated(100, 0.4) == 40
    assert n_contaminated(100, 0.0) == 0
    assert n_contaminated(10, 0.25) == 3


def test_generate_contamination_rows():
    cfg = SimConfig(n=50, p=4, eps=0.2, gamma=8.0, replications=1)
    X = generate(cfg, 0)
    assert X.shape == (50, 4)
    np.testing.assert_array_equal(X[40:], np.tile([0, 0, 0, 8.0], (10, 1)))
    assert not np.any(np.all(X[:40] == [0, 0, 0, 8.0], axis=1))


def test_common_random_numbers():
    a = generate(SimConfig(n=30, p=3, sigma_setting="constant", replications=1), 4)
    b = generate(SimConfig(n=30, p=3, sigma_setting="linear", replications=1), 4)
    np.testing.assert_allclose(b, a * np.sqrt([3, 2, 1]))


def test_config_validation():
    with pytest.raises(ValueError):
        SimConfig(eps=0.5)
    with pytest.raises(ValueError):
        SimConfig(n=5, p=10)
    with pytest.raises(ValueError):
        SimConfig(methods=("huber",))


def test_kldiv_examples():
    assert kldiv(np.eye(3), np.eye(3)) == pytest.approx(0.0, abs=1e-14)
    # tr(2I) - log det(2I) - 2 = 4 - 2 log 2 - 2
    assert kldiv(2 * np.eye(2), np.eye(2)) == pytest.approx(2 - 2 * math.log(2))
    assert kldivshape(5 * np.eye(3), np.eye(3)) == pytest.approx(0.0, abs=1e-14)
    with pytest.raises(NotPositiveDefiniteError):
        kldiv(np.diag([1.0, -1.0]), np.eye(2))
    with pytest.raises(NotPositiveDefiniteError):
        kldiv(np.eye(2), np.ones((2, 3)))


@given(st.integers(0, 2**31), st.integers(0, 2**31))
def test_kldiv_nonnegative_zero_iff_equal(s1, s2):
    A, B = _spd(s1), _spd(s2)
    assert kldiv(A, B) >= 0
    assert kldiv(A, A) == pytest.approx(0.0, abs=1e-9)
    if not np.allclose(A, B):
        assert kldiv(A, B) > 0


def test_replicate_methods():
    cfg = SimConfig(n=60, p=4, replications=1, methods=("classical", "sscm", "winsor", "ball"))
    out = replicate(cfg, 0)
    assert set(out) == set(cfg.methods)
    for kl, ks in out.values():
        assert kl >= 0 and ks >= 0


def test_normalize_matters_only_for_kldiv():
    base = dict(n=60, p=4, replications=3, methods=("winsor", "lr"))
    a = replicate_cell(SimConfig(**base, normalize=False))
    b = replicate_cell(SimConfig(**base, normalize=True))
    for m in a:
        np.testing.assert_allclose(a[m][1], b[m][1], rtol=1e-10)
        assert not np.allclose(a[m][0], b[m][0])


def test_study_grid_cells():
    grid = StudyGrid(settings=("constant",), eps_values=(0.4, 0.0, 0.2), gammas=(2.0, 1.0), replications=2)
    cells = grid.cells()
    assert [(c.eps, c.gamma) for c in cells] == [(0.0, 0.0), (0.2, 1.0), (0.2, 2.0), (0.4, 1.0), (0.4, 2.0)]


def test_run_study_deterministic_and_thread_independent():
    grid = StudyGrid(n=40, p=3, settings=("linear",), eps_values=(0.0, 0.2), gammas=(8.0,), replications=4)
    a = run_study(grid, threads=1)
    b = run_study(grid, threads=3)
    c = run_study(grid, threads=1)
    assert a == b == c
    assert [r.method for r in a[:6]] == ["sscm", "winsor", "quad", "ball", "shell", "lr"]
    assert list(vars(a[0])) == RECORD_COLUMNS


def test_contamination_harm_monotone():
    # far outliers: mean KLdiv grows with eps for the Winsor estimator
    res = {}
    for eps in (0.0, 0.2, 0.4):
        cfg = SimConfig(n=100, p=5, eps=eps, gamma=16.0, replications=20, methods=("winsor",), seed=3)
        res[eps] = np.nanmean(replicate_cell(cfg)["winsor"][0])
    assert res[0.0] <= res[0.2] <= res[0.4]


def test_parse_study_config():
    text = """
    # desk-scale study
    n = 50
    p = 4
    settings = constant, linear
    eps = 0, 0.2
    gammas = 1, 64
    replications = 10
    methods = sscm, winsor
    seed = 42
    normalize = off
    lts_k = 3
    """
    grid = parse_study_config(text)
    assert grid.n == 50 and grid.p == 4 and grid.seed == 42 and grid.lts_k == 3
    assert grid.settings == ("constant", "linear")
    assert grid.eps_values == (0.0, 0.2) and grid.gammas == (1.0, 64.0)
    assert grid.normalize is False
    assert len(grid.cells()) == 6
    with pytest.raises(ValueError):
        parse_study_config("bogus = 1")
    with pytest.raises(ValueError):
        parse_study_config("settings = cubic")


def test_breakdown_design():
    assert breakdown_design(100, 10) == {"below": 44, "at": 45}


def test_contaminate_placements():
    X = np.random.default_rng(0).standard_normal((20, 3))
    rng = np.random.default_rng(1)
    S = contaminate(X, 5, 1e6, "spread", rng)
    np.testing.assert_allclose(np.linalg.norm(S[15:], axis=1), 1e6)
    np.testing.assert_array_equal(S[:15], X[:15])
    P = contaminate(X, 5, 1e6, "part2", rng)
    D = np.linalg.norm(P[15:, None] - P[None, 15:], axis=2)
    assert np.all(D[~np.eye(5, dtype=bool)] >= 1e6 * (1 - 1e-9))
    assert np.linalg.norm(P[15:, None] - X[None, :15], axis=2).min() >= 1e6 * (1 - 1e-9)
    with pytest.raises(ValueError):
        contaminate(X, 3, 1.0, "corner", rng)


@pytest.mark.parametrize("method", ["winsor", "quad", "ball", "shell", "lr", "sscm"])
def test_breakdown_below(method):
    r = breakdown_experiment(100, 10, 44, 1e8, method, seed=0)
    assert np.isfinite(r.lambda_max) and r.lambda_max < 1e3
    assert r.lambda_min > 0
    assert r.location_shift < 10


def test_breakdown_part2_explodes_past_bound():
    # with n + p + 1 odd the clean points fill all the unit-weight slots at
    # m = 45; one more contaminated point forces an outlier into them
    r = breakdown_experiment(100, 10, 46, 1e6, "winsor", seed=0, placement="part2")
    assert r.trace >= 1e12 / 200
