import numpy as np
import pytest
from scipy import stats

from normsketch import (
    Lp,
    SumMix,
    TopK,
    apply_symsketch,
    augment,
    build_symsketch,
    exact_regression,
    measure_distortion,
    symnorm_regression,
)
from normsketch.rng import derive_seed
from normsketch.synth import gaussian_instance


@pytest.fixture(scope="module")
def instance():
    return gaussian_instance(4096, 5, 21)


def test_consistent_system(rng):
    A = rng.standard_normal((800, 3))
    x_true = np.array([1.0, -3.0, 2.0])
    sol = symnorm_regression(A, A @ x_true, TopK(100), 4)
    assert sol.loss <= 1e-9 * np.linalg.norm(A @ x_true, 1)
    assert np.allclose(sol.x, x_true, atol=1e-10)


@pytest.mark.parametrize("norm", [Lp(2), Lp(1), TopK(50), SumMix(1.0)], ids=str)
def test_solution_solves_sketched_problem(rng, norm):
    A = rng.standard_normal((1000, 4))
    b = rng.standard_normal(1000)
    seed = 13
    sol = symnorm_regression(A, b, norm, seed)
    S = build_symsketch(norm, 1000, 5, derive_seed(seed, 0, "symsketch"))
    SAb = apply_symsketch(S, augment(A, b))
    SA, Sb = SAb[:, :-1], SAb[:, -1]
    resid = SA.T @ (SA @ sol.x - Sb)
    assert np.max(np.abs(resid)) < 1e-8 * np.linalg.norm(SA) * np.linalg.norm(Sb)


def test_loss_is_full_data_norm(rng):
    A = rng.standard_normal((500, 3))
    b = rng.standard_normal(500)
    norm = TopK(40)
    sol = symnorm_regression(A, b, norm, 0)
    assert sol.loss == norm(A @ sol.x - b)


def test_l2_median_ratio(instance):
    A, b = instance
    opt = exact_regression(A, b, Lp(2)).loss
    ratios = [symnorm_regression(A, b, Lp(2), s).loss / opt for s in range(25)]
    assert np.median(ratios) <= 2.0


def test_topk_median_ratio(instance):
    A, b = instance
    norm = TopK(4096 // 5)
    opt = exact_regression(A, b, norm).loss
    ratios = [symnorm_regression(A, b, norm, s, m2=20 * 6).loss / opt for s in range(25)]
    assert np.median(ratios) <= 1.5


@pytest.mark.parametrize("norm", [Lp(2), Lp(1), TopK(819), SumMix(1.0)], ids=str)
def test_distortion_spread_bounded(instance, norm):
    A, _ = instance
    S = build_symsketch(norm, 4096, 5, 3)
    rep = measure_distortion(lambda Y: apply_symsketch(S, Y), A, norm, 1000, 4)
    assert 0 < rep.min_ratio <= rep.median_ratio <= rep.max_ratio
    assert rep.spread <= 1e4


def test_permutation_invariance_in_distribution():
    A, b = gaussian_instance(600, 3, 8)
    A = A.toarray()
    perm = np.random.default_rng(1).permutation(600)
    norm = TopK(120)
    base = [symnorm_regression(A, b, norm, s, m2=40).loss for s in range(100)]
    permuted = [symnorm_regression(A[perm], b[perm], norm, s, m2=40).loss for s in range(100, 200)]
    assert stats.ks_2samp(base, permuted).pvalue > 0.01


def test_repetitions_never_worse(rng):
    A = rng.standard_normal((700, 3))
    b = rng.standard_t(2, size=700)
    one = symnorm_regression(A, b, Lp(1), 5, m2=20)
    best = symnorm_regression(A, b, Lp(1), 5, m2=20, repetitions=5)
    assert best.loss <= one.loss
