import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

import normsketch as ns
from normsketch.errors import InputError
from oracles import load_golden

REL_TOL = 1e-10
CATALOG = [
    ns.Lp(1.0), ns.Lp(1.5), ns.Lp(2.0), ns.Lp(math.inf), ns.TopK(3), ns.SumMix(0.7),
    ns.MaxMix(0.5), ns.Orlicz(ns.huber(0.1)), ns.Orlicz(ns.l1l2()), ns.Orlicz(ns.fair(1.0)),
]
GS = [ns.huber(0.1), ns.l1l2(), ns.fair(1.0)]

finite = st.floats(-1e3, 1e3, allow_nan=False, allow_infinity=False)
vectors = arrays(np.float64, st.integers(3, 40), elements=finite)


# -- symmetric norm catalog -------------------------------------------------

def test_topk_example():
    assert ns.eval_symmetric_norm(ns.TopK(2), [3, -5, 1]) == 8


def test_summix_maxmix_examples():
    assert ns.eval_symmetric_norm(ns.SumMix(1.0), [3, 4]) == pytest.approx(12.0, rel=1e-15)
    assert ns.eval_symmetric_norm(ns.MaxMix(0.5), [3, 4]) == pytest.approx(5.0, rel=1e-15)


def test_catalog_errors():
    with pytest.raises(InputError):
        ns.eval_symmetric_norm(ns.TopK(5), [1.0, 2.0])
    with pytest.raises(InputError):
        ns.Lp(0.5)
    with pytest.raises(InputError):
        ns.eval_symmetric_norm(ns.Lp(2), [1.0, np.nan])


@pytest.mark.parametrize("norm", CATALOG, ids=str)
def test_zero_iff_zero(norm):
    assert norm(np.zeros(5)) == 0.0
    assert norm(np.array([0, 0, 1e-3, 0, 0])) > 0.0


@pytest.mark.parametrize("norm", CATALOG, ids=str)
def test_symmetry_permutation_and_signs(norm, rng):
    for _ in range(1000):
        n = int(rng.integers(3, 30))
        y = rng.standard_normal(n) * rng.choice([1e-2, 1.0, 1e2])
        z = rng.choice([-1.0, 1.0], n) * y[rng.permutation(n)]
        assert norm(z) == pytest.approx(norm(y), rel=1e-10)


@pytest.mark.parametrize("norm", CATALOG, ids=str)
@given(y=vectors, a=st.floats(-50, 50, allow_nan=False))
@settings(max_examples=60, deadline=None)
def test_positive_homogeneity(norm, y, a):
    assert norm(a * y) == pytest.approx(abs(a) * norm(y), rel=10 * REL_TOL, abs=1e-300)


@pytest.mark.parametrize("norm", CATALOG, ids=str)
def test_monotone_in_magnitudes(norm, rng):
    for _ in range(1000):
        y = rng.standard_normal(12)
        x = y * rng.uniform(0, 1, 12) * rng.choice([-1, 1], 12)
        assert norm(x) <= norm(y) * (1 + 10 * REL_TOL)


@pytest.mark.parametrize("norm", CATALOG, ids=str)
def test_sandwich_after_unit_normalisation(norm, rng):
    unit = norm.unit
    for _ in range(200):
        y = rng.standard_normal(15) * rng.choice([1e-2, 1.0, 1e2])
        v = norm(y) / unit
        assert np.max(np.abs(y)) * (1 - 1e-9) <= v <= np.sum(np.abs(y)) * (1 + 1e-9)


def test_level_weight_examples():
    assert ns.level_weight(ns.Lp(2), 4, 16) == pytest.approx(4.0)
    assert ns.level_weight(ns.Lp(1), 3, 8) == 8.0
    assert ns.level_weight(ns.TopK(2), 3, 8) == 2.0


def test_level_weight_matches_direct_evaluation():
    for norm in CATALOG:
        for i in range(5):
            direct = norm(np.concatenate([np.ones(2**i), np.zeros(8)]))
            assert ns.level_weight(norm, i, 64) == pytest.approx(direct, rel=1e-9)


def test_level_weight_beyond_depth():
    with pytest.raises(InputError):
        ns.level_weight(ns.Lp(2), 5, 16)


# -- Orlicz functions ---------------------------------------------------------

@pytest.mark.parametrize("G", GS + [ns.square(), ns.absolute(), ns.power(1.5)], ids=lambda g: g.name)
def test_builtin_growth_bounds(G):
    x = np.logspace(-4, 4, 60)
    gx = G(x)
    r = gx[None, :] / gx[:, None]
    q = x[None, :] / x[:, None]
    up = np.triu(np.ones_like(r, dtype=bool), 1)
    assert np.all(r[up] >= q[up] * (1 - 1e-12))
    assert np.all(r[up] <= G.growth_constant * q[up] ** 2 * (1 + 1e-12))


def test_huber_table_formula():
    G = ns.huber(0.1)
    assert G(0.05) == pytest.approx(0.05**2 / 2)
    assert G(-2.0) == pytest.approx(0.1 * (2.0 - 0.05))


def test_l1l2_and_fair_formulas():
    x = np.array([1e-5, 0.3, 2.0, 40.0])
    np.testing.assert_allclose(ns.l1l2()(x), 2 * (np.sqrt(1 + x**2 / 2) - 1), rtol=1e-6)
    np.testing.assert_allclose(ns.fair(2.0)(x[1:]), 4 * (x[1:] / 2 - np.log1p(x[1:] / 2)), rtol=1e-12)


@pytest.mark.parametrize("G", GS, ids=lambda g: g.name)
def test_derivative_matches_finite_difference(G):
    x = np.array([0.01, 0.07, 0.3, 1.7, 12.0])
    h = 1e-7
    fd = (G(x + h) - G(x - h)) / (2 * h)
    np.testing.assert_allclose(G.derivative(x), fd, rtol=1e-5)


def test_custom_callbacks_validated():
    G = ns.from_callbacks(lambda a: a**2 + a, growth_constant=1.0)
    assert G(2.0) == 6.0
    assert G.derivative(np.array([1.0])) == pytest.approx(3.0, rel=1e-6)
    with pytest.raises(InputError):
        ns.from_callbacks(lambda a: a**3)  # cubic growth exceeds C_G (y/x)^2
    with pytest.raises(InputError):
        ns.from_callbacks(lambda a: np.sqrt(a))  # concave
    with pytest.raises(InputError):
        ns.from_callbacks(lambda a: a**2 + 1)  # G(0) != 0


# -- Orlicz norms -------------------------------------------------------------

def test_orlicz_square_is_l2(backend):
    assert ns.orlicz_norm(ns.square(), [3, 4]) == pytest.approx(5.0, rel=1e-10)


def test_orlicz_zero_vector(backend):
    assert ns.orlicz_norm(ns.huber(0.1), np.zeros(4)) == 0.0


def test_orlicz_golden_values(backend):
    gold = load_golden("orlicz_norms")
    assert ns.orlicz_norm(ns.huber(0.1), [1, 1]) == pytest.approx(gold["huber_0.1__1_1"], rel=1e-9)
    assert ns.orlicz_norm(ns.l1l2(), [3, -1, 0.5]) == pytest.approx(gold["l1l2__3_-1_0.5"], rel=1e-9)
    assert ns.orlicz_norm(ns.fair(1.0), [2, 2, 2]) == pytest.approx(gold["fair_1__2_2_2"], rel=1e-9)
    w = ns.SampleWeights([0, 1], [2.0, 1.0])
    assert ns.weighted_orlicz_norm(ns.huber(0.1), w, [0.3, 4]) == pytest.approx(
        gold["huber_0.1__w2_1__0.3_4"], rel=1e-9)


def test_orlicz_rejects_bad_input():
    with pytest.raises(InputError):
        ns.orlicz_norm(ns.huber(0.1), [1.0, np.inf])
    with pytest.raises(InputError):
        ns.orlicz_norm(ns.huber(0.1), [1.0], rel_tol=0.5)


def test_weighted_examples(backend, rng):
    G = ns.huber(0.1)
    y = rng.standard_normal(30)
    full = ns.SampleWeights.full(30)
    assert ns.weighted_orlicz_norm(G, full, y) == pytest.approx(ns.orlicz_norm(G, y), rel=REL_TOL)
    assert ns.weighted_orlicz_norm(G, ns.SampleWeights([], []), y) == 0.0
    w = ns.SampleWeights([0], [2.0])
    assert ns.weighted_orlicz_norm(ns.square(), w, [3.0, 5.0]) == pytest.approx(math.sqrt(18), rel=REL_TOL)


def test_negative_weight_rejected():
    with pytest.raises(InputError):
        ns.SampleWeights([0, 1], [1.0, -1.0])


def test_weights_below_one_bracket_downwards(backend):
    # f(max|y|) < 1 here, so the bracket must shrink
    w = ns.SampleWeights([0, 1], [0.01, 0.02])
    val = ns.weighted_orlicz_norm(ns.square(), w, [1.0, 2.0])
    assert val == pytest.approx(math.sqrt(0.01 + 0.08), rel=REL_TOL)


@pytest.mark.parametrize("G", GS, ids=lambda g: g.name)
def test_bisection_residual_within_lipschitz_band(G, backend, rng):
    for _ in range(50):
        y = rng.standard_normal(20) * rng.choice([0.01, 1, 100])
        w = rng.uniform(0.5, 5, 20)
        a = ns.norms.orlicz_roots(G, y[None, :], w, REL_TOL)[0]
        f = np.sum(w * G(y / a))
        L = np.sum(w * G.derivative(np.abs(y) / a) * np.abs(y) / a)
        assert abs(f - 1) <= 5 * REL_TOL * L + 1e-14


def test_single_coordinate_square():
    for w, y in [(2.0, 3.0), (7.5, -0.2), (1e-3, 40.0)]:
        val = ns.weighted_orlicz_norm(ns.square(), ns.SampleWeights([0], [w]), [y])
        assert val == pytest.approx(math.sqrt(w) * abs(y), rel=REL_TOL)


@pytest.mark.parametrize("G", GS, ids=lambda g: g.name)
def test_seminorm_triangle(G, rng):
    for _ in range(300):
        n = 25
        idx = np.sort(rng.choice(n, size=int(rng.integers(1, n)), replace=False))
        w = ns.SampleWeights(idx, rng.uniform(0.1, 10, idx.size))
        x, y = rng.standard_normal((2, n)) * rng.choice([0.01, 1, 100], size=(2, 1))
        nx, ny = ns.weighted_orlicz_norm(G, w, x), ns.weighted_orlicz_norm(G, w, y)
        assert ns.weighted_orlicz_norm(G, w, x + y) <= nx + ny + 10 * REL_TOL * (nx + ny)


def test_orlicz_gradient_matches_finite_difference(rng):
    G = ns.l1l2()
    r = rng.standard_normal(8)
    w = rng.uniform(0.5, 2, 8)
    a = ns.norms.orlicz_roots(G, r[None], w, 1e-13)[0]
    g = ns.norms.orlicz_gradient(G, r, a, w)
    h = 1e-5
    for i in range(8):
        e = np.zeros(8)
        e[i] = h
        fd = (ns.norms.orlicz_roots(G, (r + e)[None], w, 1e-13)[0]
              - ns.norms.orlicz_roots(G, (r - e)[None], w, 1e-13)[0]) / (2 * h)
        assert g[i] == pytest.approx(fd, rel=1e-4, abs=1e-8)
