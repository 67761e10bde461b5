"""Seeded synthetic regression instances."""
import numpy as np
import scipy.sparse as sp

from .errors import InputError
from .rng import generator

KINDS = ("gaussian", "heavy")


def gaussian_instance(n, d, seed, noise=1.0, density=1.0):
    """A with i.i.d. N(0,1) entries (optionally sparsified), b = A x + noise."""
    rng = generator(seed, "synth", "gaussian")
    if density >= 1.0:
        A = rng.standard_normal((n, d))
    else:
        A = sp.random(n, d, density=density, format="csr", random_state=rng,
                      data_rvs=rng.standard_normal).toarray()
    x = rng.standard_normal(d)
    b = A @ x + noise * rng.standard_normal(n)
    return sp.csr_matrix(A), b


def heavy_instance(n, d, seed, heavy_fraction=0.01, heavy_scale=100.0, weak_scale=1e-2, df=2.0):
    """99% light rows, 1% heavy rows, Student-t noise.

    The last feature is nearly absent (scaled by ``weak_scale``) on light
    rows, so it is only identifiable from the heavy rows.
    """
    rng = generator(seed, "synth", "heavy")
    A = rng.standard_normal((n, d))
    n_heavy = max(1, int(round(heavy_fraction * n)))
    heavy = rng.choice(n, size=n_heavy, replace=False)
    light = np.ones(n, dtype=bool)
    light[heavy] = False
    A[light, d - 1] *= weak_scale
    A[heavy] *= heavy_scale
    x = rng.standard_normal(d)
    b = A @ x + rng.standard_t(df, size=n)
    return sp.csr_matrix(A), b


def make_instance(kind, n, d, seed, **kwargs):
    if n < d + 1 or d < 1:
        raise InputError(f"need n > d >= 1, got n={n}, d={d}")
    if kind == "gaussian":
        return gaussian_instance(n, d, seed, **kwargs)
    if kind == "heavy":
        return heavy_instance(n, d, seed, **kwargs)
    raise InputError(f"unknown instance kind {kind!r}; choose from {KINDS}")
