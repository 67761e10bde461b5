"""Monte Carlo estimates of norm concentration and embedding distortion."""
import math
from dataclasses import dataclass

import numpy as np

from .errors import InputError
from .matrix import as_csr
from .rng import generator

_CHUNK_ENTRIES = 2_000_000


@dataclass(frozen=True)
class DistortionReport:
    min_ratio: float
    max_ratio: float
    median_ratio: float
    trials: int
    skipped: int
    ratios: np.ndarray = None

    @property
    def spread(self):
        return self.max_ratio / self.min_ratio

    def failure_rate(self, floor):
        """Fraction of trials whose ratio fell below ``floor``."""
        return float(np.mean(self.ratios < floor)) if self.ratios is not None else 0.0


def _sphere_norms(norm, n, count, rng):
    """Norms of ``count`` uniform draws from the unit sphere in R^n."""
    out = np.empty(count)
    chunk = max(1, _CHUNK_ENTRIES // max(n, 1))
    for start in range(0, count, chunk):
        k = min(chunk, count - start)
        X = rng.standard_normal((n, k))
        X /= np.linalg.norm(X, axis=0)
        out[start : start + k] = norm.columns(X)
    return out


def estimate_median(norm, n, trials, seed):
    """Empirical median of ||x|| over uniform x on the unit sphere of R^n."""
    if trials < 100:
        raise InputError("estimate_median needs at least 100 trials")
    return float(np.median(_sphere_norms(norm, n, trials, generator(seed, "median", n))))


def flat_vector(k, n=None):
    """xi^(k): k entries equal to 1/sqrt(k), zero padded to length n."""
    n = k if n is None else n
    v = np.zeros(n)
    v[:k] = 1.0 / math.sqrt(k)
    return v


def k_grid(n):
    ks = [1 << j for j in range(int(math.log2(n)) + 1)]
    if ks[-1] != n:
        ks.append(n)
    return ks


def empirical_mmc(norm, n, seed, probes=10_000, median_trials=1000):
    """Lower bound on the maximum modulus of concentration of ``norm``.

    For each k on a doubling grid up to n, the sphere maximum of the norm
    restricted to R^k is replaced by the best of: a standard basis vector,
    the flat vector xi^(k), and ``probes`` random unit vectors.
    """
    if n < 2:
        raise InputError("empirical_mmc needs n >= 2")
    best = 0.0
    for k in k_grid(n):
        nk = norm.restrict(k)
        rng = generator(seed, "mmc", k)
        e1 = np.zeros(k)
        e1[0] = 1.0
        top = max(nk(e1), nk(flat_vector(k)), float(_sphere_norms(nk, k, probes, rng).max()))
        med = estimate_median(nk, k, median_trials, seed)
        best = max(best, top / med)
    return best


def measure_distortion(apply, A, norm, trials, seed, keep_ratios=True):
    """Ratios ||apply(Ax)||_2 / ||Ax||_norm over Gaussian x.

    ``apply`` maps an (n, k) array to an (m, k) array, columnwise.
    Draws with ||Ax|| = 0 are skipped and counted.
    """
    if trials < 1:
        raise InputError("measure_distortion needs at least one trial")
    A = as_csr(A) if not isinstance(A, np.ndarray) else A
    X = generator(seed, "distortion").standard_normal((A.shape[1], trials))
    Y = np.asarray(A @ X)
    denom = norm.columns(Y)
    ok = denom > 0
    E = np.asarray(apply(Y[:, ok]))
    if E.ndim == 1:
        E = E[:, None]
    ratios = np.linalg.norm(E, axis=0) / denom[ok]
    if ratios.size == 0:
        raise InputError("every draw had zero norm")
    return DistortionReport(
        min_ratio=float(ratios.min()),
        max_ratio=float(ratios.max()),
        median_ratio=float(np.median(ratios)),
        trials=int(trials),
        skipped=int((~ok).sum()),
        ratios=ratios if keep_ratios else None,
    )
