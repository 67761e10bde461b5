"""Oblivious embeddings: CountSketch, Gaussian, their composition, SymSketch.

All hashing (CountSketch buckets/signs, SymSketch row survival) is a pure
function of (seed, row id), so applications are order independent and
reproducible bit for bit on a given backend.
"""
import math
from dataclasses import dataclass, field

import numpy as np

from . import _backend
from . import _kernels_py as _py
from .errors import DimensionError, InputError
from .matrix import as_csr, csr_arrays
from .norms import level_weight, max_level
from .rng import derive_seed, generator

CS_ROWS_PER_D2 = 100
GAUSS_ROWS_PER_D = 100
_BLOCK = 256


@dataclass(frozen=True)
class CountSketchOp:
    m: int
    n: int
    seed: int

    def buckets(self):
        """(h, sigma) for every source row, materialised for inspection."""
        return _py.buckets_and_signs(self.seed, np.arange(self.n, dtype=np.uint64), self.m)


@dataclass(frozen=True)
class GaussianOp:
    m: int
    n: int
    seed: int
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    @property
    def scale(self):
        return 1.0 / math.sqrt(self.m)

    def matrix(self):
        """The m x n standard normal matrix (unscaled), generated in row blocks."""
        G = self._cache.get("G")
        if G is None:
            rng = generator(self.seed, "gaussian")
            G = np.empty((self.m, self.n))
            for start in range(0, self.m, _BLOCK):
                stop = min(start + _BLOCK, self.m)
                G[start:stop] = rng.standard_normal((stop - start, self.n))
            self._cache["G"] = G
        return G


def apply_countsketch(cs, A):
    A = as_csr(A)
    if A.shape[0] != cs.n:
        raise DimensionError(f"CountSketch expects {cs.n} rows, got {A.shape[0]}")
    return _backend.kernels().countsketch(*csr_arrays(A), A.shape[1], cs.m, np.uint64(cs.seed))


def apply_gaussian(g, M):
    M = np.asarray(M, dtype=np.float64)
    if M.ndim == 1:
        M = M[:, None]
    if M.shape[0] != g.n:
        raise DimensionError(f"Gaussian embedding expects {g.n} rows, got {M.shape[0]}")
    return (g.matrix() @ M) * g.scale


def composed_sizes(n, d):
    return min(CS_ROWS_PER_D2 * d * d, n), GAUSS_ROWS_PER_D * d


def build_composed(n, d, seed, m1=None, m2=None):
    """CountSketch to m1 rows followed by a Gaussian to m2 rows.

    Defaults: m1 = min(100 d^2, n), m2 = 100 d.
    """
    if n < 1 or d < 1:
        raise InputError("build_composed needs n >= 1 and d >= 1")
    dm1, dm2 = composed_sizes(n, d)
    m1 = dm1 if m1 is None else int(m1)
    m2 = dm2 if m2 is None else int(m2)
    cs = CountSketchOp(m1, n, derive_seed(seed, "composed", "countsketch"))
    g = GaussianOp(m2, m1, derive_seed(seed, "composed", "gaussian"))
    return cs, g


def apply_composed(ops, A):
    cs, g = ops
    return apply_gaussian(g, apply_countsketch(cs, A))


@dataclass(frozen=True)
class SymSketch:
    """S = Pi D~: t+1 Bernoulli(2^-i) row-subsampling levels scaled by the
    level weights, stacked, then CountSketch and Gaussian stages."""

    norm: object
    n: int
    t: int
    level_weights: np.ndarray
    survive_seed: int
    countsketch: CountSketchOp
    gaussian: GaussianOp

    @property
    def rows(self):
        return self.gaussian.m

    def survivors(self, level):
        """Row ids kept at ``level``."""
        ids = np.uint64(level) * np.uint64(self.n) + np.arange(self.n, dtype=np.uint64)
        return np.flatnonzero(_py.survive_mask(self.survive_seed, level, ids))


def build_symsketch(norm, n, d, seed, m1=None, m2=None):
    """SymSketch for ``norm`` on n rows with column budget d.

    t = ceil(log2 max(n, 2)); the composed stage acts on n (t+1) conceptual
    rows.
    """
    if n < 1:
        raise InputError("build_symsketch needs n >= 1")
    t = max_level(n)
    weights = np.array([level_weight(norm, i, n) for i in range(t + 1)])
    total = n * (t + 1)
    cs, g = build_composed(total, d, derive_seed(seed, "symsketch"), m1=m1, m2=m2)
    return SymSketch(
        norm=norm,
        n=n,
        t=t,
        level_weights=weights,
        survive_seed=derive_seed(seed, "symsketch", "survive"),
        countsketch=cs,
        gaussian=g,
    )


def apply_symsketch(S, A, levels=None):
    """S @ A without materialising the stacked diagonal stage.

    ``levels`` optionally restricts the sum to a subset of level indices
    (other levels contribute nothing).
    """
    A = as_csr(A)
    if A.shape[0] != S.n:
        raise DimensionError(f"SymSketch expects {S.n} rows, got {A.shape[0]}")
    weights = S.level_weights
    if levels is not None:
        mask = np.zeros_like(weights)
        mask[list(levels)] = 1.0
        weights = weights * mask
    CA = _backend.kernels().symsketch(
        *csr_arrays(A),
        A.shape[1],
        np.ascontiguousarray(weights, dtype=np.float64),
        np.uint64(S.survive_seed),
        np.uint64(S.countsketch.seed),
        S.countsketch.m,
    )
    return apply_gaussian(S.gaussian, CA)
