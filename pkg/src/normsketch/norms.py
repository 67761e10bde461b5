"""Symmetric norms and Orlicz-norm evaluation.

The catalog is closed: ``Lp``, ``TopK``, ``SumMix``, ``MaxMix`` and ``Orlicz``.
Every norm exposes ``__call__`` for a single vector and ``columns`` for the
column norms of an (n, k) array.
"""
import math
from dataclasses import dataclass, field

import numpy as np

from . import _backend
from . import _kernels_py as _py
from .errors import InputError

DEFAULT_REL_TOL = 1e-10
_GRID = np.logspace(-6, 6, 241)
_SLACK = 1e-9


# ---------------------------------------------------------------------------
# Orlicz functions


@dataclass(frozen=True, eq=False)
class OrliczFunction:
    """A convex, even, strictly increasing G with G(0) = 0.

    ``eval`` and ``deriv`` act elementwise on nonnegative arrays. ``deriv``
    may be None, in which case a symmetric difference is used.
    ``growth_constant`` is C_G with G(y)/G(x) <= C_G (y/x)^2 for 0 < x < y;
    it is verified on a log grid over [1e-6, 1e6] at construction.
    """

    eval: object
    deriv: object = None
    growth_constant: float = 1.0
    name: str = "custom"
    kind: int = None
    param: float = 0.0
    _checked: bool = field(default=False, repr=False)

    def __post_init__(self):
        if self.growth_constant < 1.0:
            raise InputError("growth constant C_G must be at least 1")
        if not self._checked:
            check_orlicz(self)

    def __call__(self, x):
        return np.asarray(self.eval(np.abs(np.asarray(x, dtype=np.float64))), dtype=np.float64)

    def derivative(self, x):
        """G'(|x|), one-sided from above at kinks."""
        a = np.abs(np.asarray(x, dtype=np.float64))
        if self.deriv is not None:
            return np.asarray(self.deriv(a), dtype=np.float64)
        h = 1e-6 * np.maximum(1.0, a)
        return (self(a + h) - self(np.maximum(a - h, 0.0))) / (a + h - np.maximum(a - h, 0.0))


def check_orlicz(G):
    """Spot-check the Orlicz assumptions on a grid; raise InputError on failure."""
    x = _GRID
    gx = G(x)
    g0 = float(G(np.zeros(1))[0])
    if g0 != 0.0:
        raise InputError(f"{G.name}: G(0) = {g0}, expected 0")
    if not np.allclose(G(-x), gx, rtol=1e-12, atol=0):
        raise InputError(f"{G.name}: G is not even")
    if not np.all(np.isfinite(gx)) or np.any(gx <= 0):
        raise InputError(f"{G.name}: G must be positive and finite on (0, inf)")
    if np.any(np.diff(gx) <= 0):
        raise InputError(f"{G.name}: G is not strictly increasing on the grid")
    lin = np.linspace(0.0, 10.0, 201)
    for pts in (x, lin):
        mid = G(0.5 * (pts[:-1] + pts[1:]))
        avg = 0.5 * (G(pts[:-1]) + G(pts[1:]))
        if np.any(mid > avg * (1 + _SLACK) + 1e-300):
            raise InputError(f"{G.name}: G fails the midpoint convexity test")
    ratio_g = gx[None, :] / gx[:, None]
    ratio_x = x[None, :] / x[:, None]
    upper = np.triu(np.ones_like(ratio_g, dtype=bool), k=1)
    if np.any(ratio_g[upper] > G.growth_constant * ratio_x[upper] ** 2 * (1 + _SLACK)):
        raise InputError(f"{G.name}: growth exceeds C_G (y/x)^2 with C_G={G.growth_constant}")
    if np.any(ratio_g[upper] < ratio_x[upper] * (1 - _SLACK)):
        raise InputError(f"{G.name}: G grows slower than linearly")


def _builtin(kind, param, name, deriv, growth=1.0):
    return OrliczFunction(
        eval=lambda a: _py.builtin_eval(kind, param, a),
        deriv=deriv,
        growth_constant=growth,
        name=name,
        kind=kind,
        param=float(param),
    )


def square():
    return _builtin(_py.SQUARE, 0.0, "square", lambda a: 2.0 * a)


def absolute():
    return _builtin(_py.ABS, 0.0, "abs", lambda a: np.ones_like(a))


def huber(c):
    """x^2/2 inside [-c, c], c(|x| - c/2) outside."""
    if not c > 0:
        raise InputError("huber parameter must be positive")
    c = float(c)
    return _builtin(_py.HUBER, c, f"huber:{c:g}", lambda a: np.where(a < c, a, c))


def l1l2():
    """2(sqrt(1 + x^2/2) - 1)."""
    return _builtin(_py.L1L2, 0.0, "l1l2", lambda a: a / np.sqrt(1.0 + 0.5 * a * a))


def fair(c):
    """c^2 (|x|/c - log(1 + |x|/c))."""
    if not c > 0:
        raise InputError("fair parameter must be positive")
    c = float(c)
    return _builtin(_py.FAIR, c, f"fair:{c:g}", lambda a: c * a / (c + a))


def power(p):
    """|x|^p for 1 <= p <= 2 (C_G = 1)."""
    if not 1.0 <= p <= 2.0:
        raise InputError("power Orlicz functions need 1 <= p <= 2")
    p = float(p)
    return _builtin(_py.POWER, p, f"power:{p:g}", lambda a: p * a ** (p - 1.0))


def from_callbacks(eval, deriv=None, growth_constant=1.0, name="custom"):
    """Register a user-supplied G; validated like the builtins."""
    return OrliczFunction(eval=eval, deriv=deriv, growth_constant=float(growth_constant), name=name)


# ---------------------------------------------------------------------------
# Sample weights


@dataclass(frozen=True, eq=False)
class SampleWeights:
    """Sparse nonnegative row weights; absent rows have weight zero."""

    indices: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        idx = np.asarray(self.indices, dtype=np.int64)
        w = np.asarray(self.weights, dtype=np.float64)
        if idx.shape != w.shape or idx.ndim != 1:
            raise InputError("indices and weights must be 1-D arrays of equal length")
        if np.any(w < 0) or not np.all(np.isfinite(w)):
            raise InputError("sample weights must be finite and nonnegative")
        if idx.size and (np.any(np.diff(idx) <= 0) or idx[0] < 0):
            raise InputError("sample indices must be strictly increasing and nonnegative")
        object.__setattr__(self, "indices", idx)
        object.__setattr__(self, "weights", w)

    @classmethod
    def full(cls, n):
        return cls(np.arange(n), np.ones(n))

    def __len__(self):
        return int(self.indices.size)

    def dense(self, n):
        out = np.zeros(n)
        out[self.indices] = self.weights
        return out


# ---------------------------------------------------------------------------
# Orlicz norm evaluation


def _check_tol(rel_tol):
    if not 0.0 < rel_tol <= 1e-2:
        raise InputError(f"rel_tol must lie in (0, 1e-2], got {rel_tol}")


def orlicz_roots(G, rows, weights=None, rel_tol=DEFAULT_REL_TOL):
    """Weighted Orlicz norms of each row of ``rows`` (shape (k, n))."""
    _check_tol(rel_tol)
    rows = np.ascontiguousarray(np.atleast_2d(rows), dtype=np.float64)
    if not np.all(np.isfinite(rows)):
        raise InputError("Orlicz norm of a non-finite vector")
    if weights is not None:
        weights = np.ascontiguousarray(weights, dtype=np.float64)
        if np.any(weights < 0):
            raise InputError("negative weight")
    if G.kind is not None:
        return _backend.kernels().orlicz_roots(G.kind, G.param, rows, weights, rel_tol)
    return _py.orlicz_roots_generic(G, rows, weights, rel_tol)


def orlicz_norm(G, y, rel_tol=DEFAULT_REL_TOL):
    """The alpha solving sum_i G(|y_i|/alpha) = 1, or 0 for y = 0."""
    y = np.asarray(y, dtype=np.float64).ravel()
    return float(orlicz_roots(G, y[None, :], None, rel_tol)[0])


def weighted_orlicz_norm(G, w, y, rel_tol=DEFAULT_REL_TOL):
    """The seminorm ||y||_{G,w}: root of sum_i w_i G(|y_i|/alpha) = 1."""
    y = np.asarray(y, dtype=np.float64).ravel()
    if len(w) == 0:
        _check_tol(rel_tol)
        return 0.0
    if w.indices[-1] >= y.size:
        raise InputError("sample weights index past the end of y")
    return float(orlicz_roots(G, y[w.indices][None, :], w.weights, rel_tol)[0])


def orlicz_gradient(G, r, alpha, weights=None):
    """d alpha / d r for alpha = ||r||_{G,w}, by implicit differentiation."""
    r = np.asarray(r, dtype=np.float64)
    if alpha <= 0:
        return np.zeros_like(r)
    w = np.ones_like(r) if weights is None else np.asarray(weights, dtype=np.float64)
    a = np.abs(r) / alpha
    gp = w * G.derivative(a)
    den = float(np.dot(gp, a))
    if den <= 0:
        return np.zeros_like(r)
    return gp * np.sign(r) / den


# ---------------------------------------------------------------------------
# Symmetric norm catalog


def _l2_columns(Y):
    """Column l2 norms, scaled by the column max so squares neither
    underflow nor overflow."""
    m = np.abs(Y).max(axis=0, initial=0.0)
    safe = np.where(m > 0, m, 1.0)
    Z = Y / safe
    return m * np.sqrt(np.einsum("ij,ij->j", Z, Z))


class SymmetricNorm:
    """Base class: subclasses implement ``columns`` and ``ones_norm``."""

    def __call__(self, y):
        y = np.asarray(y, dtype=np.float64).ravel()
        return float(self.columns(y[:, None])[0])

    def columns(self, Y):  # pragma: no cover - abstract
        raise NotImplementedError

    def ones_norm(self, m):
        """Norm of a vector holding m ones (zero padding is irrelevant)."""
        raise NotImplementedError  # pragma: no cover

    def restrict(self, k):
        """The same norm acting on R^k (used for the mmc grid)."""
        return self

    @property
    def unit(self):
        return self.ones_norm(1)


@dataclass(frozen=True)
class Lp(SymmetricNorm):
    p: float = 2.0

    def __post_init__(self):
        if not (self.p >= 1.0):
            raise InputError(f"l_p needs p >= 1, got {self.p}")

    def columns(self, Y):
        Y = np.asarray(Y, dtype=np.float64)
        if self.p == 2.0:
            return _l2_columns(Y)
        if math.isinf(self.p) or self.p == 1.0:
            return np.linalg.norm(Y, ord=self.p, axis=0)
        m = np.abs(Y).max(axis=0, initial=0.0)
        return m * np.linalg.norm(Y / np.where(m > 0, m, 1.0), ord=self.p, axis=0)

    def ones_norm(self, m):
        return 1.0 if math.isinf(self.p) else float(m) ** (1.0 / self.p)

    def __str__(self):
        return "linf" if math.isinf(self.p) else f"l{self.p:g}"


@dataclass(frozen=True)
class TopK(SymmetricNorm):
    """Sum of the k largest magnitudes."""

    k: int

    def __post_init__(self):
        if int(self.k) != self.k or self.k < 1:
            raise InputError(f"top-k needs a positive integer k, got {self.k}")

    def columns(self, Y):
        A = np.abs(np.asarray(Y, dtype=np.float64))
        n = A.shape[0]
        if self.k > n:
            raise InputError(f"top-k with k={self.k} on a vector of length {n}")
        if self.k == n:
            return A.sum(axis=0)
        part = np.partition(A, n - self.k, axis=0)[n - self.k :]
        return part.sum(axis=0)

    def ones_norm(self, m):
        return float(min(self.k, m))

    def restrict(self, k):
        return TopK(min(self.k, k))

    def __str__(self):
        return f"topk:{self.k}"


@dataclass(frozen=True)
class SumMix(SymmetricNorm):
    """||y||_2 + c ||y||_1."""

    c: float = 1.0

    def __post_init__(self):
        if not self.c > 0:
            raise InputError("sum-mix needs c > 0")

    def columns(self, Y):
        Y = np.asarray(Y, dtype=np.float64)
        return _l2_columns(Y) + self.c * np.abs(Y).sum(axis=0)

    def ones_norm(self, m):
        return math.sqrt(m) + self.c * m

    def __str__(self):
        return f"summix:{self.c:g}"


@dataclass(frozen=True)
class MaxMix(SymmetricNorm):
    """max(||y||_2, c ||y||_1)."""

    c: float = 1.0

    def __post_init__(self):
        if not self.c > 0:
            raise InputError("max-mix needs c > 0")

    def columns(self, Y):
        Y = np.asarray(Y, dtype=np.float64)
        return np.maximum(_l2_columns(Y), self.c * np.abs(Y).sum(axis=0))

    def ones_norm(self, m):
        return max(math.sqrt(m), self.c * m)

    def __str__(self):
        return f"maxmix:{self.c:g}"


@dataclass(frozen=True)
class Orlicz(SymmetricNorm):
    G: OrliczFunction
    rel_tol: float = DEFAULT_REL_TOL

    def columns(self, Y):
        Y = np.asarray(Y, dtype=np.float64)
        return orlicz_roots(self.G, Y.T, None, self.rel_tol)

    def ones_norm(self, m):
        return float(orlicz_roots(self.G, np.ones((1, 1)), np.array([float(m)]), self.rel_tol)[0])

    def __str__(self):
        return self.G.name


def eval_symmetric_norm(norm, y):
    y = np.asarray(y, dtype=np.float64)
    if not np.all(np.isfinite(y)):
        raise InputError("norm of a non-finite vector")
    return norm(y)


def max_level(n):
    return math.ceil(math.log2(max(n, 2)))


def level_weight(norm, i, n):
    """||(1, ..., 1, 0, ..., 0)||_norm with 2**i ones.

    Levels run up to ceil(log2 n), the depth of a sketch over n rows.
    """
    if i < 0 or i > max_level(n):
        raise InputError(f"level {i} exceeds the sketch depth {max_level(n)} for n={n}")
    return norm.ones_norm(2**i)
