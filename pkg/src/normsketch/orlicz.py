"""Orlicz-norm regression by leverage-score row sampling.

Pipeline on the augmented matrix [A | b]:

1. embed with a SymSketch for the Orlicz norm, calibrate its scale on probe
   directions, and QR-decompose to get a well-conditioned basis R;
2. estimate Orlicz leverage scores G(3 * ||(A R^-1)_i||_2) with a JL sketch;
3. keep row i with probability p_i, weight 1/p_i;
4. minimise the weighted Orlicz seminorm of the residual over the kept rows.
"""
import math
import warnings
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg as sla
import scipy.optimize as so
import scipy.sparse as sp

from .errors import InputError, NumericalError, RankDeficientError
from .matrix import as_csr, as_vector, augment, estimate_row_norms, qr_decompose
from .norms import DEFAULT_REL_TOL, Orlicz, SampleWeights, orlicz_gradient, orlicz_roots
from .rng import derive_seed, generator
from .sketch import apply_symsketch, build_symsketch

N_PROBES = 500
LOWER_MARGIN = 1e-3
KAPPA_SLACK = 1.1
SCORE_INFLATION = 3.0
REFINE_LOW = 4
REFINE_HIGH = 2


@dataclass(frozen=True)
class ConditionedBasis:
    """R such that U = Abar R^-1 satisfies ||x||_2 <= ||Ux||_G <= kappa ||x||_2."""

    R: np.ndarray
    kappa: float
    scale: float = 1.0
    rho_min: float = 1.0
    rho_max: float = 1.0

    @property
    def Rinv(self):
        return sla.solve_triangular(self.R, np.eye(self.R.shape[0]), lower=False)


@dataclass(frozen=True)
class LeverageScores:
    u: np.ndarray
    row_norms: np.ndarray

    @property
    def total(self):
        return float(self.u.sum())


@dataclass
class RegressionSolution:
    x: np.ndarray
    loss: float
    support: int
    diagnostics: dict = field(default_factory=dict)


# ---------------------------------------------------------------------------
# Stage 1: well-conditioned basis


def _ratio_fn(Abar, PA, G, rel_tol):
    """rho(x) = ||PA x||_2 / ||Abar x||_G and its gradient, from one root solve."""

    def value_and_grad(x):
        ax = Abar @ x
        alpha = float(orlicz_roots(G, ax[None, :], None, rel_tol)[0])
        px = PA @ x
        top = np.linalg.norm(px)
        if not (alpha > 0 and top > 0):
            return np.nan, np.zeros_like(x)
        rho = top / alpha
        g_alpha = Abar.T @ orlicz_gradient(G, ax, alpha)
        return rho, (PA.T @ px) / (top * alpha) - rho * g_alpha / alpha

    return value_and_grad


def _refine(value_and_grad, x0, direction, max_iter=100):
    """Local search for an extreme of the ratio. The ratio is scale
    invariant, so BFGS can run unconstrained."""
    sgn = -float(direction)

    def fg(y):
        v, g = value_and_grad(y)
        if not np.isfinite(v):
            return np.inf, np.zeros_like(y)
        return sgn * v, sgn * g

    res = so.minimize(fg, x0 / np.linalg.norm(x0), jac=True, method="BFGS",
                      options={"maxiter": max_iter, "gtol": 1e-9})
    return sgn * float(res.fun)


def calibrate(Abar, PA, G, seed, probes=N_PROBES, refine=True, rel_tol=DEFAULT_REL_TOL):
    """Empirical extremes of ||PA x||_2 / ||Abar x||_G over random directions,
    sharpened by local search from the most extreme probes and from the
    extreme singular directions of PA."""
    D = Abar.shape[1]
    X = generator(seed, "calibration").standard_normal((D, probes))
    gnorm = Orlicz(G, rel_tol).columns(Abar @ X)
    ok = gnorm > 0
    if not ok.any():
        raise NumericalError("every calibration probe lies in the null space of [A | b]")
    rho = np.linalg.norm(PA @ X[:, ok], axis=0) / gnorm[ok]
    rho_min, rho_max = float(rho.min()), float(rho.max())
    if refine:
        fn = _ratio_fn(Abar, PA, G, rel_tol)
        Xok = X[:, ok]
        order = np.argsort(rho)
        # the small singular directions of PA are natural minimiser candidates
        Vt = np.linalg.svd(PA, full_matrices=False)[2]
        lows = [Xok[:, j] for j in order[:REFINE_LOW]] + list(Vt[-2:])
        highs = [Xok[:, j] for j in order[-REFINE_HIGH:]] + [Vt[0]]
        for x0 in lows:
            rho_min = min(rho_min, _refine(fn, x0, -1))
        for x0 in highs:
            rho_max = max(rho_max, _refine(fn, x0, +1))
    if not rho_min > 0:
        raise NumericalError("embedding collapses a column-space direction")
    return rho_min, rho_max


def well_conditioned_basis(Abar, G, seed, embedding=None, kappa=None, probes=N_PROBES,
                           refine=True, m1=None, m2=None):
    """Basis change R for the column space of ``Abar`` under ||.||_G.

    By default embeds with a SymSketch for the Orlicz norm and calibrates it.
    ``embedding`` may be ``"identity"`` or a callable returning the embedded
    dense matrix; pass ``kappa`` to skip calibration and trust the caller's
    distortion bound.
    """
    Abar = as_csr(Abar)
    n, D = Abar.shape
    if embedding is None:
        S = build_symsketch(Orlicz(G), n, D, derive_seed(seed, "basis-sketch"), m1=m1, m2=m2)
        PA = apply_symsketch(S, Abar)
    elif embedding == "identity":
        PA = Abar.toarray()
    else:
        PA = np.asarray(embedding(Abar), dtype=np.float64)
    if kappa is None:
        rho_min, rho_max = calibrate(Abar, PA, G, derive_seed(seed, "calibrate"), probes, refine)
        scale = 1.0 / (rho_min * (1.0 - LOWER_MARGIN))
        kappa = KAPPA_SLACK * rho_max / rho_min
    else:
        rho_min = rho_max = scale = 1.0
        if kappa < 1:
            raise InputError("kappa must be at least 1")
    _, R = qr_decompose(PA * (scale / kappa))
    return ConditionedBasis(R=R, kappa=float(kappa), scale=scale, rho_min=rho_min, rho_max=rho_max)


# ---------------------------------------------------------------------------
# Stages 2 and 3: leverage scores and sampling


def orlicz_leverage_scores(Abar, basis, G, seed):
    l = estimate_row_norms(Abar, basis.Rinv, seed)
    return LeverageScores(u=G(SCORE_INFLATION * l), row_norms=l)


def sampling_probabilities(u, eps, delta, d, C=1.0, target=None):
    """p_i = min(1, C (ln(1/delta) + d ln(1/eps)) eps^-2 u_i).

    With ``target`` set, the multiplier is instead chosen so that the
    expected support sum(p_i) equals ``target`` (capped at the number of
    rows with u_i > 0).
    """
    if not 0 < eps < 0.5:
        raise InputError(f"eps must lie in (0, 1/2), got {eps}")
    if not 0 < delta < 0.5:
        raise InputError(f"delta must lie in (0, 1/2), got {delta}")
    u = np.asarray(u, dtype=np.float64)
    if np.any(u < 0):
        raise InputError("leverage scores must be nonnegative")
    if target is None:
        lam = C * (math.log(1 / delta) + d * math.log(1 / eps)) / eps**2
        return np.minimum(1.0, lam * u)
    positive = int(np.count_nonzero(u))
    if target >= positive:
        return (u > 0).astype(np.float64)
    lo, hi = 0.0, 1.0 / u[u > 0].min()
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if np.minimum(1.0, mid * u).sum() < target:
            lo = mid
        else:
            hi = mid
    return np.minimum(1.0, hi * u)


def draw_weights(p, seed):
    """Keep row i with probability p_i and weight 1/p_i."""
    p = np.asarray(p, dtype=np.float64)
    coins = generator(seed, "row-sampling").random(p.shape[0])
    keep = np.flatnonzero(coins < p)
    return SampleWeights(keep, 1.0 / p[keep])


def sample_weights(u, eps, delta, d, seed, C=1.0):
    lev = u.u if isinstance(u, LeverageScores) else u
    return draw_weights(sampling_probabilities(lev, eps, delta, d, C), seed)


# ---------------------------------------------------------------------------
# Stage 4: weighted Orlicz solve


@dataclass
class SolveInfo:
    iterations: int = 0
    converged: bool = True
    underdetermined: bool = False
    objective: float = 0.0


def solve_weighted_orlicz(A, b, w, G, tol=1e-8, max_iter=3000, stall=10,
                          rel_tol=DEFAULT_REL_TOL, x0=None, return_info=False):
    """argmin_x ||A x - b||_{G,w} restricted to the support of ``w``.

    Preconditioned gradient descent (Barzilai-Borwein step, Armijo
    backtracking) in coordinates that whiten the weighted least-squares
    problem. The gradient comes from implicit differentiation of
    sum_i w_i G(|r_i|/alpha) = 1. Stops when the objective's relative
    decrease over ``stall`` iterations drops below ``tol``.
    """
    A = as_csr(A)
    b = as_vector(b, "b")
    if len(w) == 0:
        raise InputError("sample weights have empty support")
    idx, ww = w.indices, w.weights
    As = A[idx].toarray()
    bs = b[idx]
    d = A.shape[1]
    info = SolveInfo()
    sw = np.sqrt(ww)

    U, s, Vt = np.linalg.svd(sw[:, None] * As, full_matrices=False)
    rank = int(np.sum(s > 1e-12 * (s[0] if s.size and s[0] > 0 else 1.0)))
    info.underdetermined = rank < d
    if rank == 0:
        x = np.zeros(d)
        return (x, info) if return_info else x
    T = Vt[:rank].T / s[:rank]          # x = T z
    M = As @ T

    def objective(z):
        r = M @ z - bs
        return float(orlicz_roots(G, r[None, :], ww, rel_tol)[0]), r

    def gradient(r, alpha):
        return M.T @ orlicz_gradient(G, r, alpha, ww)

    if x0 is None:
        z = U[:, :rank].T @ (sw * bs)   # weighted least-squares start
    else:
        z = np.linalg.lstsq(T, np.asarray(x0, dtype=np.float64), rcond=None)[0]
    f, r = objective(z)
    scale0 = max(np.linalg.norm(bs, ord=np.inf), 1e-300)
    if f <= 1e-13 * scale0:
        info.objective = f
        x = T @ z
        return (x, info) if return_info else x

    g = gradient(r, f)
    best_z, best_f = z.copy(), f
    history = [f]
    step = 1.0 / max(np.linalg.norm(g), 1e-300) * max(f, 1e-300) * 0.1
    info.converged = False
    for it in range(1, max_iter + 1):
        gg = float(np.dot(g, g))
        if gg == 0.0:
            info.converged = True
            break
        t = step
        while True:
            zn = z - t * g
            fn, rn = objective(zn)
            if fn <= f - 1e-4 * t * gg or t < 1e-20:
                break
            t *= 0.5
        if fn > f * (1.0 - 4.0 * rel_tol):
            # a smaller decrease is below the accuracy of the norm evaluation
            info.converged = True
            break
        gn = gradient(rn, fn)
        sdiff, ydiff = zn - z, gn - g
        sy = float(np.dot(sdiff, ydiff))
        step = float(np.dot(sdiff, sdiff)) / sy if sy > 0 else t * 2.0
        z, f, r, g = zn, fn, rn, gn
        if f < best_f:
            best_z, best_f = z.copy(), f
        history.append(f)
        info.iterations = it
        if f <= 1e-13 * scale0:
            info.converged = True
            break
        if len(history) > stall and history[-stall - 1] - f <= tol * f:
            info.converged = True
            break
    if not info.converged:
        warnings.warn(f"weighted Orlicz solve stopped after {max_iter} iterations", RuntimeWarning)
    info.objective = best_f
    x = T @ best_z
    return (x, info) if return_info else x


# ---------------------------------------------------------------------------
# Full pipeline


def equilibrate(M):
    """Scale each column to unit l2 norm with its first nonzero entry positive.

    The column space is unchanged, and so is everything the sampling stages
    compute from it, but the result no longer depends on how the columns
    (in particular b) were scaled.
    """
    M = as_csr(M)
    csc = M.tocsc()
    scale = np.ones(M.shape[1])
    for j in range(M.shape[1]):
        col = csc.data[csc.indptr[j] : csc.indptr[j + 1]]
        if col.size:
            # csc rows are sorted, so col[0] is the first nonzero entry
            scale[j] = np.copysign(1.0 / np.linalg.norm(col), col[0])
    return as_csr(M @ sp.diags(scale))


def _basis_for(Abar, G, seed, m1, m2):
    """Basis for [A | b]; if b lies in the range of A, for A alone."""
    try:
        return Abar, well_conditioned_basis(Abar, G, seed, m1=m1, m2=m2), False
    except RankDeficientError as exc:
        if exc.column != Abar.shape[1] - 1 or Abar.shape[1] < 2:
            raise
    Ab = as_csr(Abar[:, :-1])
    return Ab, well_conditioned_basis(Ab, G, seed, m1=m1, m2=m2), True


def orlicz_regression(A, b, G, eps, seed, delta=0.1, C=1.0, repetitions=1,
                      target_support=None, solver_tol=1e-8, m1=None, m2=None):
    """(1+eps)-approximate argmin_x ||Ax - b||_G by leverage-score sampling.

    With ``repetitions > 1`` independent runs are made and the candidate with
    the smallest full-data loss is returned.
    """
    A = as_csr(A)
    b = as_vector(b, "b")
    Aeq = equilibrate(augment(A, b))
    norm = Orlicz(G)
    best = None
    for rep in range(max(1, int(repetitions))):
        Abar, basis, consistent = _basis_for(Aeq, G, derive_seed(seed, rep, "basis"), m1, m2)
        scores = orlicz_leverage_scores(Abar, basis, G, derive_seed(seed, rep, "scores"))
        p = sampling_probabilities(scores.u, eps, delta, Abar.shape[1], C, target_support)
        w = draw_weights(p, derive_seed(seed, rep, "sample"))
        if len(w) == 0:
            raise NumericalError("row sampling kept no rows")
        x, info = solve_weighted_orlicz(A, b, w, G, tol=solver_tol, return_info=True)
        loss = norm(A @ x - b)
        sol = RegressionSolution(
            x=x,
            loss=loss,
            support=len(w),
            diagnostics={
                "sum_p": float(p.sum()),
                "sum_u": scores.total,
                "kappa": basis.kappa,
                "iterations": info.iterations,
                "converged": info.converged,
                "underdetermined": info.underdetermined,
                "consistent": consistent,
                "repetition": rep,
            },
        )
        if best is None or sol.loss < best.loss:
            best = sol
    return best
