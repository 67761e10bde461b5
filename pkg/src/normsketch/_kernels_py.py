"""Pure NumPy implementations of the hot kernels.

Every function here mirrors one in ``_kernels.pyx`` with the same signature
and the same integer-level semantics (hashes, bucket choice, survival), so
the two backends differ only in floating-point summation order.
"""
import numpy as np
import scipy.sparse as sp

NAME = "python"

_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_MIX1 = np.uint64(0xBF58476D1CE4E5B9)
_MIX2 = np.uint64(0x94D049BB133111EB)

# builtin Orlicz kinds shared with the compiled kernel
SQUARE, ABS, HUBER, L1L2, FAIR, POWER = range(6)

MAX_BISECT = 64
MAX_EXPAND = 2100


def splitmix64(x):
    """Vectorised splitmix64 finaliser on uint64 input (wrapping arithmetic)."""
    z = np.asarray(x, dtype=np.uint64)
    with np.errstate(over="ignore"):
        z = z + _GOLDEN
        z = (z ^ (z >> np.uint64(30))) * _MIX1
        z = (z ^ (z >> np.uint64(27))) * _MIX2
    return z ^ (z >> np.uint64(31))


def _keyed(seed, ids):
    key = splitmix64(np.uint64(seed))
    return splitmix64(key ^ np.asarray(ids, dtype=np.uint64))


def buckets_and_signs(seed, ids, m):
    h = _keyed(seed, ids)
    bucket = ((h >> np.uint64(1)) % np.uint64(m)).astype(np.int64)
    sign = 1.0 - 2.0 * (h & np.uint64(1)).astype(np.float64)
    return bucket, sign


def survive_mask(seed, level, ids):
    """Keep mask for one level: each id survives with probability 2**-level."""
    ids = np.asarray(ids, dtype=np.uint64)
    if level == 0:
        return np.ones(ids.shape, dtype=bool)
    h = _keyed(seed, ids)
    return (h >> np.uint64(64 - level)) == 0


def spmv(indptr, indices, data, x):
    n = len(indptr) - 1
    A = sp.csr_matrix((data, indices, indptr), shape=(n, len(x)))
    return np.asarray(A @ x, dtype=np.float64)


def countsketch(indptr, indices, data, n_cols, m, seed):
    n = len(indptr) - 1
    bucket, sign = buckets_and_signs(seed, np.arange(n, dtype=np.uint64), m)
    S = sp.csr_matrix((sign, (bucket, np.arange(n))), shape=(m, n))
    A = sp.csr_matrix((data, indices, indptr), shape=(n, n_cols))
    return np.asarray((S @ A).toarray(), dtype=np.float64)


def symsketch(indptr, indices, data, n_cols, level_weights, survive_seed, bucket_seed, m):
    n = len(indptr) - 1
    rows = np.arange(n, dtype=np.uint64)
    rr, bb, vv = [], [], []
    for level, weight in enumerate(level_weights):
        ids = np.uint64(level) * np.uint64(n) + rows
        keep = survive_mask(survive_seed, level, ids)
        if not keep.any():
            continue
        bucket, sign = buckets_and_signs(bucket_seed, ids[keep], m)
        rr.append(np.flatnonzero(keep))
        bb.append(bucket)
        vv.append(sign * weight)
    A = sp.csr_matrix((data, indices, indptr), shape=(n, n_cols))
    if not rr:
        return np.zeros((m, n_cols))
    S = sp.csr_matrix(
        (np.concatenate(vv), (np.concatenate(bb), np.concatenate(rr))), shape=(m, n)
    )
    return np.asarray((S @ A).toarray(), dtype=np.float64)


def builtin_eval(kind, param, x):
    """G(|x|) for the builtin Orlicz kinds."""
    a = np.abs(x)
    if kind == SQUARE:
        return a * a
    if kind == ABS:
        return a
    if kind == HUBER:
        return np.where(a <= param, 0.5 * a * a, param * (a - 0.5 * param))
    if kind == L1L2:
        # 2(sqrt(1 + a^2/2) - 1) without cancellation
        return a * a / (np.sqrt(1.0 + 0.5 * a * a) + 1.0)
    if kind == FAIR:
        z = a / param
        small = z < 1e-4
        zs = np.where(small, z, 0.0)
        series = zs * zs * (0.5 - zs / 3.0 + zs * zs / 4.0)
        with np.errstate(invalid="ignore"):
            direct = z - np.log1p(z)
        return param * param * np.where(small, series, direct)
    if kind == POWER:
        return a**param
    raise ValueError(f"unknown Orlicz kind {kind}")


def orlicz_roots_generic(geval, rows, weights, rel_tol):
    """Solve sum_i w_i G(|y_i| / alpha) = 1 for every row y of ``rows``.

    ``rows`` has shape (k, n); ``weights`` is None (all ones) or shape (n,).
    Exponential search from max|y_i| over the weighted support, then
    bisection until the bracket is relatively narrower than ``rel_tol``.
    """
    Y = np.abs(np.atleast_2d(np.asarray(rows, dtype=np.float64)))
    k, n = Y.shape
    w = np.ones(n) if weights is None else np.asarray(weights, dtype=np.float64)
    out = np.zeros(k)
    live = (Y * w).sum(axis=1) > 0
    if not live.any():
        return out
    idx = np.flatnonzero(live)
    Y = Y[idx]
    support = w > 0
    a0 = np.where(support, Y, 0.0).max(axis=1)

    def f(alpha, sel):
        return (w * geval(Y[sel] * (1.0 / alpha)[:, None])).sum(axis=1)

    all_sel = np.arange(len(idx))
    fa = f(a0, all_sel)
    lo = a0.copy()
    hi = a0.copy()
    up = fa >= 1.0
    # grow hi until f(hi) < 1, or shrink lo until f(lo) >= 1
    sel = np.flatnonzero(up)
    for _ in range(MAX_EXPAND):
        if sel.size == 0:
            break
        cand = hi[sel] * 2.0
        done = f(cand, sel) < 1.0
        lo[sel] = hi[sel]
        hi[sel] = cand
        sel = sel[~done]
    sel = np.flatnonzero(~up)
    for _ in range(MAX_EXPAND):
        if sel.size == 0:
            break
        cand = lo[sel] * 0.5
        done = f(cand, sel) >= 1.0
        hi[sel] = lo[sel]
        lo[sel] = cand
        sel = sel[~done]

    sel = np.flatnonzero(hi - lo > rel_tol * hi)
    for _ in range(MAX_BISECT):
        if sel.size == 0:
            break
        mid = 0.5 * (lo[sel] + hi[sel])
        ge = f(mid, sel) >= 1.0
        lo[sel[ge]] = mid[ge]
        hi[sel[~ge]] = mid[~ge]
        sel = sel[hi[sel] - lo[sel] > rel_tol * hi[sel]]
    out[idx] = 0.5 * (lo + hi)
    return out


def orlicz_roots(kind, param, rows, weights, rel_tol):
    return orlicz_roots_generic(lambda x: builtin_eval(kind, param, x), rows, weights, rel_tol)
