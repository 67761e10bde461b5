"""Matrix storage helpers and the deterministic linear-algebra kernels.

Sparse inputs are held as ``scipy.sparse.csr_matrix`` with int64 indices and
no stored zeros; small dense matrices are plain ``numpy`` arrays.
"""
import math

import numpy as np
import scipy.linalg as sla
import scipy.sparse as sp

from . import _backend
from .errors import DimensionError, InputError, RankDeficientError
from .rng import generator

RANK_TOL = 1e-12


def as_csr(A):
    """Validate and normalise ``A`` to a canonical CSR matrix.

    Accepts anything ``scipy.sparse.csr_matrix`` accepts. Explicit zeros are
    dropped, indices sorted and stored as int64, entries must be finite.
    """
    if isinstance(A, sp.csr_matrix) and A.indices.dtype == np.int64 and A.has_canonical_format:
        if A.dtype == np.float64 and A.nnz == np.count_nonzero(A.data):
            return A
    M = sp.csr_matrix(A, dtype=np.float64, copy=True)
    if M.ndim != 2:
        raise DimensionError("expected a 2-D matrix")
    if not np.all(np.isfinite(M.data)):
        raise InputError("matrix has non-finite entries")
    M.eliminate_zeros()
    M.sum_duplicates()
    M.sort_indices()
    M.indptr = M.indptr.astype(np.int64)
    M.indices = M.indices.astype(np.int64)
    return M


def as_vector(x, name="vector"):
    v = np.asarray(x, dtype=np.float64)
    if v.ndim != 1:
        raise DimensionError(f"{name} must be one-dimensional")
    if not np.all(np.isfinite(v)):
        raise InputError(f"{name} has non-finite entries")
    return v


def csr_arrays(A):
    """(indptr, indices, data) as contiguous int64/int64/float64 arrays."""
    return (
        np.ascontiguousarray(A.indptr, dtype=np.int64),
        np.ascontiguousarray(A.indices, dtype=np.int64),
        np.ascontiguousarray(A.data, dtype=np.float64),
    )


def augment(A, b):
    """The n x (d+1) matrix [A | b]."""
    A = as_csr(A)
    b = as_vector(b, "b")
    if b.shape[0] != A.shape[0]:
        raise DimensionError(f"b has length {b.shape[0]}, A has {A.shape[0]} rows")
    return as_csr(sp.hstack([A, sp.csr_matrix(b[:, None])], format="csr"))


def spmv(A, x):
    A = as_csr(A)
    x = as_vector(x, "x")
    if x.shape[0] != A.shape[1]:
        raise DimensionError(f"x has length {x.shape[0]}, A has {A.shape[1]} columns")
    return _backend.kernels().spmv(*csr_arrays(A), np.ascontiguousarray(x))


def qr_decompose(M):
    """Householder QR with a nonnegative diagonal on R.

    Raises RankDeficientError naming the first column whose diagonal entry
    falls below ``1e-12 * ||M||_F``.
    """
    M = np.asarray(M, dtype=np.float64)
    if M.ndim != 2:
        raise DimensionError("qr_decompose expects a 2-D array")
    n, d = M.shape
    if n < d:
        raise DimensionError(f"need at least as many rows as columns, got {n}x{d}")
    Q, R = np.linalg.qr(M, mode="reduced")
    signs = np.where(np.diag(R) < 0, -1.0, 1.0)
    Q = Q * signs
    R = signs[:, None] * R
    tol = RANK_TOL * np.linalg.norm(M)
    small = np.flatnonzero(np.abs(np.diag(R)) <= tol)
    if small.size:
        raise RankDeficientError(int(small[0]))
    return Q, R


def least_squares_solve(M, c):
    """argmin_x ||Mx - c||_2; minimum-norm solution when M lacks full column rank."""
    M = np.asarray(M, dtype=np.float64)
    c = as_vector(c, "c")
    if c.shape[0] != M.shape[0]:
        raise DimensionError(f"c has length {c.shape[0]}, M has {M.shape[0]} rows")
    if M.shape[0] >= M.shape[1]:
        try:
            Q, R = qr_decompose(M)
        except RankDeficientError:
            pass
        else:
            return sla.solve_triangular(R, Q.T @ c, lower=False)
    return np.linalg.lstsq(M, c, rcond=None)[0]


def jl_width(n):
    return math.ceil(20.0 * math.log(max(n, 2)))


def estimate_row_norms(A, Rinv, seed):
    """JL estimates of the row l2 norms of ``A @ Rinv``.

    Multiplies by a d x k Gaussian test matrix with N(0, 1/k) entries,
    k = ceil(20 ln n), so the cost is O(nnz(A) k + d^2 k).
    """
    A = as_csr(A)
    Rinv = np.asarray(Rinv, dtype=np.float64)
    d = A.shape[1]
    if Rinv.shape != (d, d):
        raise DimensionError(f"Rinv must be {d}x{d}, got {Rinv.shape}")
    k = jl_width(A.shape[0])
    T = generator(seed, "jl-rows").standard_normal((d, k)) / math.sqrt(k)
    Y = A @ (Rinv @ T)
    return np.sqrt(np.einsum("ij,ij->i", Y, Y))
