"""Full-data solvers used as baselines and as test oracles."""
import numpy as np

from .errors import InputError, NumericalError
from .matrix import as_csr, as_vector, least_squares_solve
from .norms import Lp, MaxMix, Orlicz, SampleWeights, SumMix, TopK
from .orlicz import RegressionSolution, solve_weighted_orlicz


def exact_orlicz(A, b, G, tol=1e-12):
    A = as_csr(A)
    b = as_vector(b, "b")
    x, info = solve_weighted_orlicz(A, b, SampleWeights.full(A.shape[0]), G, tol=tol,
                                    max_iter=20000, return_info=True)
    return RegressionSolution(x=x, loss=Orlicz(G)(A @ x - b), support=A.shape[0],
                              diagnostics={"iterations": info.iterations,
                                           "converged": info.converged})


def _cvx_objective(cp, norm, r):
    if isinstance(norm, Lp):
        return cp.norm(r, "inf" if np.isinf(norm.p) else norm.p)
    if isinstance(norm, TopK):
        return cp.sum_largest(cp.abs(r), norm.k)
    if isinstance(norm, SumMix):
        return cp.norm(r, 2) + norm.c * cp.norm(r, 1)
    if isinstance(norm, MaxMix):
        return cp.maximum(cp.norm(r, 2), norm.c * cp.norm(r, 1))
    raise InputError(f"no convex formulation for {norm}")


def exact_regression(A, b, norm):
    """min_x ||Ax - b|| on the full data for any catalog norm."""
    A = as_csr(A)
    b = as_vector(b, "b")
    n = A.shape[0]
    if isinstance(norm, Orlicz):
        return exact_orlicz(A, b, norm.G)
    if isinstance(norm, Lp) and norm.p == 2.0:
        x = least_squares_solve(A.toarray(), b)
    else:
        import cvxpy as cp

        x_var = cp.Variable(A.shape[1])
        prob = cp.Problem(cp.Minimize(_cvx_objective(cp, norm, A @ x_var - b)))
        try:
            prob.solve(solver=cp.CLARABEL)
        except cp.SolverError as exc:
            raise NumericalError(f"convex solve failed: {exc}") from exc
        if x_var.value is None:
            raise NumericalError(f"convex solve ended with status {prob.status}")
        x = np.asarray(x_var.value, dtype=np.float64)
    return RegressionSolution(x=x, loss=norm(A @ x - b), support=n, diagnostics={})
