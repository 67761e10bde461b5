"""Sketch-and-solve regression under a symmetric norm.

One SymSketch application over [A | b] turns the problem into a small
least-squares solve; the returned loss is always the full-data norm.
"""
from .matrix import as_csr, as_vector, augment, least_squares_solve
from .orlicz import RegressionSolution
from .rng import derive_seed
from .sketch import apply_symsketch, build_symsketch


def symnorm_regression(A, b, norm, seed, m1=None, m2=None, repetitions=1):
    A = as_csr(A)
    b = as_vector(b, "b")
    Abar = augment(A, b)
    n, D = Abar.shape
    best = None
    for rep in range(max(1, int(repetitions))):
        S = build_symsketch(norm, n, D, derive_seed(seed, rep, "symsketch"), m1=m1, m2=m2)
        SAb = apply_symsketch(S, Abar)
        SA, Sb = SAb[:, :-1], SAb[:, -1]
        x = least_squares_solve(SA, Sb)
        sol = RegressionSolution(
            x=x,
            loss=norm(A @ x - b),
            support=S.rows,
            diagnostics={"sketch_rows": S.rows, "levels": S.t + 1, "repetition": rep},
        )
        if best is None or sol.loss < best.loss:
            best = sol
    return best
