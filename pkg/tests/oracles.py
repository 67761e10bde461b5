"""Independent reference computations used to freeze expected values.

Nothing here imports from normsketch.
"""
import json
import math
from pathlib import Path

import mpmath
import numpy as np

GOLDEN = Path(__file__).parent / "golden"

mpmath.mp.dps = 40


def huber_mp(x, c):
    x = abs(x)
    return x * x / 2 if x <= c else c * (x - c / 2)


def l1l2_mp(x):
    return 2 * (mpmath.sqrt(1 + x * x / 2) - 1)


def fair_mp(x, c):
    x = abs(x)
    return c * c * (x / c - mpmath.log(1 + x / c))


def orlicz_bisect_mp(G, y, weights=None, tol=mpmath.mpf("1e-30")):
    """High-precision root of sum w_i G(|y_i|/a) = 1 by plain bisection."""
    y = [mpmath.mpf(v) for v in y]
    w = [mpmath.mpf(1)] * len(y) if weights is None else [mpmath.mpf(v) for v in weights]
    if sum(wi * abs(yi) for wi, yi in zip(w, y)) == 0:
        return mpmath.mpf(0)
    f = lambda a: sum(wi * G(yi / a) for wi, yi in zip(w, y)) - 1
    lo, hi = mpmath.mpf("1e-30"), mpmath.mpf(1)
    while f(hi) > 0:
        hi *= 2
    while hi - lo > tol * hi:
        mid = (lo + hi) / 2
        if f(mid) > 0:
            lo = mid
        else:
            hi = mid
    return (lo + hi) / 2


def l1_circle_median(grid=2_000_001):
    """Median of |cos t| + |sin t| for t uniform on [0, 2pi): midpoint-rule
    quadrature of the CDF, inverted by bisection."""
    t = (np.arange(grid) + 0.5) * (2 * math.pi / grid)
    vals = np.abs(np.cos(t)) + np.abs(np.sin(t))
    cdf = lambda m: np.mean(vals <= m)
    lo, hi = 1.0, math.sqrt(2.0)
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        if cdf(mid) < 0.5:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def load_golden(name):
    with open(GOLDEN / f"{name}.json") as fh:
        return json.load(fh)


def write_golden():
    values = {
        "huber_0.1__1_1": float(orlicz_bisect_mp(lambda x: huber_mp(x, mpmath.mpf("0.1")), [1, 1])),
        "l1l2__3_-1_0.5": float(orlicz_bisect_mp(l1l2_mp, [3, -1, 0.5])),
        "fair_1__2_2_2": float(orlicz_bisect_mp(lambda x: fair_mp(x, 1), [2, 2, 2])),
        "huber_0.1__w2_1__0.3_4": float(
            orlicz_bisect_mp(lambda x: huber_mp(x, mpmath.mpf("0.1")), [0.3, 4], [2, 1])
        ),
    }
    GOLDEN.mkdir(exist_ok=True)
    with open(GOLDEN / "orlicz_norms.json", "w") as fh:
        json.dump(values, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return values


if __name__ == "__main__":
    print(write_golden())
