"""Experiment configuration and the benchmark grid runner."""
import time
from dataclasses import dataclass, fields

import numpy as np

from . import norms
from .errors import InputError
from .exact import exact_regression
from .io import BenchmarkRecord, ingest_dataset
from .matrix import as_csr, as_vector
from .orlicz import draw_weights, orlicz_regression, solve_weighted_orlicz
from .rng import derive_seed
from .symnorm import symnorm_regression

METHODS = ("orlicz_sampling", "symsketch", "uniform_sampling", "exact")
SAMPLING_METHODS = ("orlicz_sampling", "uniform_sampling")


def parse_norm(spec, n=None):
    """Build a norm from strings like ``huber:0.1``, ``l1l2``, ``topk:0.2n``."""
    name, _, arg = spec.strip().lower().partition(":")

    def num(default=None):
        if not arg:
            if default is None:
                raise InputError(f"norm {name!r} needs a parameter, e.g. {name}:1.0")
            return default
        try:
            return float(arg)
        except ValueError:
            raise InputError(f"bad parameter {arg!r} for norm {name!r}") from None

    if name == "l2":
        return norms.Lp(2.0)
    if name == "l1":
        return norms.Lp(1.0)
    if name == "linf":
        return norms.Lp(float("inf"))
    if name == "lp":
        return norms.Lp(num())
    if name == "topk":
        if arg.endswith("n"):
            if n is None:
                raise InputError("relative top-k needs the row count")
            try:
                frac = float(arg[:-1])
            except ValueError:
                raise InputError(f"bad top-k fraction {arg!r}") from None
            return norms.TopK(max(1, int(round(frac * n))))
        k = num()
        if k != int(k):
            raise InputError(f"top-k needs an integer k or a fraction like 0.2n, got {arg!r}")
        return norms.TopK(int(k))
    if name == "summix":
        return norms.SumMix(num(1.0))
    if name == "maxmix":
        return norms.MaxMix(num(1.0))
    builtin_g = {
        "huber": lambda: norms.huber(num()),
        "l1l2": norms.l1l2,
        "fair": lambda: norms.fair(num(1.0)),
        "square": norms.square,
        "abs": norms.absolute,
        "power": lambda: norms.power(num()),
    }
    if name in builtin_g:
        return norms.Orlicz(builtin_g[name]())
    raise InputError(f"unknown norm {spec!r}")


def orlicz_function_of(norm):
    """The G behind an Orlicz-expressible norm, else None."""
    if isinstance(norm, norms.Orlicz):
        return norm.G
    if isinstance(norm, norms.Lp) and 1.0 <= norm.p <= 2.0:
        return norms.square() if norm.p == 2.0 else norms.power(norm.p)
    return None


def _bool(v):
    if isinstance(v, bool):
        return v
    s = str(v).strip().lower()
    if s in ("1", "true", "yes", "on"):
        return True
    if s in ("0", "false", "no", "off", ""):
        return False
    raise InputError(f"expected a boolean, got {v!r}")


def _ints(v):
    if isinstance(v, (list, tuple)):
        return tuple(int(x) for x in v)
    try:
        return tuple(int(x) for x in str(v).split(",") if x.strip())
    except ValueError:
        raise InputError(f"expected a comma-separated list of integers, got {v!r}") from None


def _strs(v):
    if isinstance(v, (list, tuple)):
        return tuple(v)
    return tuple(x.strip() for x in str(v).split(",") if x.strip())


@dataclass
class ExperimentConfig:
    data: str = None
    format: str = "csv"
    norm: str = "huber:0.1"
    method: tuple = ("orlicz_sampling",)
    sizes: tuple = (5, 10, 15, 20)
    reps: int = 25
    eps: float = 0.3
    delta: float = 0.1
    seed: int = 0
    C: float = 1.0
    out: str = "report.csv"
    deterministic: bool = False

    _casts = {
        "format": str, "norm": str, "data": str, "out": str,
        "method": _strs, "sizes": _ints, "reps": int, "eps": float, "delta": float,
        "seed": int, "C": float, "deterministic": _bool,
    }

    def __post_init__(self):
        if isinstance(self.method, str):
            self.method = _strs(self.method)
        self.validate()

    def validate(self):
        for m in self.method:
            if m not in METHODS:
                raise InputError(f"unknown method {m!r}; choose from {METHODS}")
        if not self.method:
            raise InputError("no method configured")
        if self.reps < 1:
            raise InputError("repetitions must be at least 1")
        if not self.sizes or any(s <= 0 for s in self.sizes):
            raise InputError("size multipliers must be positive")
        if not 0 < self.eps < 0.5:
            raise InputError("eps must lie in (0, 1/2)")
        if not 0 < self.delta < 0.5:
            raise InputError("delta must lie in (0, 1/2)")

    @classmethod
    def from_mapping(cls, mapping):
        known = {f.name for f in fields(cls)}
        kwargs = {}
        for key, value in mapping.items():
            key = key.strip()
            if key not in known:
                raise InputError(f"unknown config key {key!r}")
            try:
                kwargs[key] = cls._casts[key](value)
            except (TypeError, ValueError) as exc:
                raise InputError(f"bad value for {key}: {value!r}") from exc
        return cls(**kwargs)


def read_config_file(path):
    """Flat ``key = value`` lines; ``#`` starts a comment."""
    out = {}
    try:
        with open(path) as fh:
            lines = fh.readlines()
    except OSError as exc:
        raise InputError(f"cannot read config {path}: {exc}") from exc
    for lineno, line in enumerate(lines, start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise InputError(f"{path}:{lineno}: expected key=value")
        out[key.strip()] = value.strip()
    return out


def _uniform_weights(n, target, seed):
    p = np.full(n, min(1.0, target / n))
    return draw_weights(p, seed)


def run_one(method, A, b, norm, size, seed, cfg):
    """One benchmark cell: returns (loss, rows, x).

    ``size`` is the target row count as a multiple of d; None selects each
    method's own default (untargeted sampling, default sketch size).
    """
    n, d = A.shape
    target = None if size is None else size * d
    if method == "exact":
        sol = exact_regression(A, b, norm)
        return sol.loss, n, sol.x
    if method == "symsketch":
        sol = symnorm_regression(A, b, norm, seed, m2=target)
        return sol.loss, sol.support, sol.x
    G = orlicz_function_of(norm)
    if G is None:
        raise InputError(f"method {method} needs an Orlicz norm, got {norm}")
    if method == "orlicz_sampling":
        sol = orlicz_regression(A, b, G, cfg.eps, seed, delta=cfg.delta, C=cfg.C,
                                target_support=target)
        return sol.loss, sol.support, sol.x
    w = _uniform_weights(n, target if target is not None else 10 * d, seed)
    if len(w) == 0:
        return norm(b), 0, np.zeros(d)
    x = solve_weighted_orlicz(A, b, w, G)
    return norm(A @ x - b), len(w), x


def run_benchmark(cfg, A=None, b=None, progress=None):
    """Every (method, size, repetition) cell of the grid, in report order."""
    cfg.validate()
    if A is None:
        if cfg.data is None:
            raise InputError("no dataset configured")
        A, b = ingest_dataset(cfg.data, cfg.format)
    A = as_csr(A)
    b = as_vector(b, "b")
    norm = parse_norm(cfg.norm, A.shape[0])
    for method in cfg.method:
        if method in SAMPLING_METHODS and orlicz_function_of(norm) is None:
            raise InputError(f"method {method} is incompatible with norm {cfg.norm}")
    records = []
    exact_cache = None
    for method in sorted(cfg.method):
        for size in sorted(cfg.sizes):
            for rep in range(cfg.reps):
                seed = derive_seed(cfg.seed, method, size, rep)
                start = time.perf_counter()
                if method == "exact" and exact_cache is not None:
                    loss, rows, elapsed = exact_cache
                else:
                    loss, rows, _ = run_one(method, A, b, norm, size, seed, cfg)
                    elapsed = time.perf_counter() - start
                    if method == "exact":
                        exact_cache = (loss, rows, elapsed)
                records.append(BenchmarkRecord(method, cfg.norm, size, rep, seed, float(loss),
                                               max(elapsed, 1e-9), int(rows)))
                if progress is not None:
                    progress(records[-1])
    return records
