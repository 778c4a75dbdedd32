"""Deterministic numerical plumbing: quadrature, root finding, seeded sampling,
and self-normalized importance estimation.

Everything here is pure given its inputs; callers that need independent random
streams derive them by spawning a :class:`SeededGenerator` per task.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "Quadrature",
    "SeededGenerator",
    "ImportanceEstimate",
    "uniform_grid",
    "integrate_trapezoid",
    "find_root_monotone",
    "sample",
    "importance_estimate",
]


@dataclass(frozen=True)
class Quadrature:
    """Values of an integrand on a uniform grid, plus the grid step."""

    values: np.ndarray
    step: float

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        object.__setattr__(self, "values", values)
        if values.ndim != 1 or values.size < 2:
            raise ValueError("quadrature needs at least 2 node values")
        if not (self.step > 0):
            raise ValueError(f"step must be positive, got {self.step}")

    def integral(self) -> float:
        return integrate_trapezoid(self.values, self.step)


@dataclass(frozen=True)
class SeededGenerator:
    """Counter-based random source: identical (seed, stream) pairs give
    identical draws across runs and platforms.

    Each call to :func:`sample` constructs a fresh generator from the pair, so
    sampling is a pure function of (seed, stream, spec, n).  Use :meth:`spawn`
    to derive independent streams for replicates.
    """

    seed: int
    stream: int = 0

    def __post_init__(self):
        if not (0 <= int(self.seed) < 2**64):
            raise ValueError("seed must fit in an unsigned 64-bit integer")
        if int(self.stream) < 0:
            raise ValueError("stream id must be non-negative")

    def numpy_generator(self) -> np.random.Generator:
        return np.random.Generator(
            np.random.Philox(key=np.array([self.seed, self.stream], dtype=np.uint64))
        )

    def spawn(self, offset: int) -> "SeededGenerator":
        return SeededGenerator(self.seed, self.stream + int(offset))


@dataclass(frozen=True)
class ImportanceEstimate:
    estimate: float
    standard_error: float
    ess: float
    n: int


def uniform_grid(lo: float, hi: float, nodes: int) -> tuple[np.ndarray, float]:
    """Uniform grid on [lo, hi] with the given node count; returns (grid, step)."""
    if nodes < 2:
        raise ValueError("need at least 2 nodes")
    if not (hi > lo):
        raise ValueError("need hi > lo")
    grid = np.linspace(lo, hi, nodes)
    return grid, (hi - lo) / (nodes - 1)


def integrate_trapezoid(values, step: float) -> float:
    """Trapezoid rule on a uniform grid.  Exact for piecewise-linear integrands."""
    values = np.asarray(values, dtype=float)
    if values.ndim != 1 or values.size < 2:
        raise ValueError("need at least 2 values")
    if not (step > 0):
        raise ValueError(f"step must be positive, got {step}")
    if not np.all(np.isfinite(values)):
        bad = int(np.flatnonzero(~np.isfinite(values))[0])
        raise ValueError(f"non-finite integrand value at node {bad}: {values[bad]}")
    return float(np.trapezoid(values, dx=step))


def find_root_monotone(f, lo: float, hi: float, tol: float = 1e-10) -> float:
    """Bisection root of a continuous monotone function on [lo, hi].

    Stops when the bracket is narrower than `tol` (or an exact zero is hit).
    Raises if f(lo) and f(hi) have the same sign.
    """
    if not (hi > lo):
        raise ValueError("need hi > lo")
    flo, fhi = f(lo), f(hi)
    if flo == 0.0:
        return lo
    if fhi == 0.0:
        return hi
    if (flo > 0) == (fhi > 0):
        raise ValueError(
            f"f must change sign on the bracket: f({lo})={flo}, f({hi})={fhi}"
        )
    # bisection halves the bracket once per iteration; the cap is generous
    max_iter = max(1, math.ceil(math.log2(max((hi - lo) / tol, 2.0)))) + 8
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        fmid = f(mid)
        if fmid == 0.0:
            return mid
        if (fmid > 0) == (fhi > 0):
            hi, fhi = mid, fmid
        else:
            lo, flo = mid, fmid
        if hi - lo < tol:
            return 0.5 * (lo + hi)
    raise RuntimeError(f"bisection did not converge after {max_iter} iterations")


def sample(gen: SeededGenerator, spec, n: int):
    """Draw n values from a distribution descriptor.

    Descriptors are tuples:
        ("normal", mean, sd)
        ("gamma_rate", shape, rate)          # density ∝ x^{shape−1} e^{−rate·x}
        ("student_t", df)
        ("cauchy", loc, scale)
        ("dirichlet", alphas)
        ("multinomial", trials, probs)
        ("categorical", probs)               # integer labels 0..k−1

    Reproducible: same (gen, spec, n) always returns the same array.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    rng = gen.numpy_generator()
    kind = spec[0]
    if kind == "normal":
        _, mean, sd = spec
        if not sd > 0:
            raise ValueError(f"normal sd must be positive, got {sd}")
        return rng.normal(mean, sd, size=n)
    if kind == "gamma_rate":
        _, shape, rate = spec
        if not (shape > 0 and rate > 0):
            raise ValueError(f"gamma shape/rate must be positive, got {shape}, {rate}")
        return rng.gamma(shape, 1.0 / rate, size=n)
    if kind == "student_t":
        _, df = spec
        if not df > 0:
            raise ValueError(f"student-t df must be positive, got {df}")
        return rng.standard_t(df, size=n)
    if kind == "cauchy":
        _, loc, scale = spec
        if not scale > 0:
            raise ValueError(f"cauchy scale must be positive, got {scale}")
        return loc + scale * rng.standard_cauchy(size=n)
    if kind == "dirichlet":
        _, alphas = spec
        alphas = np.asarray(alphas, dtype=float)
        if alphas.ndim != 1 or alphas.size < 2 or not np.all(alphas > 0):
            raise ValueError("dirichlet needs >= 2 strictly positive parameters")
        return rng.dirichlet(alphas, size=n)
    if kind == "multinomial":
        _, trials, probs = spec
        probs = np.asarray(probs, dtype=float)
        if trials < 1 or not np.all(probs >= 0) or abs(probs.sum() - 1.0) > 1e-9:
            raise ValueError("multinomial needs trials >= 1 and probs on the simplex")
        return rng.multinomial(int(trials), probs, size=n)
    if kind == "categorical":
        _, probs = spec
        probs = np.asarray(probs, dtype=float)
        if not np.all(probs >= 0) or abs(probs.sum() - 1.0) > 1e-9:
            raise ValueError("categorical needs probs on the simplex")
        return rng.choice(probs.size, size=n, p=probs)
    raise ValueError(f"unknown distribution descriptor {kind!r}")


def importance_estimate(weight_fn, draws) -> ImportanceEstimate:
    """Self-normalized importance estimate of the weighted mean of `draws`.

    With weights w_i = weight_fn(draw_i) and values v_i = draw_i:
        estimate = Σ w_i v_i / Σ w_i
        se       = sqrt(Σ w_i² (v_i − estimate)²) / Σ w_i
        ess      = (Σ w_i)² / Σ w_i²
    Plain Monte Carlo is the weight ≡ 1 special case (estimate = sample mean,
    ess = n).
    """
    values = np.asarray(draws, dtype=float)
    if values.ndim != 1 or values.size < 1:
        raise ValueError("need at least 1 draw")
    w = np.asarray([weight_fn(d) for d in values], dtype=float)
    if not np.all(np.isfinite(w)):
        raise ValueError("importance weights must be finite")
    if np.any(w < 0):
        raise ValueError("importance weights must be non-negative")
    total = w.sum()
    if total == 0.0:
        raise ValueError("all importance weights are zero: proposal misses the target support")
    est = float((w * values).sum() / total)
    se = float(np.sqrt((w * w * (values - est) ** 2).sum()) / total)
    ess = float(total * total / (w * w).sum())
    return ImportanceEstimate(est, se, ess, int(values.size))
