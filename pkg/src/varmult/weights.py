"""Discrete Muckenhoupt A_p constants and weighted Bochner norms.

Intervals are unions of whole grid cells. For every contiguous window the
quantity (mean w) * (mean w^(1-p'))^(p-1) is evaluated exactly; the A_p
constant is the maximum over all O(N^2) windows.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ParameterError, SpaceMismatchError
from .spaces import INF, as_exponent, dual_exponent


@dataclass(frozen=True)
class WeightGrid:
    """Positive samples of a weight on a uniform grid with the given spacing."""

    samples: np.ndarray
    spacing: float = 1.0

    def __post_init__(self):
        w = np.asarray(self.samples, dtype=float)
        if w.ndim != 1 or len(w) == 0:
            raise ParameterError("weight samples must be a nonempty 1-d array")
        if not np.all(np.isfinite(w)) or np.any(w <= 0):
            raise ParameterError("weight samples must be finite and positive")
        if not self.spacing > 0:
            raise ParameterError("spacing must be positive", spacing=self.spacing)
        w.setflags(write=False)
        object.__setattr__(self, "samples", w)
        object.__setattr__(self, "spacing", float(self.spacing))

    def __len__(self) -> int:
        return len(self.samples)

    def scaled(self, c: float) -> "WeightGrid":
        return WeightGrid(self.samples * c, self.spacing)


def constant_weight(N: int, period: float = 1.0, value: float = 1.0) -> WeightGrid:
    return WeightGrid(np.full(N, float(value)), period / N)


def power_weight(N: int, a: float, period: float = 1.0, center: float | None = None) -> WeightGrid:
    """|x - center|^a sampled at cell midpoints (never at the singularity)."""
    h = period / N
    if center is None:
        center = period / 2
    x = (np.arange(N) + 0.5) * h
    return WeightGrid(np.abs(x - center) ** a, h)


def step_weight(N: int, c: float, period: float = 1.0) -> WeightGrid:
    """1 on the first half of the period, c on the second half."""
    w = np.ones(N)
    w[N // 2:] = c
    return WeightGrid(w, period / N)


def weight_family(name: str, N: int, param: float, period: float = 1.0) -> WeightGrid:
    if name in {"constant", "one", "unweighted"}:
        return constant_weight(N, period, 1.0 if param is None else param)
    if name == "power":
        return power_weight(N, param, period)
    if name == "step":
        return step_weight(N, param, period)
    raise ParameterError("unknown weight family", name=name)


def _log_dual_power(w: WeightGrid, p: float):
    """log of w^(1-p'), computed without forming the power."""
    return (1.0 - dual_exponent(p)) * np.log(w.samples)


def window_ap_values(w: WeightGrid, p: float) -> np.ndarray:
    """Matrix A[i, j] of the A_p quantity on window cells i..j (NaN below diagonal)."""
    p = as_exponent(p, "p")
    if p is INF or p <= 1:
        raise ParameterError("A_p needs 1 < p < inf", p=p)
    lw = np.log(w.samples)
    ls = _log_dual_power(w, p)
    # Rescaling w and w^(1-p') separately leaves the product invariant up to
    # the exact factor restored below.
    cw, cs = lw.max(), ls.max()
    a = np.exp(lw - cw)
    b = np.exp(ls - cs)
    N = len(a)
    out = np.full((N, N), np.nan)
    counts = np.arange(1, N + 1, dtype=float)
    for i in range(N):
        mean_a = np.cumsum(a[i:]) / counts[: N - i]
        mean_b = np.cumsum(b[i:]) / counts[: N - i]
        out[i, i:] = np.exp(np.log(mean_a) + (p - 1) * np.log(mean_b) + cw + (p - 1) * cs)
    return out


def ap_constant(w: WeightGrid, p: float) -> float:
    """[w]_{A_p}: max over contiguous windows of (avg w)(avg w^(1-p'))^(p-1).

    The value is at least 1 by Jensen and non-increasing in p.
    """
    return float(np.nanmax(window_ap_values(w, p)))


def self_improvement_table(w: WeightGrid, p: float, epsilons) -> list[dict]:
    """Ratios [w]_{A_{p-eps}} / [w]_{A_p} for a sweep of eps in [0, p - 1)."""
    base = ap_constant(w, p)
    rows = []
    for eps in epsilons:
        if not 0 <= eps < p - 1:
            raise ParameterError("eps must lie in [0, p-1)", eps=eps)
        val = ap_constant(w, p - eps)
        rows.append({"eps": float(eps), "ap_p": base, "ap_p_minus_eps": val,
                     "ratio": val / base})
    return rows


def weighted_lp_norm(f, w: WeightGrid | None, p) -> float:
    """(sum_i |f(x_i)|_X^p w(x_i) dx)^(1/p); p = inf ignores w and returns the sup.

    ``f`` is a Signal (anything with ``samples``, ``space`` and ``spacing``).
    ``w=None`` means the unit weight.
    """
    p = as_exponent(p, "p")
    pointwise = f.space.norms(f.samples)
    return weighted_lp_of_values(pointwise, w, p, f.spacing)


def weighted_lp_of_values(values, w: WeightGrid | None, p, spacing: float) -> float:
    """Weighted L^p norm of a nonnegative grid function."""
    p = as_exponent(p, "p")
    values = np.asarray(values, dtype=float)
    if p is INF:
        return float(values.max())
    if w is None:
        weights = np.ones_like(values)
    else:
        if len(w) != len(values) or not np.isclose(w.spacing, spacing, rtol=1e-12, atol=0):
            raise SpaceMismatchError("weight grid does not match signal grid",
                                     weight_points=len(w), signal_points=len(values),
                                     weight_spacing=w.spacing, signal_spacing=spacing)
        weights = w.samples
    top = values.max()
    if top == 0:
        return 0.0
    return float(top * (np.sum((values / top) ** p * weights) * spacing) ** (1.0 / p))
