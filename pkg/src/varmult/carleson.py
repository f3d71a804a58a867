"""Carleson maximal, variational Carleson and Rubio de Francia functionals.

On the periodic grid the partial Fourier sum C_a f(x) (modes k < a) is
piecewise constant in a, so the N + 1 cuts a = -N/2, ..., N/2 capture the
supremum over all real a. The increment of a -> C_a f(x) over [a, b) is
S_[a,b) f(x), so the V^q variation of this path equals the supremum over
finite families of disjoint intervals of the l^q sum of |S_I f(x)|.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations

import numpy as np

from .errors import OracleLimitError, ParameterError
from .multiplier import FrequencyInterval, Signal, frequency_projection
from .parallel import map_ordered
from .spaces import INF, as_exponent, dual_exponent
from .variation import variation_power_sum
from .weights import ap_constant, weighted_lp_norm, weighted_lp_of_values

MAX_VARIATIONAL_N = 4096
BRUTE_FORCE_MAX_N = 8
CHUNK_POINTS = 64


def _map_chunks(fn, n: int, chunk: int = CHUNK_POINTS) -> np.ndarray:
    parts = map_ordered(lambda s: fn(s, min(s + chunk, n)), range(0, n, chunk))
    return np.concatenate(parts)


@dataclass(frozen=True)
class IntervalFamily:
    """Pairwise disjoint frequency intervals."""

    intervals: tuple

    def __post_init__(self):
        ivs = tuple(self.intervals)
        for a, b in combinations(ivs, 2):
            if a.overlaps(b):
                raise ParameterError("family intervals overlap", first=(a.lo, a.hi),
                                     second=(b.lo, b.hi))
        object.__setattr__(self, "intervals", ivs)

    def __iter__(self):
        return iter(self.intervals)

    def __len__(self) -> int:
        return len(self.intervals)


def cuts(N: int) -> np.ndarray:
    """The N + 1 distinct cut positions -N/2, ..., N/2."""
    return np.arange(-N // 2, N // 2 + 1)


def partial_fourier(f: Signal, a) -> Signal:
    """C_a f: the sum of the modes k < a."""
    N = f.N
    lo = -N // 2
    if a <= lo:
        return Signal(np.zeros_like(f.samples), f.space, f.period)
    return frequency_projection(FrequencyInterval(lo, int(np.ceil(a))), f)


def _sorted_terms(f: Signal, support_tol: float):
    """Mode frequencies (ascending) and their spectra, dropping negligible modes."""
    N = f.N
    F = np.fft.fft(f.samples, axis=0) / N
    k = np.fft.fftfreq(N, 1.0 / N).round().astype(int)
    order = np.argsort(k, kind="stable")
    k, F = k[order], F[order]
    if support_tol > 0:
        mag = np.abs(F).max(axis=1)
        keep = mag > support_tol * mag.max() if mag.max() > 0 else mag > 0
        k, F = k[keep], F[keep]
    return k, F


def partial_sum_paths(f: Signal, start: int = 0, stop: int | None = None,
                      support_tol: float = 0.0) -> np.ndarray:
    """C_a f(x_i) for grid points start..stop-1, shape (points, cuts, dim).

    With ``support_tol = 0`` the cut axis has all N + 1 cuts. A positive
    tolerance drops modes whose coefficient is below ``support_tol`` times the
    largest one and keeps only the cuts where the path can change; the
    variation then moves by at most the l^1 mass of the dropped modes.
    """
    N = f.N
    stop = N if stop is None else stop
    k, F = _sorted_terms(f, support_tol)
    x = np.arange(start, stop)
    phase = np.exp(2j * np.pi * np.outer(x, k) / N)
    terms = phase[:, :, None] * F[None, :, :]
    out = np.zeros((len(x), len(k) + 1, f.space.dimension), dtype=complex)
    np.cumsum(terms, axis=1, out=out[:, 1:, :])
    return out


def carleson_maximal(f: Signal) -> np.ndarray:
    """C_* f(x) = max over cuts of |C_a f(x)|_X at every grid point."""

    def chunk(s, e):
        return f.space.norms(partial_sum_paths(f, s, e)).max(axis=1)

    return _map_chunks(chunk, f.N)


def variational_carleson(f: Signal, q, support_tol: float = 0.0) -> np.ndarray:
    """C_*^q f(x): V^q seminorm of a -> C_a f(x), at every grid point.

    Uses the same left-to-right recursion as ``variation.vs_seminorm``,
    vectorised across grid points.
    """
    q = as_exponent(q, "q")
    if f.N > MAX_VARIATIONAL_N:
        raise ParameterError("grid exceeds the cap for the variational operator",
                             N=f.N, cap=MAX_VARIATIONAL_N)

    def chunk(s, e):
        P = partial_sum_paths(f, s, e, support_tol)
        M = P.shape[1]

        def column(j):
            return f.space.norms(P[:, j:j + 1, :] - P[:, :j, :])

        if q is INF:
            out = np.zeros(P.shape[0])
            for j in range(1, M):
                out = np.maximum(out, column(j).max(axis=1))
            return out
        best, _ = variation_power_sum(column, M, q, batch_shape=(P.shape[0],))
        return best.max(axis=1) ** (1.0 / q)

    return _map_chunks(chunk, f.N)


def rubio_functional(f: Signal, family, q) -> np.ndarray:
    """(sum_{I in family} |S_I f(x)|_X^q)^(1/q) at every grid point."""
    q = as_exponent(q, "q")
    if not isinstance(family, IntervalFamily):
        family = IntervalFamily(tuple(family))
    if len(family) == 0:
        return np.zeros(f.N)
    norms = np.stack([f.space.norms(frequency_projection(I, f).samples) for I in family])
    if q is INF:
        return norms.max(axis=0)
    return np.sum(norms**q, axis=0) ** (1.0 / q)


@lru_cache(maxsize=None)
def _families(N: int) -> tuple:
    """All nonempty families of disjoint intervals [a, b) with ends in the cut set."""
    c = list(cuts(N))
    out = []

    def extend(start_idx, current):
        for i in range(start_idx, len(c)):
            for j in range(i + 1, len(c)):
                fam = current + [(c[i], c[j])]
                out.append(tuple(fam))
                extend(j, fam)

    extend(0, [])
    return tuple(out)


def enumerate_families(N: int) -> tuple:
    if N > BRUTE_FORCE_MAX_N:
        raise OracleLimitError("grid too large for family enumeration", N=N,
                               limit=BRUTE_FORCE_MAX_N)
    return _families(N)


def brute_force_variational_carleson(f: Signal, q) -> np.ndarray:
    """Oracle: max over every family of disjoint intervals, via explicit S_I f."""
    q = as_exponent(q, "q")
    fams = enumerate_families(f.N)
    intervals = sorted({iv for fam in fams for iv in fam})
    col = {iv: n for n, iv in enumerate(intervals)}
    norms = np.stack([f.space.norms(frequency_projection(FrequencyInterval(a, b), f).samples)
                      for a, b in intervals], axis=1)
    best = np.zeros(f.N)
    for fam in fams:
        vals = norms[:, [col[iv] for iv in fam]]
        agg = vals.max(axis=1) if q is INF else np.sum(vals**q, axis=1) ** (1.0 / q)
        best = np.maximum(best, agg)
    return best


def rubio_growth_experiment(space, p, q, weights, sizes, trials: int, seed: int,
                            degree: int = 8, support_tol: float = 1e-13) -> list[dict]:
    """Ratios |C_*^q f|_{L^p(w)} / |f|_{L^p(w;X)} over random trigonometric polynomials.

    ``weights`` maps a label to a callable ``N -> WeightGrid``. Signals are
    drawn per trial from a seed that does not depend on N, so every grid size
    sees the same underlying functions.
    """
    p = as_exponent(p, "p")
    q = as_exponent(q, "q")
    qd = dual_exponent(q)
    if p is INF or not p > qd:
        raise ParameterError(
            "need p > q' (the limiting case p = q' is known to be false)", p=p, q_dual=qd)
    rows = []
    for N in sizes:
        for label, make in weights.items():
            w = make(N)
            apc = ap_constant(w, p / qd) if p / qd > 1 else float("nan")
            for trial in range(trials):
                rng = np.random.default_rng([seed, trial])
                f = Signal.trig_polynomial(N, degree, space, rng)
                num = weighted_lp_of_values(variational_carleson(f, q, support_tol), w, p,
                                            f.spacing)
                den = weighted_lp_norm(f, w, p)
                rows.append({"N": N, "weight": label, "trial": trial,
                             "ap_constant": apc, "ratio": num / den})
    return rows


def max_ratio_by(rows, *keys) -> dict:
    out: dict = {}
    for r in rows:
        key = tuple(r[k] for k in keys)
        out[key] = max(out.get(key, -np.inf), r["ratio"])
    return out


__all__ = [
    "IntervalFamily", "brute_force_variational_carleson", "carleson_maximal", "cuts",
    "enumerate_families", "max_ratio_by", "partial_fourier", "partial_sum_paths",
    "rubio_functional", "rubio_growth_experiment", "variational_carleson",
]
