"""s-variation, Hölder, atomic and difference functionals on sampled paths.

The s-variation of a sampled path is the exact maximum over all increasing
subsequences of the sample points, found by the O(N^2) recursion

    best[j] = max_{i<j} best[i] + |v_j - v_i|^s,

which adds increments left to right, in the same order as the exhaustive
oracle. Float addition is monotone, so the two maxima agree bit for bit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import OracleLimitError, ParameterError, SpaceMismatchError
from .spaces import INF, Scalar, as_exponent, lp_aggregate

BRUTE_FORCE_MAX_N = 16


@dataclass(frozen=True)
class SampledPath:
    """Values ``values[i]`` of a function at strictly increasing ``times[i]``."""

    times: np.ndarray
    values: np.ndarray
    space: object

    def __post_init__(self):
        t = np.asarray(self.times, dtype=float)
        v = np.asarray(self.values, dtype=complex)
        if v.ndim == 1:
            v = v[:, None]
        self.space.check(v)
        if t.ndim != 1 or len(t) != len(v) or len(t) == 0:
            raise SpaceMismatchError("times and values must have equal positive length",
                                     times=t.shape, values=v.shape)
        if np.any(np.diff(t) <= 0):
            raise ParameterError("times must be strictly increasing")
        t.setflags(write=False)
        v.setflags(write=False)
        object.__setattr__(self, "times", t)
        object.__setattr__(self, "values", v)

    @classmethod
    def from_values(cls, values, space=None, times=None) -> "SampledPath":
        v = np.asarray(values, dtype=complex)
        if space is None:
            space = Scalar()
        if v.ndim == 1 and space.dimension == 1:
            v = v[:, None]
        if times is None:
            times = np.arange(len(v), dtype=float)
        return cls(times, v, space)

    @property
    def N(self) -> int:
        return len(self.times) - 1

    def sup_norm(self) -> float:
        return float(self.space.norms(self.values).max())


def _check_s(s):
    s = as_exponent(s, "variation exponent s")
    return s


def _distance_column(path: SampledPath, j: int) -> np.ndarray:
    return path.space.norms(path.values[j] - path.values[:j])


def pairwise_distances(path: SampledPath) -> np.ndarray:
    """Upper-triangular matrix D[i, j] = |v_j - v_i| for i < j."""
    M = path.N + 1
    D = np.zeros((M, M))
    for j in range(1, M):
        D[:j, j] = _distance_column(path, j)
    return D


def variation_power_sum(column, M: int, s: float, batch_shape=(), with_links=False):
    """Max over increasing index sequences of sum |increment|^s.

    ``column(j)`` returns the distances from points 0..j-1 to point j with
    shape ``batch_shape + (j,)``. Ties go to the earliest predecessor.
    """
    best = np.zeros(tuple(batch_shape) + (M,))
    links = np.zeros(tuple(batch_shape) + (M,), dtype=int) if with_links else None
    for j in range(1, M):
        cand = best[..., :j] + column(j) ** s
        if with_links:
            idx = np.argmax(cand, axis=-1)
            links[..., j] = idx
            best[..., j] = np.take_along_axis(cand, idx[..., None], -1)[..., 0]
        else:
            best[..., j] = cand.max(axis=-1)
    return best, links


def vs_partition(path: SampledPath, s) -> tuple[float, list[int]]:
    """V^s seminorm and an optimal partition (indices into the samples)."""
    s = _check_s(s)
    M = path.N + 1
    if M == 1:
        return 0.0, [0]
    if s is INF:
        D = pairwise_distances(path)
        i, j = np.unravel_index(np.argmax(D), D.shape)
        return float(D[i, j]), sorted({int(i), int(j)})
    best, links = variation_power_sum(lambda j: _distance_column(path, j), M, s,
                                      with_links=True)
    end = int(np.argmax(best))
    seq = [end]
    while seq[-1] != 0 and best[seq[-1]] > 0:
        seq.append(int(links[seq[-1]]))
    seq.reverse()
    return float(best[end] ** (1.0 / s)), seq


def vs_seminorm(path: SampledPath, s) -> float:
    """[f]_{V^s}: sup over sample subsequences of the l^s norm of increments.

    For s = inf this is the limit value, the largest distance between two samples.
    """
    s = _check_s(s)
    M = path.N + 1
    if M == 1:
        return 0.0
    if s is INF:
        return float(pairwise_distances(path).max())
    best, _ = variation_power_sum(lambda j: _distance_column(path, j), M, s)
    return float(best.max() ** (1.0 / s))


def vs_norm(path: SampledPath, s) -> float:
    """|f|_{V^s} = sup norm + [f]_{V^s}; V^inf is L^inf by convention."""
    s = _check_s(s)
    if s is INF:
        return path.sup_norm()
    return path.sup_norm() + vs_seminorm(path, s)


def brute_force_vs(path: SampledPath, s) -> float:
    """Exhaustive maximum over all 2^(N+1) subsequences (oracle, N <= 16)."""
    s = _check_s(s)
    if path.N > BRUTE_FORCE_MAX_N:
        raise OracleLimitError("path too long for exhaustive enumeration",
                               N=path.N, limit=BRUTE_FORCE_MAX_N)
    M = path.N + 1
    if M == 1:
        return 0.0
    D = pairwise_distances(path)
    if s is INF:
        return float(D.max())
    Ds = D**s
    masks = np.arange(1, 2**M, dtype=np.int64)
    acc = np.zeros(len(masks))
    last = np.full(len(masks), -1)
    for j in range(M):
        chosen = (masks >> j) & 1 == 1
        step = chosen & (last >= 0)
        acc[step] = acc[step] + Ds[last[step], j]
        last[chosen] = j
    return float(acc.max() ** (1.0 / s))


def ell_r_vs_norm(paths, r, s, homogeneous: bool = False) -> float:
    """l^r aggregate of per-interval V^s norms (seminorms if ``homogeneous``)."""
    r = as_exponent(r, "r")
    vals = [vs_seminorm(p, s) if homogeneous else vs_norm(p, s) for p in paths]
    return float(lp_aggregate(np.array(vals), r))


def holder_seminorm(path: SampledPath, alpha: float) -> float:
    if not 0 < alpha <= 1:
        raise ParameterError("Hölder exponent must lie in (0, 1]", alpha=alpha)
    if path.N < 1:
        raise ParameterError("Hölder norm needs at least two samples")
    D = pairwise_distances(path)
    dt = path.times[None, :] - path.times[:, None]
    iu = np.triu_indices(path.N + 1, 1)
    return float(np.max(D[iu] / dt[iu] ** alpha))


def holder_norm(path: SampledPath, alpha: float) -> float:
    """|f|_{C^alpha} = sup norm + max_{i<j} |v_i - v_j| / |t_i - t_j|^alpha."""
    return path.sup_norm() + holder_seminorm(path, alpha)


@dataclass(frozen=True)
class StepFunction:
    """Piecewise constant function: ``pieces[i]`` on [b_i, b_{i+1}), zero elsewhere.

    Zero pieces encode gaps, so any finite family of disjoint half-open
    intervals is representable.
    """

    breakpoints: np.ndarray
    pieces: np.ndarray
    space: object

    def __post_init__(self):
        b = np.asarray(self.breakpoints, dtype=float)
        c = np.asarray(self.pieces, dtype=complex)
        if c.ndim == 1:
            c = c[:, None]
        self.space.check(c)
        if b.ndim != 1 or len(b) != len(c) + 1:
            raise SpaceMismatchError("need one more breakpoint than pieces",
                                     breakpoints=b.shape, pieces=c.shape)
        if np.any(np.diff(b) <= 0):
            raise ParameterError("breakpoints must be strictly increasing")
        b.setflags(write=False)
        c.setflags(write=False)
        object.__setattr__(self, "breakpoints", b)
        object.__setattr__(self, "pieces", c)

    @classmethod
    def from_intervals(cls, intervals, values, space=None) -> "StepFunction":
        """Build from disjoint (a, b) pairs, inserting zero pieces in the gaps."""
        if space is None:
            space = Scalar()
        order = np.argsort([a for a, _ in intervals], kind="stable")
        vals = np.asarray(values, dtype=complex)
        if vals.ndim == 1:
            vals = vals[:, None]
        bps, pcs = [], []
        for k in order:
            a, b = intervals[k]
            if b <= a:
                raise ParameterError("empty interval", interval=(a, b))
            if bps:
                if a < bps[-1]:
                    raise ParameterError("intervals overlap", interval=(a, b))
                if a > bps[-1]:
                    pcs.append(np.zeros(space.dimension, dtype=complex))
                    bps.append(a)
            else:
                bps.append(a)
            pcs.append(vals[k])
            bps.append(b)
        return cls(np.array(bps), np.array(pcs), space)

    def __call__(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        idx = np.searchsorted(self.breakpoints, x, side="right") - 1
        inside = (idx >= 0) & (idx < len(self.pieces))
        out = np.zeros(x.shape + (self.space.dimension,), dtype=complex)
        out[inside] = self.pieces[idx[inside]]
        return out

    @property
    def support_length(self) -> float:
        return float(self.breakpoints[-1] - self.breakpoints[0])

    def to_path(self) -> SampledPath:
        """Samples that realise the continuum variation exactly.

        One point left of the support (value 0), every breakpoint and one
        interior point per piece.
        """
        b = self.breakpoints
        mids = 0.5 * (b[:-1] + b[1:])
        times = np.empty(2 * len(mids) + 2)
        times[0] = b[0] - 1.0
        times[1:-1:2] = b[:-1]
        times[2:-1:2] = mids
        times[-1] = b[-1]
        zero = np.zeros((1, self.space.dimension), dtype=complex)
        vals = np.concatenate([zero, np.repeat(self.pieces, 2, axis=0), zero])
        return SampledPath(times, vals, self.space)

    def scaled(self, factor) -> "StepFunction":
        return StepFunction(self.breakpoints, self.pieces * factor, self.space)


def rs_atom_upper(step: StepFunction, s) -> float:
    """(sum_I |c_I|^s)^(1/s): the step function as one scaled R^s atom.

    An upper bound for the atomic R^s norm, which is not computed exactly.
    """
    s = as_exponent(s, "s")
    return float(lp_aggregate(step.space.norms(step.pieces), s))


def difference_seminorm(step: StepFunction, r: float, h: float) -> float:
    """Exact value of the integral of |f(x+h) - f(x)|^r over the real line."""
    r = as_exponent(r, "r")
    if r is INF:
        raise ParameterError("difference seminorm needs finite r")
    if not h > 0:
        raise ParameterError("shift h must be positive", h=h)
    b = step.breakpoints
    cuts = np.unique(np.concatenate([b, b - h]))
    mids = 0.5 * (cuts[:-1] + cuts[1:])
    diff = step(mids + h) - step(mids)
    vals = step.space.norms(diff) ** r
    return float(math.fsum(vals * np.diff(cuts)))
