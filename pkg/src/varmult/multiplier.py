"""Periodic discrete model of operator-valued Fourier multipliers.

A signal has N samples (N a power of two) over one period; its frequencies
are the integers in [-N/2, N/2). The forward DFT is the plain sum and the
inverse carries the 1/N factor (numpy's convention), so
|f|_{L^2}^2 = (period/N^2) * sum_k |f^(k)|^2.

Dyadic partition on the grid: the zero frequency is its own cell, the blocks
are +[2^j, 2^(j+1)) and -[2^j, 2^(j+1)) = (-2^(j+1), -2^j] intersected with
the band, and the unpaired Nyquist frequency -N/2 joins the topmost
negative block.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ParameterError, SpaceMismatchError
from .spaces import (INF, OperatorSpace, OperatorValue, SequenceP, SpaceDescriptor,
                     as_exponent, dual_exponent, operator_norm_witness, power_ascent)
from .variation import SampledPath, vs_seminorm
from .weights import WeightGrid, weighted_lp_norm

ZERO_CELL_SEPARATE = True
NYQUIST_POLICY = "joins topmost negative block"


def _check_grid(N: int) -> int:
    if int(N) != N or N < 2 or (int(N) & (int(N) - 1)):
        raise ParameterError("grid size must be a power of two >= 2", N=N)
    return int(N)


def frequencies(N: int) -> np.ndarray:
    """Integer frequencies in DFT order: 0, 1, ..., N/2-1, -N/2, ..., -1."""
    N = _check_grid(N)
    return np.fft.fftfreq(N, 1.0 / N).round().astype(int)


@dataclass(frozen=True)
class Signal:
    """Samples f(x_i), x_i = i * period / N, with values in ``space``."""

    samples: np.ndarray
    space: SpaceDescriptor
    period: float = 1.0

    def __post_init__(self):
        v = np.asarray(self.samples, dtype=complex)
        if v.ndim == 1 and self.space.dimension == 1:
            v = v[:, None]
        self.space.check(v)
        _check_grid(len(v))
        v.setflags(write=False)
        object.__setattr__(self, "samples", v)

    @property
    def N(self) -> int:
        return len(self.samples)

    @property
    def spacing(self) -> float:
        return self.period / self.N

    @property
    def grid(self) -> np.ndarray:
        return np.arange(self.N) * self.spacing

    def spectrum(self) -> np.ndarray:
        return np.fft.fft(self.samples, axis=0)

    @classmethod
    def from_spectrum(cls, spec, space, period: float = 1.0) -> "Signal":
        return cls(np.fft.ifft(np.asarray(spec), axis=0), space, period)

    @classmethod
    def mode(cls, N: int, k: int, x0, space, period: float = 1.0) -> "Signal":
        """x0 * exp(2 pi i k x / period)."""
        x0 = space.element(x0)
        phase = np.exp(2j * np.pi * k * np.arange(N) / N)
        return cls(phase[:, None] * x0[None, :], space, period)

    @classmethod
    def gaussian(cls, N: int, space, rng, period: float = 1.0) -> "Signal":
        d = space.dimension
        return cls(rng.standard_normal((N, d)) + 1j * rng.standard_normal((N, d)), space, period)

    @classmethod
    def trig_polynomial(cls, N: int, degree: int, space, rng, period: float = 1.0) -> "Signal":
        """Random trigonometric polynomial with modes |k| <= degree."""
        if 2 * degree + 1 > N:
            raise ParameterError("degree does not fit the grid", degree=degree, N=N)
        d = space.dimension
        spec = np.zeros((N, d), dtype=complex)
        ks = np.arange(-degree, degree + 1)
        coef = rng.standard_normal((len(ks), d)) + 1j * rng.standard_normal((len(ks), d))
        spec[ks % N] = coef * N
        return cls.from_spectrum(spec, space, period)

    def __add__(self, other: "Signal") -> "Signal":
        return Signal(self.samples + other.samples, self.space, self.period)

    def __sub__(self, other: "Signal") -> "Signal":
        return Signal(self.samples - other.samples, self.space, self.period)

    def scaled(self, c) -> "Signal":
        return Signal(self.samples * c, self.space, self.period)

    def pointwise_norms(self) -> np.ndarray:
        return self.space.norms(self.samples)


@dataclass(frozen=True)
class FrequencyInterval:
    """Half-open integer band [lo, hi)."""

    lo: int
    hi: int

    def __post_init__(self):
        if int(self.lo) != self.lo or int(self.hi) != self.hi:
            raise ParameterError("frequency bounds must be integers", lo=self.lo, hi=self.hi)
        if not self.lo < self.hi:
            raise ParameterError("need lo < hi", lo=self.lo, hi=self.hi)
        object.__setattr__(self, "lo", int(self.lo))
        object.__setattr__(self, "hi", int(self.hi))

    def mask(self, N: int) -> np.ndarray:
        k = frequencies(N)
        return (k >= self.lo) & (k < self.hi)

    def members(self, N: int) -> np.ndarray:
        lo, hi = max(self.lo, -N // 2), min(self.hi, N // 2)
        return np.arange(lo, hi) if lo < hi else np.arange(0)

    def overlaps(self, other: "FrequencyInterval") -> bool:
        return self.lo < other.hi and other.lo < self.hi

    def __contains__(self, k) -> bool:
        return self.lo <= k < self.hi


@dataclass(frozen=True)
class Symbol:
    """Operator m(k) in L(domain, codomain) for every grid frequency (DFT order).

    ``scale`` maps grid frequency k to the symbol variable xi = k * scale; it is
    metadata for plotting and for variation profiles.
    """

    entries: np.ndarray
    domain: SpaceDescriptor
    codomain: SpaceDescriptor
    scale: float = 1.0
    _diag: dict = field(default_factory=dict, compare=False, repr=False)

    def __post_init__(self):
        e = np.asarray(self.entries, dtype=complex)
        shape = (self.codomain.dimension, self.domain.dimension)
        if e.ndim != 3 or e.shape[1:] != shape:
            raise SpaceMismatchError("symbol entries must be (N, dim Y, dim X)",
                                     shape=e.shape, expected=shape)
        _check_grid(e.shape[0])
        e.setflags(write=False)
        object.__setattr__(self, "entries", e)

    @property
    def N(self) -> int:
        return self.entries.shape[0]

    @property
    def is_diagonal(self) -> bool:
        if "value" not in self._diag:
            e = self.entries
            ok = e.shape[1] == e.shape[2]
            if ok:
                d = np.diagonal(e, axis1=1, axis2=2)
                ok = not np.any(e - d[:, :, None] * np.eye(e.shape[1]))
            self._diag["value"] = ok
        return self._diag["value"]

    @classmethod
    def from_function(cls, fn, N: int, domain, codomain=None, scale: float = 1.0) -> "Symbol":
        """Evaluate ``fn(xi)`` at xi = k * scale; scalar results become multiples of I."""
        codomain = domain if codomain is None else codomain
        k = frequencies(N)
        vals = [np.asarray(fn(kk * scale), dtype=complex) for kk in k]
        return cls(np.stack([_promote(v, domain, codomain) for v in vals]), domain, codomain, scale)

    @classmethod
    def scalar(cls, values, space, scale: float = 1.0) -> "Symbol":
        """Scalar symbol (values in DFT order) promoted to values * identity."""
        values = np.asarray(values, dtype=complex)
        eye = np.eye(space.dimension)
        return cls(values[:, None, None] * eye, space, space, scale)

    @classmethod
    def diagonal(cls, diags, space, scale: float = 1.0) -> "Symbol":
        """Diagonal symbol from an (N, dim) array in DFT order."""
        diags = np.asarray(diags, dtype=complex)
        return cls(diags[:, :, None] * np.eye(space.dimension), space, space, scale)

    @classmethod
    def indicator(cls, interval: FrequencyInterval, N: int, space) -> "Symbol":
        return cls.scalar(interval.mask(N).astype(float), space)

    def at(self, k: int) -> OperatorValue:
        return OperatorValue(self.entries[int(k) % self.N], self.domain, self.codomain)

    def adjoint(self) -> "Symbol":
        return Symbol(np.conj(np.swapaxes(self.entries, 1, 2)), self.codomain.dual(),
                      self.domain.dual(), self.scale)

    def scaled(self, c) -> "Symbol":
        return Symbol(self.entries * c, self.domain, self.codomain, self.scale)

    def __matmul__(self, other: "Symbol") -> "Symbol":
        if other.codomain != self.domain or other.N != self.N:
            raise SpaceMismatchError("symbols do not compose")
        return Symbol(self.entries @ other.entries, other.domain, self.codomain, self.scale)

    def sorted_entries(self):
        """(frequencies ascending, entries in that order)."""
        k = frequencies(self.N)
        order = np.argsort(k, kind="stable")
        return k[order], self.entries[order]


def _promote(v, domain, codomain):
    shape = (codomain.dimension, domain.dimension)
    if v.ndim == 0:
        if shape[0] != shape[1]:
            raise SpaceMismatchError("scalar symbol needs equal dimensions")
        return v * np.eye(shape[0])
    if v.shape == shape:
        return v
    if v.ndim == 1 and shape[0] == shape[1] == len(v):
        return np.diag(v)
    raise SpaceMismatchError("symbol value has wrong shape", shape=v.shape, expected=shape)


def _apply_spectrum(m: Symbol, F: np.ndarray) -> np.ndarray:
    if m.is_diagonal:
        return np.diagonal(m.entries, axis1=1, axis2=2) * F
    return np.einsum("kij,kj->ki", m.entries, F)


def apply_multiplier(m: Symbol, f: Signal) -> Signal:
    """T_m f = F^{-1}(m * F f) on the periodic grid."""
    if f.space != m.domain:
        raise SpaceMismatchError("signal space differs from symbol domain",
                                 signal=str(f.space), domain=str(m.domain))
    if f.N != m.N:
        raise SpaceMismatchError("signal and symbol grids differ", signal=f.N, symbol=m.N)
    G = _apply_spectrum(m, np.fft.fft(f.samples, axis=0))
    return Signal(np.fft.ifft(G, axis=0), m.codomain, f.period)


def frequency_projection(interval: FrequencyInterval, f: Signal) -> Signal:
    """S_I f: the multiplier with symbol the indicator of I."""
    F = np.fft.fft(f.samples, axis=0)
    F[~interval.mask(f.N)] = 0
    return Signal(np.fft.ifft(F, axis=0), f.space, f.period)


def dyadic_partition(N: int) -> list[FrequencyInterval]:
    """Zero cell plus dyadic blocks covering every grid frequency once, sorted by lo."""
    N = _check_grid(N)
    half = N // 2
    blocks = [FrequencyInterval(0, 1)]
    j = 0
    while 2**j < half:
        blocks.append(FrequencyInterval(2**j, min(2 ** (j + 1), half)))
        j += 1
    neg = []
    j = 0
    while 2**j <= half:
        lo = max(-(2 ** (j + 1)) + 1, -half)
        hi = -(2**j) + 1
        if lo < hi:
            neg.append(FrequencyInterval(lo, hi))
        j += 1
    # Nyquist -N/2: its own dyadic block would be a singleton; merge it into
    # the block just above it when one exists.
    if len(neg) >= 2 and neg[-1] == FrequencyInterval(-half, -half + 1):
        last = neg.pop()
        top = neg.pop()
        neg.append(FrequencyInterval(last.lo, top.hi))
    blocks.extend(neg)
    return sorted(blocks, key=lambda b: b.lo)


def block_path(m: Symbol, interval: FrequencyInterval, closed: bool = False,
               budget: int = 32, seed: int = 0) -> SampledPath | None:
    """Operator-valued path k -> m(k) over the grid frequencies of ``interval``.

    With ``closed`` the endpoint of the block farther from zero is appended
    (hi for positive blocks, lo - 1 for negative ones) when it lies in the
    band; this recovers the variation over the closed block for symbols that
    are continuous there.
    """
    N = m.N
    ks = list(interval.members(N))
    if closed:
        if interval.lo > 0 and interval.hi < N // 2:
            ks.append(interval.hi)
        elif interval.hi <= 0 and interval.lo - 1 >= -N // 2:
            ks.insert(0, interval.lo - 1)
    ks = np.array(ks, dtype=int)
    if len(ks) == 0:
        return None
    space = OperatorSpace(m.domain, m.codomain, budget, seed)
    vals = m.entries[ks % N].reshape(len(ks), -1)
    return SampledPath(ks * m.scale, vals, space)


def symbol_variation_profile(m: Symbol, partition, s, closed: bool = False,
                             budget: int = 32, seed: int = 0) -> np.ndarray:
    """Per-interval V^s seminorm of k -> m(k) under the operator norm.

    Exact for scalar, diagonal and Hilbert-to-Hilbert symbols; otherwise the
    operator norms are lower-bound estimates.
    """
    out = []
    for interval in partition:
        path = block_path(m, interval, closed, budget, seed)
        out.append(0.0 if path is None else vs_seminorm(path, s))
    return np.array(out)


def resolvent_entries(n_dims: int, xi, two_pi: bool = False) -> np.ndarray:
    """Diagonal of A(i xi + A)^{-1} with A = diag(2^1, ..., 2^n_dims).

    Shape ``xi.shape + (n_dims,)``. With ``two_pi`` the variable is 2 pi xi.
    """
    if n_dims < 1:
        raise ParameterError("n_dims must be >= 1", n_dims=n_dims)
    xi = np.asarray(xi, dtype=float)
    if two_pi:
        xi = 2 * np.pi * xi
    a = 2.0 ** np.arange(1, n_dims + 1)
    return a / (1j * xi[..., None] + a)


def resolvent_symbol(n_dims: int, N: int, p=2.0, scale: float = 1.0,
                     two_pi: bool = False) -> Symbol:
    """A(i xi + A)^{-1} on truncated l^p, sampled at xi = k * scale."""
    space = SequenceP(p, n_dims)
    xi = frequencies(N) * scale
    return Symbol.diagonal(resolvent_entries(n_dims, xi, two_pi), space, scale)


def resolvent_jump(n: int, n_dims: int, two_pi: bool = False):
    """|m(2^(n+1)) - m(2^n)| in L(l^p) and the entry on basis vector e_n.

    Diagonal operator, so the norm is the largest entry modulus for every p.
    """
    if not 1 <= n <= n_dims:
        raise ParameterError("need 1 <= n <= n_dims", n=n, n_dims=n_dims)
    e = resolvent_entries(n_dims, np.array([2.0**n, 2.0 ** (n + 1)]), two_pi)
    diff = np.abs(e[1] - e[0])
    return float(diff.max()), float(diff[n - 1])


@dataclass(frozen=True)
class BochnerSpace:
    """L^p(mu; X) on the grid, flattened to (N * dim X,) vectors."""

    space: SpaceDescriptor
    p: object
    mu: np.ndarray

    @property
    def dimension(self) -> int:
        return len(self.mu) * self.space.dimension

    def _split(self, arr):
        arr = np.asarray(arr)
        return arr.reshape(arr.shape[:-1] + (len(self.mu), self.space.dimension))

    def norms(self, arr) -> np.ndarray:
        pt = self.space.norms(self._split(arr))
        if self.p is INF:
            return pt.max(axis=-1)
        top = pt.max(axis=-1, keepdims=True)
        safe = np.where(top > 0, top, 1.0)
        return top[..., 0] * np.sum((pt / safe) ** self.p * self.mu, axis=-1) ** (1 / self.p)

    def dual(self) -> "BochnerSpace":
        pd = dual_exponent(self.p)
        return BochnerSpace(self.space.dual(), pd, self.mu ** (1 - pd))

    def norming(self, arr) -> np.ndarray:
        g = self._split(np.asarray(arr, dtype=complex))
        pt = self.space.norms(g)
        total = self.norms(np.asarray(arr))
        safe = np.where(total > 0, total, 1.0)[..., None]
        u = pt / safe
        out = self.mu * u ** (self.p - 1)
        out = out[..., None] * self.space.norming(g)
        return out.reshape(np.asarray(arr).shape)


@dataclass(frozen=True)
class MultiplierEstimate:
    ratio: float
    best_probe: Signal
    probe_kind: str
    certified: bool = False


def _mode_witnesses(m: Symbol, budget: int, seed: int):
    """Per-frequency (|m(k)| lower bound, unit witness vector)."""
    X, Y = m.domain, m.codomain
    e = m.entries
    if X.is_hilbert and Y.is_hilbert:
        _, S, Vh = np.linalg.svd(e)
        return S[:, 0], np.conj(Vh[:, 0, :])
    if m.is_diagonal and X == Y and X.kind in {"sequence", "scalar"}:
        d = np.abs(np.diagonal(e, axis1=1, axis2=2))
        idx = np.argmax(d, axis=1)
        w = np.zeros((m.N, X.dimension), dtype=complex)
        w[np.arange(m.N), idx] = 1.0
        return d[np.arange(m.N), idx], w
    vals = np.empty(m.N)
    wits = np.empty((m.N, X.dimension), dtype=complex)
    for k in range(m.N):
        vals[k], wits[k] = operator_norm_witness(OperatorValue(e[k], X, Y), budget, seed)
    return vals, wits


def estimate_multiplier_norm(m: Symbol, p, w: WeightGrid | None = None, probes: int = 8,
                             seed: int = 0, period: float = 1.0, ascent_iterations: int = 30,
                             ascent_starts: int = 3, mode_budget: int = 8) -> MultiplierEstimate:
    """Lower bound for |T_m| on L^p(w; X) -> L^p(w; Y) with its witnessing probe.

    Probe schedule (fixed for a given seed): the single mode of largest
    |m(k)|, every dyadic block applied to a Gaussian signal, ``probes``
    Gaussian signals, then power ascent in the Bochner spaces from the best
    ``ascent_starts`` probes. Zero-norm probes are skipped.
    """
    p = as_exponent(p, "p")
    if probes < 1:
        raise ParameterError("need at least one probe", probes=probes)
    N = m.N
    X, Y = m.domain, m.codomain
    rng = np.random.default_rng(seed)
    weights = np.ones(N) if w is None else w.samples
    if w is not None and len(w) != N:
        raise SpaceMismatchError("weight grid does not match symbol grid", weight=len(w), N=N)
    spacing = period / N

    def ratio(f: Signal) -> float:
        den = weighted_lp_norm(f, w, p)
        if den == 0:
            return -1.0
        return weighted_lp_norm(apply_multiplier(m, f), w, p) / den

    candidates: list[tuple[float, Signal, str]] = []
    vals, wits = _mode_witnesses(m, mode_budget, seed)
    kbest = int(np.argmax(vals))
    mode = Signal.mode(N, int(frequencies(N)[kbest]), wits[kbest], X, period)
    candidates.append((ratio(mode), mode, "single_mode"))
    for block in dyadic_partition(N):
        f = frequency_projection(block, Signal.gaussian(N, X, rng, period))
        candidates.append((ratio(f), f, "dyadic_bump"))
    for _ in range(probes):
        f = Signal.gaussian(N, X, rng, period)
        candidates.append((ratio(f), f, "gaussian"))
    candidates = [c for c in candidates if c[0] >= 0]
    candidates.sort(key=lambda c: -c[0])
    best_val, best_f, kind = candidates[0]

    if p is not INF and p > 1 and ascent_iterations > 0:
        mu = weights * spacing
        BX, BY = BochnerSpace(X, p, mu), BochnerSpace(Y, p, mu)
        mh = m.adjoint()
        dX, dY = X.dimension, Y.dimension

        def fwd(v):
            return apply_multiplier(m, Signal(v.reshape(N, dX), X, period)).samples.reshape(-1)

        def adj(v):
            g = Signal(v.reshape(N, dY), mh.domain, period)
            return apply_multiplier(mh, g).samples.reshape(-1)

        for val, f, knd in candidates[:ascent_starts]:
            r, x = power_ascent(fwd, adj, BX, BY, f.samples.reshape(-1), ascent_iterations)
            g = Signal(x.reshape(N, dX), X, period)
            r = ratio(g)
            if r > best_val:
                best_val, best_f, kind = r, g, knd + "+ascent"
    return MultiplierEstimate(float(best_val), best_f, kind)
