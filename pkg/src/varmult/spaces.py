"""Finite-dimensional Banach spaces: sequence spaces, Schatten classes, scalars.

Elements are plain complex numpy arrays whose last axis has length
``space.dimension`` (Schatten matrices are flattened row-major).  All norm
routines accept arbitrary leading batch axes.

The duality pairing used throughout is ``<a, b> = Re sum(a * conj(b))``; for
flattened matrices this is ``Re tr(A B^H)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from numbers import Real

import numpy as np

from .errors import NoClosedFormError, ParameterError, SpaceMismatchError

MAX_MATRIX_SIDE = 256
SVD_TOL = 1e-12


class _Infinity:
    """Symbolic exponent infinity. Compares above every real; no arithmetic."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "inf"

    __str__ = __repr__

    def __float__(self) -> float:
        return math.inf

    def __eq__(self, other) -> bool:
        return other is self or (isinstance(other, float) and other == math.inf)

    def __hash__(self) -> int:
        return hash(math.inf)

    def __lt__(self, other) -> bool:
        return False

    def __le__(self, other) -> bool:
        return self == other

    def __gt__(self, other) -> bool:
        return not self == other

    def __ge__(self, other) -> bool:
        return True

    def __reduce__(self):
        return (_Infinity, ())


INF = _Infinity()


def is_inf(p) -> bool:
    return p is INF


def as_exponent(p, name: str = "exponent", minimum: float = 1.0):
    """Normalize ``p`` to a float >= minimum or the symbol ``INF``."""
    if p is INF:
        return INF
    if isinstance(p, str):
        text = p.strip().lower()
        if text in {"inf", "infinity", "∞"}:
            return INF
        try:
            p = float(text)
        except ValueError:
            raise ParameterError(f"cannot parse {name}", value=p) from None
    if not isinstance(p, Real):
        raise ParameterError(f"{name} must be real or inf", value=p)
    p = float(p)
    if math.isnan(p):
        raise ParameterError(f"{name} is NaN")
    if math.isinf(p):
        if p > 0:
            return INF
        raise ParameterError(f"{name} must be >= {minimum}", value=p)
    if p < minimum:
        raise ParameterError(f"{name} must be >= {minimum}", value=p)
    return p


def dual_exponent(p):
    """Hölder conjugate: 1/p + 1/p' = 1, with 1 <-> inf."""
    p = as_exponent(p)
    if p is INF:
        return 1.0
    if p == 1.0:
        return INF
    return 1.0 / (1.0 - 1.0 / p)


def lp_aggregate(values, r, axis=-1):
    """(sum |v|^r)^(1/r) along ``axis``; the max for r = inf."""
    r = as_exponent(r, "aggregation exponent")
    values = np.abs(np.asarray(values, dtype=float))
    if values.shape[axis] == 0:
        return np.zeros(np.delete(values.shape, axis)) if values.ndim > 1 else 0.0
    if r is INF:
        return values.max(axis=axis)
    return np.sum(values**r, axis=axis) ** (1.0 / r)


def _phase(z):
    mag = np.abs(z)
    return np.where(mag > 0, z / np.where(mag > 0, mag, 1.0), 0.0)


@dataclass(frozen=True)
class SpaceDescriptor:
    """A finite-dimensional normed space.

    kind is ``"sequence"`` (l^p_n), ``"schatten"`` (S^t on n x n matrices) or
    ``"scalar"`` (the complex field).
    """

    kind: str
    exponent: object = 2.0
    n: int = 1

    def __post_init__(self):
        if self.kind not in {"sequence", "schatten", "scalar"}:
            raise ParameterError("unknown space kind", kind=self.kind)
        object.__setattr__(self, "exponent", as_exponent(self.exponent))
        if int(self.n) != self.n or self.n < 1:
            raise ParameterError("space size must be a positive integer", n=self.n)
        object.__setattr__(self, "n", int(self.n))
        if self.kind == "schatten" and self.n > MAX_MATRIX_SIDE:
            raise ParameterError("matrix side exceeds desk-scale cap", n=self.n,
                                 cap=MAX_MATRIX_SIDE)
        if self.kind == "scalar" and (self.n != 1 or self.exponent != 2.0):
            object.__setattr__(self, "n", 1)
            object.__setattr__(self, "exponent", 2.0)

    @property
    def dimension(self) -> int:
        return self.n * self.n if self.kind == "schatten" else self.n

    @property
    def is_hilbert(self) -> bool:
        return self.kind == "scalar" or self.exponent == 2.0

    def __str__(self) -> str:
        if self.kind == "scalar":
            return "scalar"
        return f"{self.kind}:{self.exponent}:{self.n}"

    def dual(self) -> "SpaceDescriptor":
        if self.kind == "scalar":
            return self
        return SpaceDescriptor(self.kind, dual_exponent(self.exponent), self.n)

    def element(self, x) -> np.ndarray:
        """Validate and flatten a single element."""
        arr = np.asarray(x, dtype=complex)
        if self.kind == "schatten" and arr.shape == (self.n, self.n):
            arr = arr.reshape(-1)
        arr = np.atleast_1d(arr)
        if arr.shape != (self.dimension,):
            raise SpaceMismatchError("element does not match space", space=str(self),
                                     shape=arr.shape)
        return arr

    def check(self, arr) -> np.ndarray:
        arr = np.asarray(arr)
        if arr.ndim == 0 or arr.shape[-1] != self.dimension:
            raise SpaceMismatchError("last axis does not match space dimension",
                                     space=str(self), shape=arr.shape)
        return arr

    def norms(self, arr) -> np.ndarray:
        """Norms of a batch of elements (last axis = coordinates)."""
        arr = self.check(arr)
        if self.kind == "scalar":
            return np.abs(arr[..., 0])
        if self.kind == "sequence":
            ordv = math.inf if self.exponent is INF else self.exponent
            if arr.shape[-1] == 0:
                return np.zeros(arr.shape[:-1])
            return np.linalg.norm(arr, ord=ordv, axis=-1)
        sv = self.singular_values(arr)
        return lp_aggregate(sv, self.exponent, axis=-1)

    def norm(self, v) -> float:
        return float(self.norms(self.element(v)))

    def singular_values(self, arr) -> np.ndarray:
        mats = np.asarray(arr).reshape(arr.shape[:-1] + (self.n, self.n))
        sv = np.linalg.svd(mats, compute_uv=False)
        return np.where(sv > SVD_TOL * np.maximum(sv[..., :1], 1.0), sv, 0.0)

    def norming(self, arr) -> np.ndarray:
        """Norming functionals: <v, v*> = |v| and |v*|_dual = 1 (0 maps to 0)."""
        arr = self.check(np.asarray(arr, dtype=complex))
        nrm = self.norms(arr)
        safe = np.where(nrm > 0, nrm, 1.0)[..., None]
        u = arr / safe
        p = self.exponent
        if self.kind == "scalar":
            out = _phase(u)
        elif self.kind == "sequence":
            if p is INF:
                idx = np.argmax(np.abs(u), axis=-1)
                out = np.zeros_like(u)
                np.put_along_axis(out, idx[..., None],
                                  np.take_along_axis(_phase(u), idx[..., None], -1), -1)
            elif p == 1.0:
                out = _phase(u)
            else:
                out = np.abs(u) ** (p - 1) * _phase(u)
        else:
            mats = u.reshape(u.shape[:-1] + (self.n, self.n))
            U, S, Vh = np.linalg.svd(mats)
            if p is INF:
                w = np.zeros_like(S)
                w[..., 0] = 1.0
            elif p == 1.0:
                w = (S > SVD_TOL * np.maximum(S[..., :1], 1.0)).astype(float)
            else:
                w = S ** (p - 1)
            out = (U * w[..., None, :]) @ Vh
            out = out.reshape(u.shape)
        return np.where((nrm > 0)[..., None], out, 0.0)


def SequenceP(p, n: int) -> SpaceDescriptor:
    return SpaceDescriptor("sequence", p, n)


def Schatten(t, n: int) -> SpaceDescriptor:
    return SpaceDescriptor("schatten", t, n)


def Scalar() -> SpaceDescriptor:
    return SpaceDescriptor("scalar", 2.0, 1)


def parse_space(text: str) -> SpaceDescriptor:
    """Parse ``scalar``, ``sequence:<p>:<n>`` or ``schatten:<t>:<n>``."""
    parts = [s.strip() for s in str(text).split(":")]
    if parts[0] == "scalar" and len(parts) == 1:
        return Scalar()
    if parts[0] in {"sequence", "schatten"} and len(parts) == 3:
        try:
            n = int(parts[2])
        except ValueError:
            raise ParameterError("space size must be an integer", value=text) from None
        return SpaceDescriptor(parts[0], as_exponent(parts[1]), n)
    raise ParameterError("space must be scalar, sequence:<p>:<n> or schatten:<t>:<n>",
                         value=text)


def pairing(a, b) -> np.ndarray:
    return np.real(np.sum(np.asarray(a) * np.conj(b), axis=-1))


@dataclass(frozen=True)
class OperatorValue:
    """A linear map between two descriptors, stored as a codomain x domain matrix."""

    matrix: np.ndarray
    domain: SpaceDescriptor
    codomain: SpaceDescriptor

    def __post_init__(self):
        mat = np.array(self.matrix, dtype=complex)
        shape = (self.codomain.dimension, self.domain.dimension)
        if mat.shape != shape:
            raise SpaceMismatchError("operator shape does not match spaces",
                                     shape=mat.shape, expected=shape)
        mat.setflags(write=False)
        object.__setattr__(self, "matrix", mat)

    @classmethod
    def identity(cls, space: SpaceDescriptor) -> "OperatorValue":
        return cls(np.eye(space.dimension), space, space)

    @classmethod
    def diagonal(cls, diag, space: SpaceDescriptor) -> "OperatorValue":
        return cls(np.diag(np.asarray(diag, dtype=complex)), space, space)

    def __call__(self, x) -> np.ndarray:
        return np.asarray(x) @ self.matrix.T

    def adjoint(self) -> "OperatorValue":
        return OperatorValue(self.matrix.conj().T, self.codomain.dual(), self.domain.dual())

    def is_diagonal(self) -> bool:
        m = self.matrix
        return m.shape[0] == m.shape[1] and not np.any(m - np.diag(np.diag(m)))


def _closed_form(T: OperatorValue):
    m = T.matrix
    X, Y = T.domain, T.codomain
    if X.is_hilbert and Y.is_hilbert:
        if m.size == 0:
            return 0.0
        return float(np.linalg.svd(m, compute_uv=False)[0])
    if X == Y and m.shape[0] == m.shape[1]:
        d = np.diag(m)
        if np.all(m == np.diag(np.full_like(d, d[0]))):
            return float(abs(d[0]))
    if (X.kind in {"sequence", "scalar"} and Y.kind in {"sequence", "scalar"}
            and X.exponent == Y.exponent and X.n == Y.n and T.is_diagonal()):
        return float(np.max(np.abs(np.diag(m)))) if m.size else 0.0
    return None


def power_ascent(apply, apply_adjoint, X: SpaceDescriptor, Y: SpaceDescriptor, x,
                 iterations: int = 50, rtol: float = 1e-13):
    """Nonlinear power iteration for max |Tx|_Y / |x|_X.

    Each step maps x -> norming(T^H norming(Tx)); the ratio never decreases.
    Returns (ratio, x) with |x|_X = 1.
    """
    Xd = X.dual()
    x = np.asarray(x, dtype=complex)
    nx = float(X.norms(x))
    if nx == 0:
        return 0.0, x
    x = x / nx
    best = float(Y.norms(apply(x)))
    best_x = x
    for _ in range(iterations):
        y = apply(best_x)
        z = apply_adjoint(Y.norming(y))
        if not np.any(z):
            break
        cand = Xd.norming(z)
        nc = float(X.norms(cand))
        if nc == 0:
            break
        cand = cand / nc
        val = float(Y.norms(apply(cand)))
        if val <= best * (1 + rtol):
            if val > best:
                best, best_x = val, cand
            break
        best, best_x = val, cand
    return best, best_x


def operator_norm_witness(T: OperatorValue, budget: int = 64, seed: int = 0):
    """Lower-bound estimate of |T| with the maximizing unit vector."""
    X, Y = T.domain, T.codomain
    n = X.dimension
    if T.matrix.size == 0:
        return 0.0, np.zeros(n, dtype=complex)
    rng = np.random.default_rng(seed)
    probes = [np.eye(n, dtype=complex)]
    if budget > 0:
        probes.append(rng.standard_normal((budget, n)) + 1j * rng.standard_normal((budget, n)))
    P = np.concatenate(probes)
    ratios = Y.norms(T(P)) / X.norms(P)
    order = np.argsort(-ratios, kind="stable")[:4]
    best, best_x = -1.0, None
    for i in order:
        val, x = power_ascent(T, T.adjoint(), X, Y, P[i])
        if val > best:
            best, best_x = val, x
    return best, best_x


def operator_norm(T: OperatorValue, mode: str = "auto", budget: int = 64, seed: int = 0):
    """Operator norm |T|_{L(X,Y)}.

    Parameters
    ----------
    mode : {"exact", "estimate", "auto"}
        ``exact`` requires a closed form (Hilbert-to-Hilbert: top singular
        value; diagonal on l^p_n; multiples of the identity). ``estimate``
        always runs random probes plus power ascent. ``auto`` uses the closed
        form when available.
    budget : int
        Number of random probes in estimate mode.

    Returns
    -------
    (value, certified) : (float, bool)
        ``certified`` is False for estimates, which are lower bounds.
    """
    if mode not in {"exact", "estimate", "auto"}:
        raise ParameterError("mode must be exact, estimate or auto", mode=mode)
    if mode != "estimate":
        exact = _closed_form(T)
        if exact is not None:
            return exact, True
        if mode == "exact":
            raise NoClosedFormError("no closed form for this operator norm",
                                    domain=str(T.domain), codomain=str(T.codomain))
    value, _ = operator_norm_witness(T, budget=budget, seed=seed)
    return value, False


@dataclass(frozen=True)
class OperatorSpace:
    """L(X, Y) viewed as a normed space of flattened matrices.

    Supplies ``norms`` so operator-valued paths and step functions reuse the
    variation machinery. ``certified`` records whether every norm so far was
    exact.
    """

    domain: SpaceDescriptor
    codomain: SpaceDescriptor
    budget: int = 32
    seed: int = 0
    _state: dict = field(default_factory=lambda: {"certified": True}, compare=False,
                         repr=False)

    @property
    def dimension(self) -> int:
        return self.domain.dimension * self.codomain.dimension

    @property
    def certified(self) -> bool:
        return self._state["certified"]

    def __str__(self) -> str:
        return f"L({self.domain},{self.codomain})"

    def check(self, arr) -> np.ndarray:
        arr = np.asarray(arr)
        if arr.ndim == 0 or arr.shape[-1] != self.dimension:
            raise SpaceMismatchError("last axis does not match operator space",
                                     space=str(self), shape=arr.shape)
        return arr

    def element(self, x) -> np.ndarray:
        arr = np.asarray(x, dtype=complex).reshape(-1)
        return self.check(arr)

    def norms(self, arr) -> np.ndarray:
        arr = self.check(np.asarray(arr, dtype=complex))
        nY, nX = self.codomain.dimension, self.domain.dimension
        mats = arr.reshape(arr.shape[:-1] + (nY, nX))
        X, Y = self.domain, self.codomain
        if mats.size == 0:
            return np.zeros(arr.shape[:-1])
        if X.is_hilbert and Y.is_hilbert:
            return np.linalg.svd(mats, compute_uv=False)[..., 0]
        if nX == nY and (X.kind in {"sequence", "scalar"} and Y.kind in {"sequence", "scalar"}
                         and X.exponent == Y.exponent):
            diag = np.diagonal(mats, axis1=-2, axis2=-1)
            off = mats - diag[..., None] * np.eye(nX)
            if not np.any(off):
                return np.abs(diag).max(axis=-1)
        flat = mats.reshape((-1, nY, nX))
        out = np.empty(flat.shape[0])
        for i, m in enumerate(flat):
            val, cert = operator_norm(OperatorValue(m, X, Y), "auto", self.budget, self.seed)
            out[i] = val
            if not cert:
                self._state["certified"] = False
        return out.reshape(arr.shape[:-1])

    def norm(self, v) -> float:
        return float(self.norms(self.element(v)))
