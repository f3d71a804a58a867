"""Rademacher averages, type/cotype constants and R-boundedness lower bounds.

Averages over at most 12 signs are computed by full enumeration; larger
tuples use Monte Carlo in fixed-seed batches with a delta-method standard
error. All constants are finite-family values, never certified suprema.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product

import numpy as np

from .errors import ParameterError, SpaceMismatchError
from .multiplier import FrequencyInterval, Signal, frequency_projection
from .parallel import map_ordered
from .spaces import (INF, OperatorSpace, OperatorValue, as_exponent, lp_aggregate,
                     operator_norm_witness)
from .variation import StepFunction, rs_atom_upper
from .weights import weighted_lp_norm, weighted_lp_of_values

EXACT_MAX = 12
BATCH = 8192
ASCENT_STEPS = (2.0, 0.5, 1.1, 1 / 1.1)
SIGN_KINDS = ("rademacher", "steinhaus8")


@dataclass(frozen=True)
class RademacherEstimate:
    mean: float
    stderr: float
    method: str
    sample_count: int

    def __post_init__(self):
        if self.method not in {"exact", "montecarlo"}:
            raise ParameterError("method must be exact or montecarlo", method=self.method)
        if self.method == "exact" and self.stderr != 0:
            raise ParameterError("exact estimates carry zero stderr", stderr=self.stderr)
        if self.mean < 0 or self.stderr < 0:
            raise ParameterError("mean and stderr must be nonnegative", mean=self.mean,
                                 stderr=self.stderr)


def _as_vectors(vectors, space) -> np.ndarray:
    V = np.asarray(vectors, dtype=complex)
    if V.ndim == 1:
        V = V[:, None] if space.dimension == 1 else V[None, :]
    if V.ndim != 2 or V.shape[0] == 0:
        raise ParameterError("need a nonempty list of vectors", shape=V.shape)
    if V.shape[1] != space.dimension:
        raise SpaceMismatchError("vectors do not match space", space=str(space), shape=V.shape)
    return V


def sign_table(n: int, signs: str = "rademacher") -> np.ndarray:
    """Every sign vector with equal weight, shape (count, n)."""
    if signs == "rademacher":
        alphabet = (1.0, -1.0)
    elif signs == "steinhaus8":
        alphabet = tuple(np.exp(2j * np.pi * np.arange(8) / 8))
    else:
        raise ParameterError("unknown sign kind", signs=signs, allowed=SIGN_KINDS)
    return np.array(list(product(alphabet, repeat=n)), dtype=complex).reshape(-1, n)


def _random_signs(rng, count: int, n: int, signs: str) -> np.ndarray:
    if signs == "rademacher":
        return rng.choice((-1.0, 1.0), size=(count, n)).astype(complex)
    if signs == "steinhaus8":
        return np.exp(2j * np.pi * rng.integers(0, 8, size=(count, n)) / 8)
    raise ParameterError("unknown sign kind", signs=signs, allowed=SIGN_KINDS)


def _exact_count(n: int, signs: str) -> int:
    return 2**n if signs == "rademacher" else 8**n


def rademacher_mean(vectors, space, moment: float = 1.0, budget: int = 100_000,
                    seed: int = 0, signs: str = "rademacher",
                    method: str = "auto") -> RademacherEstimate:
    """(E |sum_n eps_n x_n|^moment)^(1/moment).

    ``method="auto"`` enumerates all sign patterns when there are at most
    2^12 of them and otherwise draws ``budget`` samples in batches seeded by
    ``(seed, batch index)``.
    """
    moment = as_exponent(moment, "moment")
    if moment is INF:
        raise ParameterError("moment must be finite")
    V = _as_vectors(vectors, space)
    n = V.shape[0]
    if method not in {"auto", "exact", "montecarlo"}:
        raise ParameterError("method must be auto, exact or montecarlo", method=method)
    exact = method == "exact" or (method == "auto"
                                  and _exact_count(n, signs) <= _exact_count(EXACT_MAX, "rademacher"))
    if exact:
        S = sign_table(n, signs)
        vals = space.norms(S @ V) ** moment
        return RademacherEstimate(float(np.mean(vals) ** (1 / moment)), 0.0, "exact", len(S))
    if budget < 2:
        raise ParameterError("Monte Carlo needs at least two samples", budget=budget)
    sizes = [min(BATCH, budget - start) for start in range(0, budget, BATCH)]

    def batch(b):
        S = _random_signs(np.random.default_rng([seed, b]), sizes[b], n, signs)
        vals = space.norms(S @ V) ** moment
        return float(vals.sum()), float((vals**2).sum())

    sums = map_ordered(batch, range(len(sizes)))
    done = budget
    total = sum(a for a, _ in sums)
    total_sq = sum(b for _, b in sums)
    m = total / done
    var = max(total_sq / done - m * m, 0.0) * done / (done - 1)
    se_m = np.sqrt(var / done)
    mean = m ** (1 / moment)
    # delta method for m -> m^(1/moment)
    stderr = se_m / (moment * m ** (1 - 1 / moment)) if m > 0 else 0.0
    return RademacherEstimate(float(mean), float(stderr), "montecarlo", done)


def _check_range(name, value, lo, hi):
    value = as_exponent(value, name)
    if value < lo or value > hi:
        raise ParameterError(f"{name} out of range", value=value, allowed=(lo, hi))
    return value


def type_constant(space, family, t, **kwargs) -> float:
    """(E|sum eps_n x_n|^2)^(1/2) / (sum |x_n|^t)^(1/t) for this finite family."""
    t = _check_range("type exponent t", t, 1.0, 2.0)
    V = _as_vectors(family, space)
    denom = float(lp_aggregate(space.norms(V), t))
    if denom == 0:
        return 0.0
    return rademacher_mean(V, space, 2.0, **kwargs).mean / denom


def cotype_constant(space, family, q, **kwargs) -> float:
    """(sum |x_n|^q)^(1/q) / (E|sum eps_n x_n|^2)^(1/2) for this finite family."""
    q = _check_range("cotype exponent q", q, 2.0, INF)
    V = _as_vectors(family, space)
    num = float(lp_aggregate(space.norms(V), q))
    if num == 0:
        return 0.0
    return num / rademacher_mean(V, space, 2.0, **kwargs).mean


def _check_family(operators) -> tuple:
    ops = list(operators)
    if not ops:
        raise ParameterError("operator family must be nonempty")
    X, Y = ops[0].domain, ops[0].codomain
    for T in ops:
        if T.domain != X or T.codomain != Y:
            raise SpaceMismatchError("operators must share domain and codomain",
                                     domain=str(T.domain), codomain=str(T.codomain))
    return ops, X, Y


def tuple_ratio(ops, xs, X, Y, moment: float = 1.0) -> float:
    """E|sum eps_n T_n x_n|_Y / E|sum eps_n x_n|_X by exact enumeration (<= 12 terms)."""
    xs = np.asarray(xs, dtype=complex)
    n = len(ops)
    if n > EXACT_MAX:
        raise ParameterError("tuple too long for exact enumeration", n=n, limit=EXACT_MAX)
    S = sign_table(n)
    TX = np.stack([T(x) for T, x in zip(ops, xs)])
    den = np.mean(X.norms(S @ xs) ** moment) ** (1 / moment)
    if den == 0:
        return 0.0
    return float(np.mean(Y.norms(S @ TX) ** moment) ** (1 / moment) / den)


def _ascend(ops, xs, X, Y, moment, max_rounds: int = 50):
    best = tuple_ratio(ops, xs, X, Y, moment)
    for _ in range(max_rounds):
        improved = False
        for i in range(len(xs)):
            for step in ASCENT_STEPS:
                trial = xs.copy()
                trial[i] = trial[i] * step
                val = tuple_ratio(ops, trial, X, Y, moment)
                if val > best * (1 + 1e-12):
                    best, xs, improved = val, trial, True
        if not improved:
            break
    return best, xs


def rbound_lower(operators, budget: int = 32, seed: int = 0, moment: float = 1.0,
                 max_terms: int = 6) -> float:
    """Lower bound for the R-bound of a finite operator family.

    Starts from the single-operator norms, then runs ``budget`` random
    tuples (operators drawn with replacement, random vectors) each refined by
    coordinate ascent over the scalings in ``ASCENT_STEPS``.
    """
    ops, X, Y = _check_family(operators)
    best = max(operator_norm_witness(T, seed=seed)[0] for T in ops)
    rng = np.random.default_rng(seed)
    d = X.dimension
    max_terms = min(max_terms, EXACT_MAX)
    for _ in range(budget):
        n = int(rng.integers(2, max_terms + 1)) if max_terms >= 2 else 1
        picks = rng.integers(0, len(ops), size=n)
        chosen = [ops[i] for i in picks]
        xs = rng.standard_normal((n, d)) + 1j * rng.standard_normal((n, d))
        val, _ = _ascend(chosen, xs, X, Y, moment)
        best = max(best, val)
    return float(best)


def random_diagonal_contractions(K: int, dim: int, rng) -> np.ndarray:
    """K diagonals with entries uniform in the closed unit disc (modulus <= 1)."""
    r = np.sqrt(rng.uniform(0, 1, size=(K, dim)))
    return r * np.exp(2j * np.pi * rng.uniform(0, 1, size=(K, dim)))


def rr_to_rbound_experiment(domain, codomain, t, q, r, trials: int, seed: int,
                            pieces: int = 4, budget: int = 16) -> list[dict]:
    """Per trial: rbound_lower of the range of a random step symbol and its l^r(R^r) bound.

    The symbol takes diagonal values on consecutive unit intervals. Its range
    is the set of piece values together with 0 (taken outside the support).
    The whole step function is one scaled R^r atom, so
    (sum_I |c_I|^r)^(1/r) bounds the l^r(R^r) norm for any dyadic layout.
    """
    t = _check_range("type exponent t", t, 1.0, 2.0)
    q = _check_range("cotype exponent q", q, 2.0, INF)
    r = as_exponent(r, "r")
    inv = 1 / t - (0.0 if q is INF else 1 / q)
    inv_r = 0.0 if r is INF else 1 / r
    if not np.isclose(inv, inv_r, rtol=0, atol=1e-12):
        raise ParameterError("exponents violate 1/r = 1/t - 1/q", t=t, q=q, r=r)
    if domain.dimension != codomain.dimension:
        raise SpaceMismatchError("diagonal symbols need equal dimensions",
                                 domain=str(domain), codomain=str(codomain))
    opspace = OperatorSpace(domain, codomain)
    rows = []
    for trial in range(trials):
        rng = np.random.default_rng([seed, trial])
        diags = random_diagonal_contractions(pieces, domain.dimension, rng)
        ops = [OperatorValue(np.diag(dg), domain, codomain) for dg in diags]
        step = StepFunction(np.arange(pieces + 1, dtype=float),
                            np.stack([T.matrix.reshape(-1) for T in ops]), opspace)
        upper = rs_atom_upper(step, r)
        zero = OperatorValue(np.zeros_like(ops[0].matrix), domain, codomain)
        lower = rbound_lower(ops + [zero], budget=budget, seed=seed + trial)
        rows.append({"trial": trial, "pieces": pieces, "rbound_lower": lower,
                     "rr_upper": upper, "ratio": lower / upper})
    return rows


def _cotype_bump_signal(N: int, xs, signs, space) -> Signal:
    """phi * sum_n e_{3n} eps_n x_n with phi = 1 + e_1, modes 3n and 3n + 1."""
    spec = np.zeros((N, space.dimension), dtype=complex)
    for n, (x, e) in enumerate(zip(xs, signs), start=1):
        for k in (3 * n, 3 * n + 1):
            spec[k % N] += e * x
    return Signal(np.fft.ifft(spec, axis=0) * N, space)


def cotype_from_rubio_experiment(space, p, q, trials: int, seed: int, n_terms: int = 4,
                                 N: int = 64, signs: str = "rademacher") -> list[dict]:
    """Modulated bump construction behind the cotype implication.

    For each trial draws vectors x_1..x_n, checks that projecting onto
    I_n = [3n-1, 3n+1] recovers phi e_{3n} eps_n x_n, and reports the Rubio
    ratio |(sum |S_I f|^q)^(1/q)|_{L^p} / (E |f|_{L^p}^p)^(1/p) with the
    finite-family cotype constant.
    """
    p = as_exponent(p, "p")
    q = _check_range("cotype exponent q", q, 2.0, INF)
    if 3 * n_terms + 2 > N // 2:
        raise ParameterError("band overflow: need 3n + 1 < N/2", n_terms=n_terms, N=N)
    intervals = [FrequencyInterval(3 * n - 1, 3 * n + 2) for n in range(1, n_terms + 1)]
    grid = np.arange(N) / N
    phi = 1 + np.exp(2j * np.pi * grid)
    phi_norm = weighted_lp_of_values(np.abs(phi), None, p, 1 / N)
    if _exact_count(n_terms, signs) > 2**EXACT_MAX:
        raise ParameterError("too many terms for sign enumeration", n_terms=n_terms)
    table = sign_table(n_terms, signs)
    rows = []
    for trial in range(trials):
        rng = np.random.default_rng([seed, trial])
        d = space.dimension
        xs = rng.standard_normal((n_terms, d)) + 1j * rng.standard_normal((n_terms, d))
        recovery = 0.0
        lp_powers = []
        for eps in table:
            f = _cotype_bump_signal(N, xs, eps, space)
            for n, I in enumerate(intervals, start=1):
                expect = phi[:, None] * np.exp(2j * np.pi * 3 * n * grid)[:, None] * eps[n - 1] * xs[n - 1]
                got = frequency_projection(I, f).samples
                recovery = max(recovery, float(np.abs(got - expect).max()))
            lp_powers.append(weighted_lp_norm(f, None, p) ** (1.0 if p is INF else p))
        lhs = phi_norm * float(lp_aggregate(space.norms(xs), q))
        rhs = float(np.mean(lp_powers) ** (1.0 if p is INF else 1 / p))
        rows.append({"trial": trial, "n_terms": n_terms, "N": N, "signs": signs,
                     "recovery_error": recovery, "rubio_ratio": lhs / rhs,
                     "cotype_ratio": cotype_constant(space, xs, q, signs=signs)})
    return rows


__all__ = [
    "RademacherEstimate", "cotype_constant", "cotype_from_rubio_experiment",
    "rademacher_mean", "random_diagonal_contractions", "rbound_lower",
    "rr_to_rbound_experiment", "sign_table", "tuple_ratio", "type_constant",
]
