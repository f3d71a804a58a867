"""Acceptance checks shared by the test suite and ``varmult-lab selftest``.

Each check returns a :class:`CriterionResult`; none of them raise on failure.
"""

from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np

from .carleson import (brute_force_variational_carleson, enumerate_families, max_ratio_by,
                       rubio_functional, rubio_growth_experiment, variational_carleson)
from .multiplier import (FrequencyInterval, Signal, Symbol, dyadic_partition,
                         estimate_multiplier_norm, frequency_projection, resolvent_jump,
                         resolvent_symbol, symbol_variation_profile)
from .randomized import (random_diagonal_contractions, rademacher_mean, rbound_lower)
from .spaces import INF, OperatorValue, Scalar, SequenceP, lp_aggregate
from .variation import (SampledPath, StepFunction, brute_force_vs, difference_seminorm,
                        rs_atom_upper, vs_seminorm)
from .weights import ap_constant, constant_weight, power_weight, WeightGrid

INV_SQRT10 = 1 / np.sqrt(10)


@dataclass(frozen=True)
class CriterionResult:
    number: int
    name: str
    passed: bool
    detail: str
    seconds: float

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"[{status}] criterion {self.number} {self.name}: {self.detail} ({self.seconds:.2f}s)"


def _timed(number, name, limit=None):
    def wrap(fn):
        def run(**kwargs) -> CriterionResult:
            t0 = time.perf_counter()
            ok, detail = fn(**kwargs)
            dt = time.perf_counter() - t0
            if limit is not None and dt >= limit:
                ok = False
                detail += f"; runtime {dt:.2f}s exceeds {limit}s"
            return CriterionResult(number, name, bool(ok), detail, dt)

        run.number = number
        run.__name__ = fn.__name__
        run.__doc__ = fn.__doc__
        return run

    return wrap


@_timed(1, "resolvent jumps", limit=1.0)
def criterion_resolvent(n_max: int = 20):
    """Jump norms of the diagonal resolvent symbol across each dyadic scale."""
    worst_norm, worst_entry = np.inf, 0.0
    for n in range(1, n_max + 1):
        norm, entry = resolvent_jump(n, n_max)
        worst_norm = min(worst_norm, norm)
        worst_entry = max(worst_entry, abs(entry - INV_SQRT10))
    ok = worst_norm >= INV_SQRT10 - 1e-9 and worst_entry <= 1e-12
    return ok, f"min norm {worst_norm:.15f}, max entry error {worst_entry:.2e}"


def _random_path(rng, N, space):
    d = space.dimension
    vals = rng.standard_normal((N + 1, d))
    if rng.random() < 0.5:
        vals = vals + 1j * rng.standard_normal((N + 1, d))
    times = np.cumsum(rng.uniform(0.1, 1.0, N + 1))
    return SampledPath(times, vals, space)


@_timed(2, "variation DP vs exhaustive", limit=30.0)
def criterion_variation_oracle(paths: int = 1000, seed: int = 2):
    rng = np.random.default_rng(seed)
    spaces = [Scalar(), SequenceP(2, 3)]
    exact = 0
    worst = 0.0
    for i in range(paths):
        N = int(rng.integers(0, 14))
        path = _random_path(rng, N, spaces[i % 2])
        s = (1.0, 1.5, 2.0, 3.0)[(i // 2) % 4]
        a, b = vs_seminorm(path, s), brute_force_vs(path, s)
        exact += a == b
        worst = max(worst, abs(a - b))
    return exact == paths and worst <= 1e-12, f"{exact}/{paths} exact matches, max diff {worst:.1e}"


@_timed(3, "variation closed forms")
def criterion_closed_forms(trials: int = 200, seed: int = 3):
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(trials):
        N = int(rng.integers(1, 40))
        s = float(rng.uniform(1, 4))
        vals = np.cumsum(rng.uniform(0, 1, N + 1))
        path = SampledPath.from_values(vals)
        worst = max(worst, abs(vs_seminorm(path, s) - (vals[-1] - vals[0])))
        jump = SampledPath.from_values([0.0] * 3 + [1.0] * int(rng.integers(1, 5)) + [0.0] * 2)
        worst = max(worst, abs(vs_seminorm(jump, s) - 2 ** (1 / s)))
        const = SampledPath.from_values(np.full(N + 1, rng.standard_normal()))
        worst = max(worst, vs_seminorm(const, s))
    return worst <= 1e-12, f"max closed-form error {worst:.1e}"


def _random_step(rng, space, pieces):
    cuts = np.sort(rng.uniform(0, 10, 2 * pieces))
    intervals = [(cuts[2 * i], cuts[2 * i + 1]) for i in range(pieces)]
    d = space.dimension
    vals = rng.standard_normal((pieces, d)) + 1j * rng.standard_normal((pieces, d))
    return StepFunction.from_intervals(intervals, vals, space)


@_timed(4, "embedding chain", limit=60.0)
def criterion_embeddings(trials: int = 500, seed: int = 4):
    rng = np.random.default_rng(seed)
    spaces = [Scalar(), SequenceP(2, 3), SequenceP(1, 2)]
    worst_atom = worst_step = worst_diff = -np.inf
    for i in range(trials):
        space = spaces[i % 3]
        s = float(rng.uniform(1, 4))
        f = _random_step(rng, space, int(rng.integers(1, 7)))
        atom = f.scaled(1 / rs_atom_upper(f, s))
        worst_atom = max(worst_atom, vs_seminorm(atom.to_path(), s) - 2)
        g = _random_step(rng, space, int(rng.integers(1, 7)))
        worst_step = max(worst_step, vs_seminorm(g.to_path(), s) - 2 * rs_atom_upper(g, s))
        r = float(rng.uniform(1, 4))
        v = vs_seminorm(g.to_path(), r) ** r
        for h in np.geomspace(1e-3, 20, 8):
            worst_diff = max(worst_diff, difference_seminorm(g, r, h) - h * v)
    ok = max(worst_atom, worst_step, worst_diff) <= 1e-10
    return ok, (f"max excess: atom {worst_atom:.2e}, step {worst_step:.2e}, "
                f"difference {worst_diff:.2e}")


@_timed(5, "multiplier algebra")
def criterion_multiplier_algebra(seed: int = 5):
    rng = np.random.default_rng(seed)
    space = SequenceP(2, 2)
    errs = {"roundtrip": 0.0, "littlewood_paley": 0.0, "projection": 0.0, "plancherel": 0.0}
    for N in (64, 1024, 4096):
        f = Signal.gaussian(N, space, rng)
        back = Signal.from_spectrum(f.spectrum(), space)
        errs["roundtrip"] = max(errs["roundtrip"], float(np.abs(back.samples - f.samples).max()))
        total = sum((frequency_projection(b, f).samples for b in dyadic_partition(N)),
                    np.zeros_like(f.samples))
        errs["littlewood_paley"] = max(errs["littlewood_paley"],
                                       float(np.abs(total - f.samples).max()))
        I = FrequencyInterval(-N // 8, N // 8 + 3)
        J = FrequencyInterval(N // 8 + 3, N // 4)
        pf = frequency_projection(I, f)
        e1 = np.abs(frequency_projection(I, pf).samples - pf.samples).max()
        e2 = np.abs(frequency_projection(J, pf).samples).max()
        errs["projection"] = max(errs["projection"], float(e1), float(e2))
    for N in (64, 256):
        X, Y = SequenceP(2, 3), SequenceP(2, 2)
        ent = rng.standard_normal((N, 2, 3)) + 1j * rng.standard_normal((N, 2, 3))
        m = Symbol(ent, X, Y)
        est = estimate_multiplier_norm(m, 2.0, probes=2, seed=seed, ascent_iterations=5)
        top = np.linalg.svd(ent, compute_uv=False)[:, 0].max()
        errs["plancherel"] = max(errs["plancherel"], abs(est.ratio - top) / top)
    ok = (errs["roundtrip"] <= 1e-10 and errs["littlewood_paley"] <= 1e-10
          and errs["projection"] <= 1e-10 and errs["plancherel"] <= 1e-9)
    return ok, ", ".join(f"{k} {v:.1e}" for k, v in errs.items())


@_timed(6, "Carleson family oracle", limit=60.0)
def criterion_carleson_oracle(signals: int = 200, seed: int = 6):
    rng = np.random.default_rng(seed)
    spaces = [Scalar(), SequenceP(2, 2)]
    worst = 0.0
    chain = -np.inf
    count = 0
    for i in range(signals):
        N = (2, 4, 8)[i % 3]
        f = Signal.gaussian(N, spaces[(i // 3) % 2], rng)
        fams = enumerate_families(N)
        picks = rng.choice(len(fams), size=min(20, len(fams)), replace=False)
        for q in (1, 2, 3):
            v = variational_carleson(f, q)
            worst = max(worst, float(np.abs(v - brute_force_variational_carleson(f, q)).max()))
            for j in picks:
                fam = [FrequencyInterval(a, b) for a, b in fams[j]]
                chain = max(chain, float((rubio_functional(f, fam, q) - v).max()))
            count += 1
    ok = worst <= 1e-10 and chain <= 1e-10
    return ok, (f"{count} (signal, q) cases, max DP/enumeration diff {worst:.1e}, "
                f"max rubio - variational {chain:.1e}")


@_timed(7, "weight suite")
def criterion_weights(trials: int = 100, seed: int = 7):
    rng = np.random.default_rng(seed)
    unit = max(abs(ap_constant(constant_weight(64), p) - 1.0) for p in (1.5, 2.0, 3.0, 7.0))
    mono = -np.inf
    ps = np.array([1.2, 1.5, 2.0, 3.0, 5.0])
    for _ in range(trials):
        w = WeightGrid(np.exp(rng.standard_normal(int(rng.integers(2, 64)))))
        vals = [ap_constant(w, p) for p in ps]
        mono = max(mono, float(np.max(np.diff(vals))))
    drift = 0.0
    for a in (-0.5, 0.5, 1.0):
        for p in (2.0, 3.0):
            if not -1 < a < p - 1:
                # outside A_p the discrete constant grows with the grid
                continue
            lo = ap_constant(power_weight(512, a), p)
            hi = ap_constant(power_weight(1024, a), p)
            drift = max(drift, abs(hi / lo - 1))
    ok = unit == 0.0 and mono <= 1e-10 and drift <= 0.02
    return ok, (f"unit weight error {unit:.1e}, max increase in p {mono:.1e}, "
                f"power-weight drift {100 * drift:.2f}%")


@_timed(8, "Rademacher suite")
def criterion_rademacher(trials: int = 500, samples: int = 100_000, seed: int = 8,
                         hull_families: int = 10):
    rng = np.random.default_rng(seed)
    hilbert = 0.0
    for _ in range(50):
        n = int(rng.integers(1, 13))
        V = rng.standard_normal((n, 4)) + 1j * rng.standard_normal((n, 4))
        got = rademacher_mean(V, SequenceP(2, 4), 2).mean
        hilbert = max(hilbert, abs(got - np.sqrt(np.sum(np.abs(V) ** 2))) / got)
    covered = 0
    space = SequenceP(1, 2)
    for i in range(trials):
        n = int(rng.integers(2, 13))
        V = rng.standard_normal((n, 2))
        exact = rademacher_mean(V, space).mean
        mc = rademacher_mean(V, space, budget=samples, seed=seed * 100_003 + i,
                             method="montecarlo")
        covered += abs(mc.mean - exact) <= 3 * mc.stderr
    hull = -np.inf
    X = SequenceP(1.5, 3)
    for j in range(hull_families):
        diags = random_diagonal_contractions(3, 3, np.random.default_rng([seed, j]))
        ops = [OperatorValue.diagonal(d, X) for d in diags]
        avg = OperatorValue.diagonal((diags[0] + diags[1]) / 2, X)
        base = rbound_lower(ops, budget=8, seed=j)
        more = rbound_lower(ops + [avg], budget=8, seed=j)
        hull = max(hull, more / base - 1)
    ok = hilbert <= 1e-12 and covered >= 0.99 * trials and hull <= 0.05
    return ok, (f"Hilbert identity rel error {hilbert:.1e}, MC coverage {covered}/{trials}, "
                f"hull excess {100 * hull:.2f}%")


def _block_step_symbol(N: int, trial: int, seed: int, jumps: int = 3) -> Symbol:
    """Random piecewise constant scalar symbol with a few jumps per dyadic block.

    Block j draws its values from a seed that depends only on (seed, trial,
    j, sign), so grids of different size share their low-frequency blocks.
    """
    k = np.fft.fftfreq(N, 1.0 / N).round()
    vals = np.zeros(N, dtype=complex)
    for b in dyadic_partition(N):
        j = int(np.floor(np.log2(max(abs(b.lo), abs(b.hi - 1), 1))))
        sign = 0 if b.lo == 0 and b.hi == 1 else (1 if b.lo > 0 else 2)
        rng = np.random.default_rng([seed, trial, j, sign])
        cuts = np.sort(rng.uniform(0, 1, jumps))
        levels = rng.uniform(0, 1, jumps + 1) * np.exp(2j * np.pi * rng.uniform(0, 1, jumps + 1))
        mask = b.mask(N)
        rel = (np.abs(k[mask]) - 2.0**j) / 2.0**j
        vals[mask] = levels[np.searchsorted(cuts, rel)]
    return Symbol.scalar(vals, Scalar())


def symbol_vs_norm(m: Symbol, s) -> float:
    """sup |m| + sup over dyadic blocks of [m]_{V^s}."""
    sup = float(np.abs(m.entries).max())
    return sup + float(symbol_variation_profile(m, dyadic_partition(m.N), s).max())


def multiplier_vs_ratios(N: int, p: float, s: float, symbols: int, seed: int) -> np.ndarray:
    out = []
    for trial in range(symbols):
        m = _block_step_symbol(N, trial, seed)
        m = m.scaled(1 / symbol_vs_norm(m, s))
        est = estimate_multiplier_norm(m, p, probes=4, seed=seed + trial, ascent_iterations=10,
                                       ascent_starts=2)
        out.append(est.ratio)
    return np.array(out)


def decay_profile(block_counts, p: float, r: float, s: float, seed: int) -> list[dict]:
    """l^r(V^s) profile of the resolvent symbol against its measured multiplier ratio.

    Uses the first B positive dyadic blocks on the grid N = 2^(B+2), so the
    closed endpoint of every block lies inside the band. The symbol has
    B + 1 diagonal entries, so every block carries a full jump.
    """
    rows = []
    for B in block_counts:
        N = 2 ** (B + 2)
        m = resolvent_symbol(B + 1, N, p=p)
        blocks = [b for b in dyadic_partition(N) if b.lo > 0][:B]
        prof = symbol_variation_profile(m, blocks, s, closed=True)
        est = estimate_multiplier_norm(m, p, probes=4, seed=seed, ascent_iterations=10,
                                       ascent_starts=2)
        powered = float(np.sum(prof**r)) if r is not INF else float(prof.max())
        rows.append({"blocks": B, "N": N, "min_block_seminorm": float(prof.min()),
                     "lr_power_sum": powered,
                     "lr_norm": float(lp_aggregate(prof, r)),
                     "multiplier_ratio": est.ratio})
    return rows


@_timed(9, "boundedness trends")
def criterion_trends(symbols: int = 50, signals: int = 100, seed: int = 9):
    small = multiplier_vs_ratios(256, 4.0, 1.5, symbols, seed).max()
    large = multiplier_vs_ratios(2048, 4.0, 1.5, symbols, seed).max()
    a_ok = large <= 1.25 * small
    weights = {"one": constant_weight, "sqrt_abs": lambda N: power_weight(N, 0.5)}
    rows = rubio_growth_experiment(Scalar(), 4, 4, weights, (256, 1024), signals, seed)
    mx = max_ratio_by(rows, "N", "weight")
    b_change = max(abs(mx[(1024, w)] / mx[(256, w)] - 1) for w in weights)
    b_ok = b_change <= 0.20
    r = 2.0
    prof = decay_profile(range(2, 9), 3.0, r, 1.5, seed)
    per_block = min(row["lr_power_sum"] / row["blocks"] for row in prof)
    ratios = [row["multiplier_ratio"] for row in prof]
    c_ok = per_block >= INV_SQRT10**r - 1e-9 and max(ratios) <= 1.25 * min(ratios)
    detail = (f"(a) max ratio {small:.4f} -> {large:.4f}; (b) max change {100 * b_change:.2f}%; "
              f"(c) l^r power sum per block >= {per_block:.4f}, multiplier ratio "
              f"{min(ratios):.4f}..{max(ratios):.4f}")
    return a_ok and b_ok and c_ok, detail


SELFTEST = (criterion_resolvent, criterion_variation_oracle, criterion_closed_forms,
            criterion_embeddings, criterion_multiplier_algebra, criterion_carleson_oracle,
            criterion_weights, criterion_rademacher)
ALL = SELFTEST + (criterion_trends,)


def run_all(checks=ALL) -> list[CriterionResult]:
    return [check() for check in checks]
