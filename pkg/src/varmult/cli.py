"""Batch experiment runner: ``varmult-lab run <config>``, ``list`` and ``selftest``.

A config is a flat text file with one ``key = value`` per line, ``#``
comments and comma-separated lists::

    experiment = example_1_4
    seed = 7
    output = results
    n_dims = 10

Exit codes: 0 success, 1 a built-in assertion failed, 2 invalid config.
"""

from __future__ import annotations

import argparse
import csv
import datetime as _dt
import io
import math
import os
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .errors import VarmultError
from .spaces import INF, as_exponent, dual_exponent, parse_space

SEED_LIMIT = 2**64


class ConfigError(Exception):
    def __init__(self, field_name: str, message: str):
        super().__init__(f"field '{field_name}': {message}")
        self.field = field_name


@dataclass
class ExperimentConfig:
    """Validated run configuration; ``extras`` holds experiment-specific keys."""

    experiment: str
    seed: int
    output: str = "results"
    space: str = "scalar"
    p: list = field(default_factory=list)
    q: list = field(default_factory=list)
    s: list = field(default_factory=list)
    t: list = field(default_factory=list)
    r: list = field(default_factory=list)
    grid_sizes: list = field(default_factory=list)
    weight: list = field(default_factory=list)
    trials: int = 10
    theta: float | None = None
    extras: dict = field(default_factory=dict)

    def one(self, name: str):
        vals = getattr(self, name)
        if len(vals) != 1:
            raise ConfigError(name, f"expected exactly one value, got {len(vals)}")
        return vals[0]

    def extra(self, name: str, default, kind=float):
        raw = self.extras.get(name)
        if raw is None:
            return default
        try:
            if isinstance(default, list) or kind is list:
                return [float(v) for v in _split(raw)]
            return kind(raw)
        except ValueError:
            raise ConfigError(name, f"cannot parse {raw!r} as {getattr(kind, '__name__', kind)}")


COMMON_KEYS = {"experiment", "seed", "output", "space", "p", "q", "s", "t", "r", "grid_sizes",
               "weight", "trials", "theta"}


def _split(raw: str) -> list[str]:
    return [v.strip() for v in raw.split(",") if v.strip()]


def parse_config_text(text: str) -> dict:
    out = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}", "expected 'key = value'")
        key, value = (part.strip() for part in line.split("=", 1))
        if not key:
            raise ConfigError(f"line {lineno}", "empty key")
        if key in out:
            raise ConfigError(key, "duplicate key")
        out[key] = value
    return out


def _exponent(name: str, raw: str):
    try:
        return as_exponent(float(raw) if raw.lower() not in {"inf", "infinity"} else INF, name)
    except (ValueError, VarmultError) as exc:
        raise ConfigError(name, f"invalid exponent {raw!r}: {exc}")


def build_config(raw: dict, env=None) -> ExperimentConfig:
    env = os.environ if env is None else env
    raw = dict(raw)
    if "experiment" not in raw:
        raise ConfigError("experiment", "missing")
    name = raw["experiment"]
    if name not in REGISTRY:
        raise ConfigError("experiment", f"unknown experiment {name!r}; see 'varmult-lab list'")
    exp = REGISTRY[name]
    if "seed" not in raw:
        raise ConfigError("seed", "missing (a seed is mandatory)")
    seed_text = env.get("VARMULT_SEED") or raw["seed"]
    try:
        seed = int(seed_text)
    except ValueError:
        raise ConfigError("seed", f"not an integer: {seed_text!r}")
    if not 0 <= seed < SEED_LIMIT:
        raise ConfigError("seed", "must be a nonnegative 64-bit integer")
    unknown = set(raw) - COMMON_KEYS - set(exp.extras)
    if unknown:
        raise ConfigError(sorted(unknown)[0], f"not a key of experiment {name!r}")
    cfg = ExperimentConfig(experiment=name, seed=seed)
    cfg.output = raw.get("output", cfg.output)
    for key, value in exp.defaults.items():
        raw.setdefault(key, value)
    cfg.space = raw.get("space", cfg.space)
    try:
        parse_space(cfg.space)
    except VarmultError as exc:
        raise ConfigError("space", str(exc))
    for key in ("p", "q", "s", "t", "r"):
        if key in raw:
            setattr(cfg, key, [_exponent(key, v) for v in _split(raw[key])])
    if "grid_sizes" in raw:
        try:
            cfg.grid_sizes = [int(v) for v in _split(raw["grid_sizes"])]
        except ValueError:
            raise ConfigError("grid_sizes", "must be a list of integers")
        if any(n < 1 for n in cfg.grid_sizes):
            raise ConfigError("grid_sizes", "entries must be positive")
    if "weight" in raw:
        cfg.weight = _split(raw["weight"])
    if "trials" in raw:
        try:
            cfg.trials = int(raw["trials"])
        except ValueError:
            raise ConfigError("trials", "must be an integer")
        if cfg.trials < 1:
            raise ConfigError("trials", "must be >= 1")
    if "theta" in raw:
        try:
            cfg.theta = float(raw["theta"])
        except ValueError:
            raise ConfigError("theta", "must be a real number")
        if not 0 < cfg.theta <= 1:
            raise ConfigError("theta", "must lie in (0, 1]")
    cfg.extras = {k: raw[k] for k in exp.extras if k in raw}
    for key in exp.required:
        if not getattr(cfg, key):
            raise ConfigError(key, f"required by experiment {name!r}")
    exp.validate(cfg)
    return cfg


def load_config(path, env=None) -> ExperimentConfig:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError("path", f"cannot read config: {exc}")
    return build_config(parse_config_text(text), env)


# --- experiment registry -------------------------------------------------------------


@dataclass
class Outcome:
    rows: list
    assertions: list  # (passed, description)
    notes: list = field(default_factory=list)


@dataclass(frozen=True)
class Experiment:
    name: str
    description: str
    run: object
    columns: tuple
    required: tuple = ()
    defaults: dict = field(default_factory=dict)
    extras: tuple = ()
    check: object = None

    def validate(self, cfg: ExperimentConfig):
        if self.check is not None:
            self.check(cfg)


REGISTRY: dict[str, Experiment] = {}


def register(name, description, columns, required=(), defaults=None, extras=(), check=None):
    def wrap(fn):
        REGISTRY[name] = Experiment(name, description, fn, tuple(columns), tuple(required),
                                    dict(defaults or {}), tuple(extras), check)
        return fn

    return wrap


def _power_of_two(cfg, key="grid_sizes", cap=None):
    for n in cfg.grid_sizes:
        if n < 2 or n & (n - 1):
            raise ConfigError(key, f"{n} is not a power of two >= 2")
        if cap is not None and n > cap:
            raise ConfigError(key, f"{n} exceeds the cap {cap}")


@register("example_1_4", "jumps of the diagonal resolvent symbol across dyadic scales",
          ["n", "jump_norm", "entry_n", "target"], defaults={"p": "2"}, extras=("n_dims",))
def _exp_example(cfg: ExperimentConfig) -> Outcome:
    from .multiplier import resolvent_jump

    n_dims = cfg.extra("n_dims", 20, int)
    if n_dims < 1:
        raise ConfigError("n_dims", "must be >= 1")
    target = 1 / math.sqrt(10)
    rows = []
    for n in range(1, n_dims + 1):
        norm, entry = resolvent_jump(n, n_dims)
        rows.append({"n": n, "jump_norm": norm, "entry_n": entry, "target": target})
    low = min(r["jump_norm"] for r in rows)
    err = max(abs(r["entry_n"] - target) for r in rows)
    return Outcome(rows, [
        (low >= target - 1e-9, f"all jump norms >= 1/sqrt(10) - 1e-9 (min {low:.17g})"),
        (err <= 1e-12, f"entry n equals 1/sqrt(10) within 1e-12 (max error {err:.3g})"),
    ])


def _check_vs_oracle(cfg):
    from .variation import BRUTE_FORCE_MAX_N

    if any(n > BRUTE_FORCE_MAX_N for n in cfg.grid_sizes):
        raise ConfigError("grid_sizes", f"exhaustive oracle needs N <= {BRUTE_FORCE_MAX_N}")


@register("vs_oracle", "s-variation DP against exhaustive subsequence enumeration",
          ["trial", "N", "s_value", "dp_value", "brute_value", "exact_match"],
          required=("grid_sizes",), defaults={"s": "1, 1.5, 2, 3", "grid_sizes": "12"},
          check=_check_vs_oracle)
def _exp_vs_oracle(cfg: ExperimentConfig) -> Outcome:
    from .variation import SampledPath, brute_force_vs, vs_seminorm

    space = parse_space(cfg.space)
    rng = np.random.default_rng(cfg.seed)
    rows = []
    for trial in range(cfg.trials):
        N = cfg.grid_sizes[trial % len(cfg.grid_sizes)]
        s = cfg.s[trial % len(cfg.s)]
        d = space.dimension
        vals = rng.standard_normal((N + 1, d)) + 1j * rng.standard_normal((N + 1, d))
        path = SampledPath(np.arange(N + 1, dtype=float), vals, space)
        a, b = vs_seminorm(path, s), brute_force_vs(path, s)
        rows.append({"trial": trial, "N": N, "s_value": s, "dp_value": a, "brute_value": b,
                     "exact_match": int(a == b)})
    hits = sum(r["exact_match"] for r in rows)
    return Outcome(rows, [(hits == len(rows), f"{hits}/{len(rows)} exact matches")])


def _random_step(rng, space, pieces):
    from .variation import StepFunction

    cuts = np.sort(rng.uniform(0, 10, 2 * pieces))
    d = space.dimension
    vals = rng.standard_normal((pieces, d)) + 1j * rng.standard_normal((pieces, d))
    return StepFunction.from_intervals([(cuts[2 * i], cuts[2 * i + 1]) for i in range(pieces)],
                                       vals, space)


@register("embedding_chain", "atoms and step functions against the 2 * R^s bound",
          ["trial", "kind", "s_value", "pieces", "vs_seminorm", "bound", "holds"],
          defaults={"s": "1, 1.5, 2, 3"}, extras=("max_pieces",))
def _exp_embedding(cfg: ExperimentConfig) -> Outcome:
    from .variation import rs_atom_upper, vs_seminorm

    space = parse_space(cfg.space)
    rng = np.random.default_rng(cfg.seed)
    max_pieces = cfg.extra("max_pieces", 6, int)
    rows = []
    for trial in range(cfg.trials):
        s = cfg.s[trial % len(cfg.s)]
        pieces = int(rng.integers(1, max_pieces + 1))
        f = _random_step(rng, space, pieces)
        atom = f.scaled(1 / rs_atom_upper(f, s))
        for kind, g, bound in (("atom", atom, 2.0), ("step", f, 2 * rs_atom_upper(f, s))):
            v = vs_seminorm(g.to_path(), s)
            rows.append({"trial": trial, "kind": kind, "s_value": s, "pieces": pieces,
                         "vs_seminorm": v, "bound": bound, "holds": int(v <= bound + 1e-10)})
    ok = all(r["holds"] for r in rows)
    return Outcome(rows, [(ok, "V^s seminorm <= 2 * atom bound on every sample")])


@register("difference_norm", "integral of |f(x+h)-f(x)|^r against h [f]_{V^r}^r",
          ["trial", "r_value", "h", "difference", "bound", "holds"],
          defaults={"r": "1, 2, 3"}, extras=("h_values",))
def _exp_difference(cfg: ExperimentConfig) -> Outcome:
    from .variation import difference_seminorm, vs_seminorm

    space = parse_space(cfg.space)
    rng = np.random.default_rng(cfg.seed)
    hs = cfg.extra("h_values", [0.001, 0.01, 0.1, 1.0, 10.0], list)
    if any(h <= 0 for h in hs):
        raise ConfigError("h_values", "shifts must be positive")
    if any(r is INF for r in cfg.r):
        raise ConfigError("r", "must be finite")
    rows = []
    for trial in range(cfg.trials):
        r = cfg.r[trial % len(cfg.r)]
        f = _random_step(rng, space, int(rng.integers(1, 7)))
        v = vs_seminorm(f.to_path(), r) ** r
        for h in hs:
            d = difference_seminorm(f, r, h)
            rows.append({"trial": trial, "r_value": r, "h": h, "difference": d, "bound": h * v,
                         "holds": int(d <= h * v + 1e-10)})
    ok = all(r["holds"] for r in rows)
    return Outcome(rows, [(ok, "difference seminorm <= h [f]_{V^r}^r on every sample")])


def _weight_specs(cfg):
    """'power:0.5' -> ('power', 0.5); bare 'one' -> ('one', 1.0)."""
    out = []
    for item in cfg.weight:
        name, _, param = item.partition(":")
        try:
            value = float(param) if param else 1.0
        except ValueError:
            raise ConfigError("weight", f"bad parameter in {item!r}")
        if name not in {"one", "constant", "unweighted", "power", "step"}:
            raise ConfigError("weight", f"unknown family {name!r}")
        out.append((name, value))
    return out


def _check_ap(cfg):
    _weight_specs(cfg)
    for p in cfg.p:
        if p is INF or p <= 1:
            raise ConfigError("p", "A_p needs 1 < p < inf")


@register("ap_table", "A_p constants of weight families with the p - eps sweep",
          ["weight_family", "weight_param", "N", "p_value", "eps", "ap_p", "ap_p_minus_eps",
           "ratio"],
          required=("p", "weight", "grid_sizes"),
          defaults={"p": "2, 3", "weight": "power:-0.5, power:0.5, step:4", "grid_sizes": "256"},
          extras=("eps",), check=_check_ap)
def _exp_ap(cfg: ExperimentConfig) -> Outcome:
    from .weights import self_improvement_table, weight_family

    eps = cfg.extra("eps", [0.0, 0.05, 0.1, 0.2], list)
    rows = []
    for name, param in _weight_specs(cfg):
        for N in cfg.grid_sizes:
            w = weight_family(name, N, param)
            for p in cfg.p:
                for row in self_improvement_table(w, p, [e for e in eps if e < p - 1]):
                    rows.append({"weight_family": name, "weight_param": param, "N": N,
                                 "p_value": p, "eps": row["eps"], "ap_p": row["ap_p"],
                                 "ap_p_minus_eps": row["ap_p_minus_eps"], "ratio": row["ratio"]})
    at_least_one = all(r["ap_p"] >= 1 - 1e-12 for r in rows)
    mono = all(r["ratio"] >= 1 - 1e-10 for r in rows)
    return Outcome(rows, [(at_least_one, "every A_p constant >= 1"),
                              (mono, "A_{p-eps} >= A_p (monotone in p)")])


@register("multiplier_norm_vs_vsnorm",
          "measured multiplier norm of random step symbols over their V^s norm",
          ["N", "trial", "p_value", "s_value", "multiplier_ratio"],
          required=("grid_sizes",),
          defaults={"p": "4", "s": "1.5", "grid_sizes": "256, 2048", "trials": "50"},
          check=lambda cfg: _power_of_two(cfg))
def _exp_mult_vs(cfg: ExperimentConfig) -> Outcome:
    from .acceptance import multiplier_vs_ratios

    p, s = cfg.one("p"), cfg.one("s")
    rows = []
    for N in cfg.grid_sizes:
        for trial, ratio in enumerate(multiplier_vs_ratios(N, p, s, cfg.trials, cfg.seed)):
            rows.append({"N": N, "trial": trial, "p_value": p, "s_value": s,
                         "multiplier_ratio": ratio})
    first = max(r["multiplier_ratio"] for r in rows if r["N"] == cfg.grid_sizes[0])
    last = max(r["multiplier_ratio"] for r in rows if r["N"] == cfg.grid_sizes[-1])
    return Outcome(rows, [(last <= 1.25 * first,
                               f"max ratio grows by <= 25% ({first:.6g} -> {last:.6g})")])


@register("decay_condition",
          "l^r(V^s) block profile of the resolvent symbol against its measured multiplier ratio",
          ["blocks", "N", "min_block_seminorm", "lr_power_sum", "lr_norm", "multiplier_ratio"],
          defaults={"p": "3", "r": "2", "s": "1.5"}, extras=("blocks",))
def _exp_decay(cfg: ExperimentConfig) -> Outcome:
    from .acceptance import decay_profile

    counts = [int(b) for b in cfg.extra("blocks", [2, 3, 4, 5, 6, 7, 8], list)]
    if any(b < 1 or b > 14 for b in counts):
        raise ConfigError("blocks", "block counts must lie in 1..14")
    p, r, s = cfg.one("p"), cfg.one("r"), cfg.one("s")
    if r is INF:
        raise ConfigError("r", "the profile needs finite r")
    rows = decay_profile(counts, p, r, s, cfg.seed)
    floor = (1 / math.sqrt(10)) ** r
    per_block = min(row["lr_power_sum"] / row["blocks"] for row in rows)
    ratios = [row["multiplier_ratio"] for row in rows]
    return Outcome(rows, [
        (per_block >= floor - 1e-9,
         f"l^r power sum grows at least linearly: per-block >= 10^(-r/2) ({per_block:.6g})"),
        (max(ratios) <= 1.25 * min(ratios),
         f"measured multiplier ratio flat within 25% ({min(ratios):.6g}..{max(ratios):.6g})"),
    ])


def _check_rubio(cfg):
    _power_of_two(cfg, cap=4096)
    p, q = cfg.one("p"), cfg.one("q")
    qd = dual_exponent(q)
    if p is INF or not p > qd:
        raise ConfigError("p", f"relation p > q' violated (p = {p}, q' = {qd}); "
                               "the limiting case p = q' is known to be false")
    _weight_specs(cfg)


@register("rubio_growth", "weighted variational Carleson ratios over random trig polynomials",
          ["N", "weight_family", "weight_param", "trial", "ap_constant", "ratio"],
          required=("p", "q", "grid_sizes", "weight"),
          defaults={"p": "4", "q": "4", "grid_sizes": "256, 1024", "weight": "one, power:0.5",
                    "trials": "100"},
          extras=("degree",), check=_check_rubio)
def _exp_rubio(cfg: ExperimentConfig) -> Outcome:
    from .carleson import max_ratio_by, rubio_growth_experiment
    from .weights import weight_family

    specs = _weight_specs(cfg)
    weights = {f"{n}:{v:g}": (lambda N, n=n, v=v: weight_family(n, N, v)) for n, v in specs}
    degree = cfg.extra("degree", 8, int)
    raw = rubio_growth_experiment(parse_space(cfg.space), cfg.one("p"), cfg.one("q"), weights,
                                  cfg.grid_sizes, cfg.trials, cfg.seed, degree)
    rows = []
    for row in raw:
        name, _, param = row["weight"].partition(":")
        rows.append({"N": row["N"], "weight_family": name, "weight_param": float(param),
                     "trial": row["trial"], "ap_constant": row["ap_constant"],
                     "ratio": row["ratio"]})
    mx = max_ratio_by(raw, "N", "weight")
    lo, hi = cfg.grid_sizes[0], cfg.grid_sizes[-1]
    checks = []
    for label in weights:
        change = abs(mx[(hi, label)] / mx[(lo, label)] - 1)
        checks.append((change <= 0.20, f"weight {label}: max ratio changes by "
                                       f"{100 * change:.3g}% from N={lo} to N={hi} (<= 20%)"))
    return Outcome(rows, checks)


def _check_carleson(cfg):
    from .carleson import BRUTE_FORCE_MAX_N

    _power_of_two(cfg, cap=BRUTE_FORCE_MAX_N)


@register("carleson_oracle", "variational Carleson DP against disjoint-family enumeration",
          ["N", "trial", "q_value", "dp_max", "brute_max", "max_abs_diff"],
          required=("q", "grid_sizes"),
          defaults={"q": "1, 2, 3", "grid_sizes": "2, 4, 8", "trials": "20"},
          check=_check_carleson)
def _exp_carleson(cfg: ExperimentConfig) -> Outcome:
    from .carleson import brute_force_variational_carleson, variational_carleson
    from .multiplier import Signal

    space = parse_space(cfg.space)
    rng = np.random.default_rng(cfg.seed)
    rows = []
    for N in cfg.grid_sizes:
        for trial in range(cfg.trials):
            f = Signal.gaussian(N, space, rng)
            for q in cfg.q:
                a = variational_carleson(f, q)
                b = brute_force_variational_carleson(f, q)
                rows.append({"N": N, "trial": trial, "q_value": q, "dp_max": float(a.max()),
                             "brute_max": float(b.max()),
                             "max_abs_diff": float(np.abs(a - b).max())})
    worst = max(r["max_abs_diff"] for r in rows)
    return Outcome(rows, [(worst <= 1e-10, f"DP equals enumeration (max diff {worst:.3g})")])


def _check_rr(cfg):
    t, q, r = cfg.one("t"), cfg.one("q"), cfg.one("r")
    inv = 1 / t - (0.0 if q is INF else 1 / q)
    inv_r = 0.0 if r is INF else 1 / r
    if not math.isclose(inv, inv_r, rel_tol=0, abs_tol=1e-12):
        raise ConfigError("r", f"relation 1/r = 1/t - 1/q violated (1/r = {inv_r:.6g}, "
                               f"1/t - 1/q = {inv:.6g})")
    if not 1 <= t <= 2:
        raise ConfigError("t", "type exponent must lie in [1, 2]")
    if q < 2:
        raise ConfigError("q", "cotype exponent must lie in [2, inf]")
    try:
        parse_space(cfg.extras.get("codomain", cfg.space))
    except VarmultError as exc:
        raise ConfigError("codomain", str(exc))


@register("rbound_vs_rr", "R-bound lower bounds of step-symbol ranges against l^r(R^r) values",
          ["trial", "pieces", "rbound_lower", "rr_upper", "ratio"],
          required=("t", "q", "r"),
          defaults={"space": "sequence:3:3", "codomain": "sequence:1.5:3", "t": "1.5", "q": "3",
                    "r": "3", "trials": "20"},
          extras=("codomain", "pieces", "budget"), check=_check_rr)
def _exp_rr(cfg: ExperimentConfig) -> Outcome:
    from .randomized import rr_to_rbound_experiment

    X = parse_space(cfg.space)
    Y = parse_space(cfg.extras.get("codomain", cfg.space))
    rows = rr_to_rbound_experiment(X, Y, cfg.one("t"), cfg.one("q"), cfg.one("r"), cfg.trials,
                                   cfg.seed, cfg.extra("pieces", 4, int),
                                   cfg.extra("budget", 16, int))
    ratios = [r["ratio"] for r in rows]
    return Outcome(rows, [(all(np.isfinite(ratios)),
                               f"ratios finite; max ratio {max(ratios):.6g} (regression baseline)")])


def _check_cotype(cfg):
    q = cfg.one("q")
    if q < 2:
        raise ConfigError("q", "cotype exponent must lie in [2, inf]")
    n_terms = cfg.extra("n_terms", 4, int)
    N = cfg.grid_sizes[0] if cfg.grid_sizes else 64
    if 3 * n_terms + 2 > N // 2:
        raise ConfigError("grid_sizes", f"band overflow: {n_terms} terms need N > {6 * n_terms + 2}")
    if cfg.extras.get("signs", "rademacher") not in {"rademacher", "steinhaus8"}:
        raise ConfigError("signs", "must be rademacher or steinhaus8")


@register("cotype_from_rubio", "modulated-bump recovery and the implied cotype ratio",
          ["trial", "n_terms", "N", "signs", "recovery_error", "rubio_ratio", "cotype_ratio"],
          required=("p", "q"),
          defaults={"p": "2", "q": "2", "space": "sequence:1:8", "grid_sizes": "64"},
          extras=("n_terms", "signs"), check=_check_cotype)
def _exp_cotype(cfg: ExperimentConfig) -> Outcome:
    from .randomized import cotype_from_rubio_experiment

    _power_of_two(cfg)
    signs = cfg.extras.get("signs", "rademacher")
    rows = cotype_from_rubio_experiment(parse_space(cfg.space), cfg.one("p"), cfg.one("q"),
                                        cfg.trials, cfg.seed, cfg.extra("n_terms", 4, int),
                                        cfg.grid_sizes[0], signs)
    worst = max(r["recovery_error"] for r in rows)
    notes = []
    if signs == "steinhaus8":
        notes.append("complex Steinhaus signs approximated by 8th roots of unity")
    return Outcome(rows, [(worst <= 1e-10, f"projections recover each term (max error "
                                               f"{worst:.3g})")], notes)


@register("littlewood_paley", "reconstruction from the dyadic frequency partition",
          ["N", "trial", "blocks", "reconstruction_error"],
          required=("grid_sizes",), defaults={"grid_sizes": "1024", "trials": "5"},
          check=lambda cfg: _power_of_two(cfg))
def _exp_lp(cfg: ExperimentConfig) -> Outcome:
    from .multiplier import Signal, dyadic_partition, frequency_projection

    space = parse_space(cfg.space)
    rng = np.random.default_rng(cfg.seed)
    rows = []
    for N in cfg.grid_sizes:
        blocks = dyadic_partition(N)
        for trial in range(cfg.trials):
            f = Signal.gaussian(N, space, rng)
            total = sum(frequency_projection(b, f).samples for b in blocks)
            rows.append({"N": N, "trial": trial, "blocks": len(blocks),
                         "reconstruction_error": float(np.abs(total - f.samples).max())})
    worst = max(r["reconstruction_error"] for r in rows)
    return Outcome(rows, [(worst <= 1e-10, f"max reconstruction error {worst:.3g} <= 1e-10")])


# --- output ------------------------------------------------------------------------------

PARAM_COLUMNS = ("experiment", "seed", "space", "cfg_p", "cfg_q", "cfg_s", "cfg_t", "cfg_r",
                 "cfg_grid_sizes", "cfg_weight", "trials", "theta")


def _fmt(value) -> str:
    if value is None:
        return ""
    if value is INF:
        return "inf"
    if isinstance(value, (bool, np.bool_)):
        return str(int(value))
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return "%.17g" % float(value)
    if isinstance(value, (list, tuple)):
        return ";".join(_fmt(v) for v in value)
    return str(value)


def param_values(cfg: ExperimentConfig) -> dict:
    return {"experiment": cfg.experiment, "seed": cfg.seed, "space": cfg.space,
            "cfg_p": cfg.p, "cfg_q": cfg.q, "cfg_s": cfg.s, "cfg_t": cfg.t, "cfg_r": cfg.r,
            "cfg_grid_sizes": cfg.grid_sizes, "cfg_weight": cfg.weight, "trials": cfg.trials,
            "theta": cfg.theta}


def csv_text(cfg: ExperimentConfig, outcome: Outcome) -> str:
    exp = REGISTRY[cfg.experiment]
    params = param_values(cfg)
    extra_cols = sorted(cfg.extras)
    header = list(PARAM_COLUMNS) + [f"cfg_{k}" for k in extra_cols] + list(exp.columns)
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in outcome.rows:
        missing = set(exp.columns) - set(row)
        if missing:
            raise RuntimeError(f"row lacks columns {sorted(missing)}")
        writer.writerow([_fmt(params[c]) for c in PARAM_COLUMNS]
                        + [cfg.extras[k] for k in extra_cols]
                        + [_fmt(row[c]) for c in exp.columns])
    return buf.getvalue()


def summary_text(cfg: ExperimentConfig, outcome: Outcome, csv_path: Path) -> str:
    stamp = _dt.datetime.now(_dt.timezone.utc).isoformat(timespec="seconds")
    lines = [f"# varmult-lab run at {stamp}", f"library version: {__version__}",
             f"experiment: {cfg.experiment}", f"rows: {len(outcome.rows)}",
             f"csv: {csv_path.name}", "config:"]
    for key, value in param_values(cfg).items():
        lines.append(f"  {key} = {_fmt(value)}")
    for key in sorted(cfg.extras):
        lines.append(f"  {key} = {cfg.extras[key]}")
    if cfg.theta is not None:
        lines.append("note: theta is recorded as metadata only")
    for note in outcome.notes:
        lines.append(f"note: {note}")
    lines.append("assertions:")
    for ok, text in outcome.assertions:
        lines.append(f"  {'PASS' if ok else 'FAIL'}: {text}")
    passed = sum(ok for ok, _ in outcome.assertions)
    lines.append(f"result: {passed}/{len(outcome.assertions)} assertions passed")
    return "\n".join(lines) + "\n"


def run(cfg: ExperimentConfig) -> tuple[int, Path, Path]:
    """Run one experiment and write its CSV and summary; returns (status, csv, summary)."""
    outcome = REGISTRY[cfg.experiment].run(cfg)
    out = Path(cfg.output)
    out.mkdir(parents=True, exist_ok=True)
    stem = f"{cfg.experiment}-{cfg.seed}"
    csv_path = out / f"{stem}.csv"
    summary_path = out / f"{stem}.summary.txt"
    csv_path.write_text(csv_text(cfg, outcome))
    summary_path.write_text(summary_text(cfg, outcome, csv_path))
    status = 0 if all(ok for ok, _ in outcome.assertions) else 1
    return status, csv_path, summary_path


def list_experiments() -> list[tuple[str, str]]:
    return [(e.name, e.description) for e in REGISTRY.values()]


def example_config(name: str, seed: int = 0, output: str = "results") -> str:
    """Minimal valid config for a registered experiment."""
    return f"experiment = {name}\nseed = {seed}\noutput = {output}\n"


def selftest(stream=None) -> int:
    from .acceptance import SELFTEST

    stream = sys.stdout if stream is None else stream
    failed = 0
    for check in SELFTEST:
        result = check()
        print(result.line(), file=stream, flush=True)
        failed += not result.passed
    print(f"selftest: {len(SELFTEST) - failed}/{len(SELFTEST)} criteria passed", file=stream)
    return 0 if failed == 0 else 1


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="varmult-lab", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)
    p_run = sub.add_parser("run", help="run the experiment described by a config file")
    p_run.add_argument("config")
    sub.add_parser("list", help="list registered experiments")
    sub.add_parser("selftest", help="run the built-in acceptance checks")
    args = parser.parse_args(argv)

    if args.command == "list":
        for name, desc in list_experiments():
            print(f"{name}\t{desc}")
        return 0
    if args.command == "selftest":
        return selftest()
    try:
        cfg = load_config(args.config)
        status, csv_path, summary_path = run(cfg)
    except ConfigError as exc:
        print(f"varmult-lab: invalid config: {exc}", file=sys.stderr)
        return 2
    except VarmultError as exc:
        print(f"varmult-lab: invalid config: {exc}", file=sys.stderr)
        return 2
    print(summary_path.read_text(), end="")
    return status


if __name__ == "__main__":
    sys.exit(main())
