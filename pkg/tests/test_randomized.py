from itertools import product

import numpy as np
import pytest
from hypothesis import given, strategies as st

from varmult.errors import ParameterError, SpaceMismatchError
from varmult.randomized import (RademacherEstimate, cotype_constant, cotype_from_rubio_experiment,
                                rademacher_mean, random_diagonal_contractions, rbound_lower,
                                rr_to_rbound_experiment, sign_table, tuple_ratio, type_constant)
from varmult.spaces import INF, OperatorValue, Schatten, SequenceP


def _enumerate(V, space, moment):
    """Plain loop over all sign patterns."""
    vals = []
    for eps in product((1, -1), repeat=len(V)):
        vals.append(space.norm(np.tensordot(eps, V, axes=1)) ** moment)
    return np.mean(vals) ** (1 / moment)


def test_sign_tables():
    assert sign_table(3).shape == (8, 3)
    assert len({tuple(r) for r in sign_table(4).real}) == 16
    S = sign_table(2, "steinhaus8")
    assert S.shape == (64, 2) and np.allclose(np.abs(S), 1)


def test_single_vector_is_its_norm():
    sp = SequenceP(1.5, 3)
    v = np.array([1.0, -2.0, 0.5j])
    for moment in (1, 2, 3):
        est = rademacher_mean([v], sp, moment)
        assert est.method == "exact" and est.stderr == 0
        assert est.mean == pytest.approx(sp.norm(v), rel=1e-14)


@given(st.integers(1, 12), st.integers(0, 2**32 - 1))
def test_hilbert_moment_two_identity(n, seed):
    r = np.random.default_rng(seed)
    V = r.standard_normal((n, 3)) + 1j * r.standard_normal((n, 3))
    got = rademacher_mean(V, SequenceP(2, 3), 2).mean
    assert got == pytest.approx(np.sqrt(np.sum(np.abs(V) ** 2)), rel=1e-12)


@given(st.integers(1, 8), st.integers(0, 2**32 - 1), st.sampled_from([1.0, 2.0, 3.0]))
def test_exact_matches_loop_oracle(n, seed, moment):
    r = np.random.default_rng(seed)
    sp = SequenceP(1, 2)
    V = r.standard_normal((n, 2))
    assert rademacher_mean(V, sp, moment).mean == pytest.approx(_enumerate(V, sp, moment), rel=1e-12)


@given(st.integers(1, 10), st.integers(0, 2**32 - 1))
def test_kahane_comparison_in_hilbert_space(n, seed):
    r = np.random.default_rng(seed)
    V = r.standard_normal((n, 2))
    m1 = rademacher_mean(V, SequenceP(2, 2), 1).mean
    m2 = rademacher_mean(V, SequenceP(2, 2), 2).mean
    assert m1 <= m2 * (1 + 1e-12) and m2 <= np.sqrt(2) * m1 * (1 + 1e-12)


def test_monte_carlo_within_three_stderr(rng):
    sp = SequenceP(1, 2)
    V = rng.standard_normal((3, 2))
    exact = rademacher_mean(V, sp)
    mc = rademacher_mean(V, sp, budget=100_000, seed=5, method="montecarlo")
    assert mc.method == "montecarlo" and mc.sample_count == 100_000 and mc.stderr > 0
    assert abs(mc.mean - exact.mean) <= 3 * mc.stderr


def test_monte_carlo_used_beyond_twelve(rng):
    est = rademacher_mean(rng.standard_normal((13, 2)), SequenceP(1, 2), budget=1000)
    assert est.method == "montecarlo"


def test_monte_carlo_is_thread_independent(rng, monkeypatch):
    V = rng.standard_normal((14, 2))
    a = rademacher_mean(V, SequenceP(1, 2), budget=30_000, seed=2)
    monkeypatch.setenv("VARMULT_THREADS", "3")
    b = rademacher_mean(V, SequenceP(1, 2), budget=30_000, seed=2)
    assert a == b


def test_estimate_invariants():
    with pytest.raises(ParameterError):
        RademacherEstimate(1.0, 0.1, "exact", 4)
    with pytest.raises(ParameterError):
        RademacherEstimate(-1.0, 0.0, "exact", 4)


def test_type_and_cotype_examples(rng):
    V = rng.standard_normal((5, 4))
    assert type_constant(SequenceP(2, 4), V, 2) == pytest.approx(1.0, rel=1e-12)
    assert cotype_constant(SequenceP(2, 4), V, 2) == pytest.approx(1.0, rel=1e-12)
    v = rng.standard_normal((1, 4))
    for space in (SequenceP(1, 4), SequenceP(3, 4)):
        assert type_constant(space, v, 1.3) == pytest.approx(1.0, rel=1e-12)
        assert cotype_constant(space, v, 5) == pytest.approx(1.0, rel=1e-12)


@pytest.mark.parametrize("n", [2, 5, 12])
def test_basis_of_l1_type_ratio(n):
    sp = SequenceP(1, n)
    basis = np.eye(n)
    # every signed sum of the basis has l^1 norm n
    want = n / n ** (1 / 1.5)
    assert type_constant(sp, basis, 1.5) == pytest.approx(want, rel=1e-12)
    assert type_constant(sp, basis, 1.5) == pytest.approx(_enumerate(basis, sp, 2) / n ** (1 / 1.5))


def test_exponent_ranges(rng):
    V = rng.standard_normal((2, 2))
    with pytest.raises(ParameterError):
        type_constant(SequenceP(2, 2), V, 2.5)
    with pytest.raises(ParameterError):
        cotype_constant(SequenceP(2, 2), V, 1.5)
    assert cotype_constant(SequenceP(2, 2), V, INF) > 0


def test_rbound_singleton_is_operator_norm():
    T = OperatorValue.diagonal([3.0, 1.0], SequenceP(1.5, 2))
    assert rbound_lower([T], budget=4) == pytest.approx(3.0, rel=1e-12)


def test_rbound_plus_minus_identity():
    X = SequenceP(3, 2)
    ops = [OperatorValue.identity(X), OperatorValue(-np.eye(2), X, X)]
    assert rbound_lower(ops, budget=8) == pytest.approx(1.0, rel=1e-12)


def test_rbound_dominates_members(rng):
    X = SequenceP(1.5, 3)
    ops = [OperatorValue(rng.standard_normal((3, 3)), X, X) for _ in range(3)]
    best = rbound_lower(ops, budget=4, seed=1)
    for T in ops:
        assert best >= rbound_lower([T], budget=0, seed=1) - 1e-12


def test_rbound_mismatched_spaces(rng):
    a = OperatorValue.identity(SequenceP(2, 2))
    b = OperatorValue.identity(SequenceP(3, 2))
    with pytest.raises(SpaceMismatchError):
        rbound_lower([a, b])


def test_rbound_below_hilbert_aggregate_bound():
    # in Hilbert space with real signs the R-bound is at most sqrt(2) times the sup norm
    X = SequenceP(2, 3)
    for trial in range(100):
        diags = random_diagonal_contractions(3, 3, np.random.default_rng([17, trial]))
        ops = [OperatorValue.diagonal(d, X) for d in diags]
        sup = max(np.abs(d).max() for d in diags)
        assert rbound_lower(ops, budget=2, seed=trial) <= np.sqrt(2) * sup * (1 + 1e-12)


def test_rbound_convex_hull_stability():
    X = SequenceP(3, 3)
    for j in range(6):
        diags = random_diagonal_contractions(3, 3, np.random.default_rng([3, j]))
        ops = [OperatorValue.diagonal(d, X) for d in diags]
        avg = OperatorValue.diagonal((diags[0] + diags[2]) / 2, X)
        base = rbound_lower(ops, budget=8, seed=j)
        assert rbound_lower(ops + [avg], budget=8, seed=j) <= 1.05 * base


def test_tuple_ratio_moment_two_hilbert(rng):
    X = SequenceP(2, 2)
    T = OperatorValue(rng.standard_normal((2, 2)), X, X)
    xs = rng.standard_normal((3, 2))
    got = tuple_ratio([T, T, T], xs, X, X, moment=2)
    want = np.sqrt(np.sum(np.abs(xs @ T.matrix.T) ** 2) / np.sum(xs**2))
    assert got == pytest.approx(want, rel=1e-12)


def test_rr_constant_symbol_ratio_at_most_one():
    rows = rr_to_rbound_experiment(SequenceP(2, 2), SequenceP(2, 2), 2, 2, INF, trials=3, seed=0,
                                   pieces=1, budget=4)
    assert all(r["ratio"] <= 1 + 1e-9 for r in rows)


def test_rr_hilbert_atom_sup_bound():
    rows = rr_to_rbound_experiment(SequenceP(2, 3), SequenceP(2, 3), 2, 2, INF, trials=4, seed=1,
                                   budget=4)
    assert all(r["ratio"] <= np.sqrt(2) * (1 + 1e-12) for r in rows)


def test_rr_exponent_relation():
    with pytest.raises(ParameterError, match="1/r"):
        rr_to_rbound_experiment(SequenceP(3, 2), SequenceP(1.5, 2), 1.5, 3, 2, 1, 0)


def test_rr_table_shape():
    rows = rr_to_rbound_experiment(SequenceP(3, 3), SequenceP(1.5, 3), 1.5, 3, 3, trials=3,
                                   seed=2, budget=4)
    assert [r["trial"] for r in rows] == [0, 1, 2]
    assert all(np.isfinite(r["ratio"]) and r["ratio"] > 0 for r in rows)


def test_cotype_one_mode_recovery():
    rows = cotype_from_rubio_experiment(SequenceP(1, 4), 2, 2, trials=2, seed=0, n_terms=1, N=16)
    assert all(r["recovery_error"] <= 1e-10 for r in rows)


def test_cotype_hilbert_ratio_is_one():
    rows = cotype_from_rubio_experiment(SequenceP(2, 3), 2, 2, trials=3, seed=1)
    for r in rows:
        assert r["cotype_ratio"] == pytest.approx(1.0, rel=1e-12)
        assert r["rubio_ratio"] == pytest.approx(1.0, rel=1e-12)


def test_cotype_l1_against_enumeration():
    rows = cotype_from_rubio_experiment(SequenceP(1, 8), 2, 2, trials=2, seed=3, n_terms=5)
    for trial, r in enumerate(rows):
        xs_rng = np.random.default_rng([3, trial])
        xs = xs_rng.standard_normal((5, 8)) + 1j * xs_rng.standard_normal((5, 8))
        want = np.sqrt(np.sum(SequenceP(1, 8).norms(xs) ** 2)) / _enumerate(xs, SequenceP(1, 8), 2)
        assert r["cotype_ratio"] == pytest.approx(want, rel=1e-12)


def test_cotype_band_overflow():
    with pytest.raises(ParameterError, match="band overflow"):
        cotype_from_rubio_experiment(SequenceP(2, 2), 2, 2, 1, 0, n_terms=6, N=32)


def test_schatten_type_constant_bounded(rng):
    # S^1.5 has type 1.5: ratios on random families stay moderate
    sp = Schatten(1.5, 2)
    for _ in range(5):
        V = rng.standard_normal((6, 4))
        assert type_constant(sp, V, 1.5) <= 2.0
