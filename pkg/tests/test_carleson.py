import numpy as np
import pytest
from hypothesis import given, strategies as st

from varmult.carleson import (IntervalFamily, brute_force_variational_carleson, carleson_maximal,
                              cuts, enumerate_families, partial_fourier, partial_sum_paths,
                              rubio_functional, rubio_growth_experiment, variational_carleson)
from varmult.errors import OracleLimitError, ParameterError
from varmult.multiplier import FrequencyInterval, Signal
from varmult.spaces import Scalar, SequenceP
from varmult.weights import constant_weight, power_weight, weighted_lp_norm, weighted_lp_of_values

spaces = st.sampled_from([Scalar(), SequenceP(2, 2), SequenceP(1.5, 2)])


@st.composite
def signals(draw, sizes=(2, 4, 8, 16)):
    N = draw(st.sampled_from(sizes))
    sp = draw(spaces)
    seed = draw(st.integers(0, 2**32 - 1))
    return Signal.gaussian(N, sp, np.random.default_rng(seed))


def test_partial_fourier_edges(rng):
    f = Signal.gaussian(16, SequenceP(2, 2), rng)
    assert np.all(partial_fourier(f, -8).samples == 0)
    assert np.all(partial_fourier(f, -100).samples == 0)
    assert np.abs(partial_fourier(f, 8).samples - f.samples).max() <= 1e-12
    assert np.abs(partial_fourier(f, 50).samples - f.samples).max() <= 1e-12


def test_single_mode_jumps_at_next_cut():
    f = Signal.mode(16, 3, [2.0], Scalar())
    assert np.abs(partial_fourier(f, 3).samples).max() <= 1e-14
    assert np.abs(partial_fourier(f, 3.5).samples - f.samples).max() <= 1e-14
    assert np.abs(partial_fourier(f, 4).samples - f.samples).max() <= 1e-14


def test_paths_match_partial_fourier(rng):
    f = Signal.gaussian(16, SequenceP(2, 2), rng)
    P = partial_sum_paths(f)
    for j, a in enumerate(cuts(16)):
        assert np.abs(P[:, j, :] - partial_fourier(f, a).samples).max() <= 1e-12


@pytest.mark.parametrize("q", [1.0, 2.0, 3.5])
def test_single_mode_constant_values(q):
    x0 = np.array([3.0, 4.0j])
    f = Signal.mode(32, -5, x0, SequenceP(2, 2))
    assert np.allclose(carleson_maximal(f), 5.0, rtol=1e-12)
    assert np.allclose(variational_carleson(f, q), 5.0, rtol=1e-12)


def test_nonnegative_spectrum_peaks_at_zero(rng):
    N = 32
    spec = np.zeros(N, dtype=complex)
    spec[[1, 2, 5, -3]] = rng.uniform(0.5, 2, 4)
    f = Signal.from_spectrum(spec * N, Scalar())
    assert carleson_maximal(f)[0] == pytest.approx(spec.real.sum(), rel=1e-12)


@given(signals())
def test_maximal_dominates_every_cut(f):
    M = carleson_maximal(f)
    for a in cuts(f.N):
        assert np.all(partial_fourier(f, a).pointwise_norms() <= M + 1e-12)


@given(signals(sizes=(2, 4, 8)), st.sampled_from([1.0, 2.0, 3.0]))
def test_dp_equals_family_enumeration(f, q):
    a = variational_carleson(f, q)
    b = brute_force_variational_carleson(f, q)
    assert np.abs(a - b).max() <= 1e-10


def test_family_enumeration_limit(rng):
    with pytest.raises(OracleLimitError):
        brute_force_variational_carleson(Signal.gaussian(16, Scalar(), rng), 2)


def test_family_count_small():
    # N = 2 has cuts {-1, 0, 1}: [-1,0), [-1,1), [0,1) and the pair {[-1,0), [0,1)}
    assert len(enumerate_families(2)) == 4


@given(signals(sizes=(8, 16)))
def test_large_q_sees_half_the_maximal_value(f):
    M = carleson_maximal(f)
    V = variational_carleson(f, 200.0)
    assert np.all(V >= 0.5 * M - 1e-10)


@given(signals(), st.floats(1.0, 6.0), st.floats(1.0, 6.0))
def test_monotone_in_q(f, q1, q2):
    lo, hi = sorted((q1, q2))
    assert np.all(variational_carleson(f, hi) <= variational_carleson(f, lo) + 1e-10)


@given(signals())
def test_maximal_below_twice_variation(f):
    assert np.all(carleson_maximal(f) <= 2 * variational_carleson(f, 1.0) + 1e-10)


def test_q_below_one_raises(rng):
    with pytest.raises(ParameterError):
        variational_carleson(Signal.gaussian(8, Scalar(), rng), 0.5)


def test_overlapping_family_raises():
    with pytest.raises(ParameterError):
        IntervalFamily((FrequencyInterval(0, 3), FrequencyInterval(2, 4)))


def test_rubio_whole_band_is_pointwise_norm(rng):
    f = Signal.gaussian(16, SequenceP(1.5, 3), rng)
    got = rubio_functional(f, [FrequencyInterval(-8, 8)], 2.0)
    assert np.allclose(got, f.pointwise_norms(), rtol=1e-12)


def test_rubio_singleton_modes_at_origin(rng):
    N, d = 16, 3
    ks = [-3, 1, 2, 6]
    coef = rng.uniform(0, 1, (len(ks), d))
    spec = np.zeros((N, d), dtype=complex)
    for k, c in zip(ks, coef):
        spec[k % N] = c * N
    f = Signal.from_spectrum(spec, SequenceP(2, d))
    fam = [FrequencyInterval(k, k + 1) for k in ks]
    got = rubio_functional(f, fam, 2.0)[0]
    assert got == pytest.approx(np.sqrt(np.sum(coef**2)), rel=1e-12)


@given(signals(), st.data())
def test_rubio_below_variational(f, data):
    c = list(cuts(f.N))
    picks = sorted(data.draw(st.lists(st.sampled_from(c), min_size=2, max_size=len(c), unique=True)))
    fam = [FrequencyInterval(a, b) for a, b in zip(picks[::2], picks[1::2])]
    q = data.draw(st.floats(1.0, 5.0))
    assert np.all(rubio_functional(f, fam, q) <= variational_carleson(f, q) + 1e-10)


def test_modulation_invariance(rng):
    N = 64
    spec = np.zeros((N, 2), dtype=complex)
    ks = np.arange(-10, 11)
    spec[ks % N] = rng.standard_normal((len(ks), 2)) * N
    f = Signal.from_spectrum(spec, SequenceP(2, 2))
    g = Signal(f.samples * np.exp(2j * np.pi * np.arange(N) / N)[:, None], f.space)
    for q in (1.0, 2.0, 4.0):
        assert np.allclose(variational_carleson(f, q), variational_carleson(g, q), rtol=1e-10)


def test_mode_compression_tolerance(rng):
    f = Signal.trig_polynomial(256, 8, SequenceP(2, 2), rng)
    full = variational_carleson(f, 4.0)
    fast = variational_carleson(f, 4.0, support_tol=1e-13)
    assert np.abs(full - fast).max() <= 1e-9 * full.max()


def test_thread_count_does_not_change_values(rng, monkeypatch):
    f = Signal.gaussian(256, Scalar(), rng)
    one = variational_carleson(f, 2.0)
    monkeypatch.setenv("VARMULT_THREADS", "4")
    assert np.array_equal(one, variational_carleson(f, 2.0))


def test_rubio_growth_single_mode_ratio_is_one():
    f = Signal.mode(64, 3, [1.0, 1.0j], SequenceP(2, 2))
    w = power_weight(64, 0.5)
    ratio = weighted_lp_of_values(variational_carleson(f, 4.0), w, 4.0, f.spacing) / \
        weighted_lp_norm(f, w, 4.0)
    assert ratio == pytest.approx(1.0, abs=1e-12)


def test_rubio_growth_rejects_limiting_case():
    with pytest.raises(ParameterError, match="known to be false"):
        rubio_growth_experiment(Scalar(), 4 / 3, 4, {"one": constant_weight}, [64], 1, 0)


def test_rubio_growth_rows():
    rows = rubio_growth_experiment(Scalar(), 4, 4, {"one": constant_weight,
                                                    "sqrt": lambda N: power_weight(N, 0.5)},
                                   [64, 128], 3, seed=1)
    assert len(rows) == 2 * 2 * 3
    assert all(r["ratio"] >= 1 - 1e-12 for r in rows)  # C_* f dominates |f| pointwise
    assert all(r["ap_constant"] >= 1 for r in rows)
    same = {(r["weight"], r["trial"]): r["ratio"] for r in rows if r["N"] == 64}
    for r in rows:
        if r["N"] == 128:
            assert r["ratio"] == pytest.approx(same[(r["weight"], r["trial"])], rel=0.05)
