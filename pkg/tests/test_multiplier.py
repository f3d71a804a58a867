import numpy as np
import pytest
from hypothesis import given, strategies as st

from varmult.errors import ParameterError, SpaceMismatchError
from varmult.multiplier import (FrequencyInterval, Signal, Symbol, apply_multiplier,
                                dyadic_partition, estimate_multiplier_norm, frequencies,
                                frequency_projection, resolvent_entries, resolvent_jump,
                                resolvent_symbol, symbol_variation_profile)
from varmult.spaces import OperatorValue, Scalar, SequenceP, operator_norm
from varmult.weights import power_weight, weighted_lp_norm

INV_SQRT10 = 1 / np.sqrt(10)


def _dft_matrix(N):
    n = np.arange(N)
    return np.exp(-2j * np.pi * np.outer(n, n) / N)


def test_grid_must_be_power_of_two():
    with pytest.raises(ParameterError):
        Signal(np.zeros(6), Scalar())


def test_frequencies_in_dft_order():
    assert list(frequencies(8)) == [0, 1, 2, 3, -4, -3, -2, -1]


@pytest.mark.parametrize("N", [2, 64, 2**14])
def test_round_trip(rng, N):
    f = Signal.gaussian(N, SequenceP(2, 2), rng)
    back = Signal.from_spectrum(f.spectrum(), f.space)
    assert np.abs(back.samples - f.samples).max() <= 1e-10 * np.abs(f.samples).max()


def test_identity_and_scalar_symbols(rng):
    sp = SequenceP(3, 2)
    f = Signal.gaussian(32, sp, rng)
    one = Symbol.scalar(np.ones(32), sp)
    assert np.abs(apply_multiplier(one, f).samples - f.samples).max() <= 1e-10
    lam = 2 - 3j
    got = apply_multiplier(Symbol.scalar(np.full(32, lam), sp), f).samples
    assert np.allclose(got, lam * f.samples, atol=1e-12)


def test_hilbert_transform_against_dense_dft(rng):
    N = 32
    x = rng.standard_normal(N)
    k = frequencies(N)
    m = Symbol.scalar(-1j * np.sign(k), Scalar())
    got = apply_multiplier(m, Signal(x, Scalar())).samples[:, 0]
    F = _dft_matrix(N)
    want = np.linalg.solve(F, (-1j * np.sign(k)) * (F @ x))
    assert np.abs(got - want).max() <= 1e-12
    # partner of cos is sin away from the Nyquist line
    t = np.arange(N) / N
    hc = apply_multiplier(m, Signal(np.cos(2 * np.pi * 3 * t), Scalar())).samples[:, 0]
    assert np.allclose(hc, np.sin(2 * np.pi * 3 * t), atol=1e-12)


def test_space_mismatch(rng):
    f = Signal.gaussian(8, SequenceP(2, 2), rng)
    with pytest.raises(SpaceMismatchError):
        apply_multiplier(Symbol.scalar(np.ones(8), SequenceP(2, 3)), f)


def test_composition(rng):
    N = 32
    X, Y, Z = SequenceP(2, 3), SequenceP(1.5, 2), SequenceP(4, 2)
    m2 = Symbol(rng.standard_normal((N, 2, 3)) + 0j, X, Y)
    m1 = Symbol(rng.standard_normal((N, 2, 2)) + 1j * rng.standard_normal((N, 2, 2)), Y, Z)
    f = Signal.gaussian(N, X, rng)
    a = apply_multiplier(m1, apply_multiplier(m2, f)).samples
    b = apply_multiplier(m1 @ m2, f).samples
    assert np.abs(a - b).max() <= 1e-9


def test_projection_examples(rng):
    N = 16
    f = Signal.gaussian(N, Scalar(), rng)
    full = FrequencyInterval(-N // 2, N // 2)
    assert np.abs(frequency_projection(full, f).samples - f.samples).max() <= 1e-12
    mode = Signal.mode(N, 3, [1.0], Scalar())
    assert np.allclose(frequency_projection(FrequencyInterval(2, 5), mode).samples, mode.samples)
    assert np.abs(frequency_projection(FrequencyInterval(4, 6), mode).samples).max() <= 1e-14


@given(st.integers(-16, 15), st.integers(1, 32), st.integers(0, 2**32 - 1))
def test_projection_algebra(lo, width, seed):
    N = 32
    hi = min(lo + width, 16)
    if hi <= lo:
        return
    r = np.random.default_rng(seed)
    f = Signal.gaussian(N, SequenceP(2, 2), r)
    I = FrequencyInterval(lo, hi)
    pf = frequency_projection(I, f)
    assert np.abs(frequency_projection(I, pf).samples - pf.samples).max() <= 1e-10
    if hi < 16:
        J = FrequencyInterval(hi, 16)
        assert np.abs(frequency_projection(J, pf).samples).max() <= 1e-10
    e_f = np.sum(np.abs(f.samples) ** 2)
    e_p = np.sum(np.abs(pf.samples) ** 2)
    assert e_p <= e_f * (1 + 1e-12)
    # equality exactly when the spectrum already sits inside I
    spec_out = np.abs(f.spectrum()[~I.mask(N)]).sum()
    assert (abs(e_p - e_f) <= 1e-9 * e_f) == (spec_out == 0)


def test_dyadic_partition_small_grid():
    blocks = dyadic_partition(8)
    members = [tuple(b.members(8)) for b in blocks]
    assert sorted(k for m in members for k in m) == list(range(-4, 4))
    assert (0,) in members and (1,) in members and (2, 3) in members
    assert (-1,) in members
    assert (-4, -3, -2) in members  # Nyquist joins the topmost negative block


@pytest.mark.parametrize("N", [2, 4, 8, 64, 1024, 4096])
def test_partition_covers_once(N):
    counts = np.zeros(N, dtype=int)
    for b in dyadic_partition(N):
        counts += b.mask(N)
    assert np.all(counts == 1)


@pytest.mark.parametrize("N", [64, 1024, 4096])
def test_littlewood_paley_reconstruction(rng, N):
    f = Signal.gaussian(N, SequenceP(2, 2), rng)
    total = sum(frequency_projection(b, f).samples for b in dyadic_partition(N))
    assert np.abs(total - f.samples).max() <= 1e-10


def test_profile_examples():
    N = 64
    sp = SequenceP(2, 2)
    const = Symbol.scalar(np.full(N, 0.7), sp)
    assert np.all(symbol_variation_profile(const, dyadic_partition(N), 1.5) == 0)
    ind = Symbol.indicator(FrequencyInterval(10, 12), N, Scalar())
    block = FrequencyInterval(8, 16)
    for s in (1.0, 2.0, 3.0):
        assert symbol_variation_profile(ind, [block], s)[0] == pytest.approx(2 ** (1 / s))


def test_resolvent_entries():
    e = resolvent_entries(5, np.array([0.0]))
    assert np.allclose(e, 1.0)
    for n in range(1, 21):
        norm, entry = resolvent_jump(n, 20)
        assert entry == pytest.approx(INV_SQRT10, abs=1e-12)
        assert norm >= INV_SQRT10 - 1e-9
        # diagonal operator: the exact norm is the largest entry modulus
        e = resolvent_entries(20, np.array([2.0**n, 2.0 ** (n + 1)]))
        diff = np.diag(e[1] - e[0])
        exact, cert = operator_norm(OperatorValue(diff, SequenceP(3, 20), SequenceP(3, 20)))
        assert cert and exact == pytest.approx(norm, rel=1e-15)


def test_resolvent_two_pi_flag():
    plain = resolvent_entries(3, np.array([1.0]))
    scaled = resolvent_entries(3, np.array([1 / (2 * np.pi)]), two_pi=True)
    assert np.allclose(plain, scaled, atol=1e-15)


def test_resolvent_jump_floor_under_both_normalizations():
    for two_pi in (False, True):
        low = min(resolvent_jump(n, 40, two_pi)[0] for n in range(1, 21))
        assert low >= 1 / np.sqrt(10) - 1e-9


@pytest.mark.parametrize("p", [1.5, 2.0, 4.0])
def test_resolvent_blocks_meet_the_floor(p):
    N = 2**10
    m = resolvent_symbol(9, N, p=p)
    blocks = [b for b in dyadic_partition(N) if 0 < b.lo and b.hi < N // 2]
    prof = symbol_variation_profile(m, blocks, 1.5, closed=True)
    assert prof.min() >= INV_SQRT10 - 1e-9


def test_open_grid_blocks_can_fall_short():
    # without the closed endpoint the grid misses part of the jump
    N = 2**10
    m = resolvent_symbol(9, N)
    block = FrequencyInterval(8, 16)
    assert symbol_variation_profile(m, [block], 2.0)[0] < INV_SQRT10
    assert symbol_variation_profile(m, [block], 2.0, closed=True)[0] >= INV_SQRT10 - 1e-12


def test_estimate_identity_and_scalar():
    sp = SequenceP(1.5, 2)
    one = Symbol.scalar(np.ones(32), sp)
    assert estimate_multiplier_norm(one, 3.0).ratio == pytest.approx(1.0, abs=1e-9)
    lam = Symbol.scalar(np.full(32, -2.5j), sp)
    assert estimate_multiplier_norm(lam, 1.5).ratio == pytest.approx(2.5, rel=1e-12)


def test_estimate_plancherel(rng):
    N = 64
    X, Y = SequenceP(2, 3), SequenceP(2, 2)
    ent = rng.standard_normal((N, 2, 3)) + 1j * rng.standard_normal((N, 2, 3))
    est = estimate_multiplier_norm(Symbol(ent, X, Y), 2.0, probes=2)
    top = np.linalg.svd(ent, compute_uv=False)[:, 0].max()
    assert est.ratio <= top * (1 + 1e-9)
    assert est.ratio >= 0.98 * top


def test_estimate_is_linear_in_scaling(rng):
    N = 32
    m = Symbol.diagonal(rng.standard_normal((N, 2)), SequenceP(3, 2))
    w = power_weight(N, 0.5)
    a = estimate_multiplier_norm(m, 3.0, w=w, seed=4)
    b = estimate_multiplier_norm(m.scaled(-3.0), 3.0, w=w, seed=4)
    assert b.ratio == pytest.approx(3 * a.ratio, rel=1e-12)


def test_estimate_lower_bounds_the_witness(rng):
    m = Symbol.scalar(rng.standard_normal(32), Scalar())
    est = estimate_multiplier_norm(m, 4.0, seed=1)
    f = est.best_probe
    assert weighted_lp_norm(apply_multiplier(m, f), None, 4) / weighted_lp_norm(f, None, 4) == \
        pytest.approx(est.ratio, rel=1e-12)
