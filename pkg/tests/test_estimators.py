import math

import numpy as np
import pytest

from blindgain import (
    KEYHOLE,
    RAYLEIGH,
    ConfigurationError,
    LargeScaleProfile,
    blind_estimate,
    effective_gain,
    epsilon_k,
    exact_power,
    gen_channel,
    gen_channel_batch,
    genie_estimate,
    moments,
    normalization_alpha,
    pilot_lmmse_estimate,
    statistical_estimate,
    substream,
)
from blindgain.analysis import pilot_lmmse_error_variance
from blindgain.estimators import lmmse_from_correlation, pilot_correlation


def test_blind_zero_excess_power():
    assert blind_estimate(1.0, 0.3, 5.0) == 0.0


def test_blind_pure_square_root():
    assert blind_estimate(5.0, 1.0, 0.0) == pytest.approx(2.0)


def test_blind_derived_example():
    # oracle: positive root of alpha a^2 + alpha*sbo*a + (1 - xi) = 0
    alpha, sbo, xi = 0.01, 19.0, 2.0
    roots = np.roots([alpha, alpha * sbo, 1.0 - xi])
    oracle = float(max(r.real for r in roots if abs(r.imag) < 1e-12))
    a = blind_estimate(xi, alpha, sbo)
    assert a == pytest.approx(oracle, rel=1e-9)
    assert a == pytest.approx(4.2931, abs=5e-5)
    # back-substitution recovers xi
    assert alpha * a**2 + alpha * sbo * a + 1.0 == pytest.approx(xi, rel=1e-9)


def test_blind_clamp_and_errors():
    assert blind_estimate(0.5, 0.1, 2.0) == 0.0
    with pytest.raises(ConfigurationError):
        blind_estimate(2.0, 0.0, 1.0)
    with pytest.raises(ConfigurationError):
        blind_estimate(2.0, 1.0, -1.0)


def test_statistical_examples():
    assert statistical_estimate(100, 1.0) == pytest.approx(100.0)
    assert statistical_estimate(100, 0.5) == pytest.approx(50.0)


@pytest.mark.parametrize("model", [RAYLEIGH, KEYHOLE])
def test_statistical_matches_sample_mean(model):
    profile = LargeScaleProfile(betas=(0.7,))
    rng = substream(30, "stat", model)
    G = gen_channel_batch(model, 40, profile, rng, 50_000)
    gains = np.sum(np.abs(G[:, :, 0]) ** 2, axis=1)
    se = np.std(gains, ddof=1) / np.sqrt(gains.size)
    assert abs(np.mean(gains) - statistical_estimate(40, 0.7)) <= 3 * se


def test_pilot_noiseless_recovers_gain():
    profile = LargeScaleProfile.uniform(4)
    ch = gen_channel(RAYLEIGH, 16, profile, substream(31, "pn"))
    state = normalization_alpha(3.0, 16, profile)
    for k in range(4):
        a = pilot_lmmse_estimate(
            ch, state, profile, k, substream(31, "pn-noise"), noise_scale=0.0
        )
        assert a == pytest.approx(effective_gain(ch, k), rel=1e-9)


def test_pilot_degenerate_prior_returns_mean():
    profile = LargeScaleProfile.uniform(3)
    ch = gen_channel(KEYHOLE, 10, profile, substream(32, "pp"))
    state = normalization_alpha(1.0, 10, profile)
    a = pilot_lmmse_estimate(
        ch, state, profile, 1, substream(32, "ppn"), _force_prior_variance=0.0
    )
    assert a == pytest.approx(statistical_estimate(10, 1.0))


def test_pilot_correlation_noiseless_identity():
    # by pilot-row orthogonality the cross terms vanish exactly
    profile = LargeScaleProfile.uniform(5, 0.9)
    ch = gen_channel(RAYLEIGH, 12, profile, substream(33, "pc"))
    state = normalization_alpha(2.0, 12, profile)
    for k in range(5):
        r = pilot_correlation(ch, state, k, substream(33, "pcn"), noise_scale=0.0)
        expected = math.sqrt(state.alpha) * 5 * effective_gain(ch, k)
        assert r.real == pytest.approx(expected, rel=1e-9)
        assert abs(r.imag) <= 1e-9 * expected


def test_pilot_lmmse_error_matches_closed_form():
    # Derived oracle: error variance v - c^2 (alpha K^2 v + K) of the LMMSE
    # update on the complex correlator statistic, normalized by (M beta)^2.
    M, K, beta = 100, 20, 1.0
    profile = LargeScaleProfile.uniform(K, beta)
    state = normalization_alpha(1.0, M, profile)  # SNR = 0 dB
    alpha = state.alpha
    v = moments(RAYLEIGH, M, beta).variance
    mu = M * beta
    target = pilot_lmmse_error_variance(RAYLEIGH, M, K, beta, alpha) / mu**2

    rng = substream(34, "plmmse")
    trials = 100_000
    one_user = LargeScaleProfile.uniform(1, beta)  # only user 0's gain matters
    gains = np.empty(trials)
    done = 0
    while done < trials:
        n = min(20_000, trials - done)
        G = gen_channel_batch(RAYLEIGH, M, one_user, rng, n)
        gains[done : done + n] = np.sum(np.abs(G[:, :, 0]) ** 2, axis=1)
        done += n
    noise = math.sqrt(K / 2.0) * (
        rng.standard_normal(trials) + 1j * rng.standard_normal(trials)
    )  # CN(0, K)
    r = math.sqrt(alpha) * K * gains + noise
    sa = math.sqrt(alpha)
    c = sa * K * v / (alpha * K**2 * v + K)
    a = mu + c * (r - sa * K * mu)
    errs = np.abs(a - gains) ** 2 / mu**2
    se = np.std(errs, ddof=1) / np.sqrt(trials)
    assert abs(np.mean(errs) - target) <= 3 * se


def test_pilot_lmmse_consistent_with_components():
    profile = LargeScaleProfile.uniform(4)
    ch = gen_channel(RAYLEIGH, 20, profile, substream(35, "pcons"))
    state = normalization_alpha(2.0, 20, profile)
    k = 2
    a = pilot_lmmse_estimate(ch, state, profile, k, substream(35, "pcons-n"))
    r = pilot_correlation(ch, state, k, substream(35, "pcons-n"))
    v = moments(RAYLEIGH, 20, 1.0).variance
    raw = lmmse_from_correlation(r, state.alpha, 4, 20.0, v)
    assert a == pytest.approx(max(0.0, raw.real), rel=1e-12)


def test_genie():
    profile = LargeScaleProfile.uniform(2)
    ch = gen_channel(KEYHOLE, 7, profile, substream(36, "gen"))
    for k in range(2):
        assert genie_estimate(ch, k) == effective_gain(ch, k)


@pytest.mark.parametrize("model", [RAYLEIGH, KEYHOLE])
def test_exact_power_identity_per_realization(model):
    # feeding the exact conditional power reproduces the algebraic identity:
    # a = -bbar/2 + sqrt((bbar/2 + ||g||^2)^2 + eps)
    M, K = 30, 6
    profile = LargeScaleProfile.uniform(K)
    state = normalization_alpha(8.0, M, profile)
    for trial in range(20):
        ch = gen_channel(model, M, profile, substream(37, "pe", model, trial))
        for k in range(K):
            xi = exact_power(ch, state, k)
            a = blind_estimate(xi, state.alpha, profile.sum_excluding(k))
            bbar = profile.sum_excluding(k)
            gain = effective_gain(ch, k)
            eps = epsilon_k(ch, profile, k)
            closed = -bbar / 2 + math.sqrt((bbar / 2 + gain) ** 2 + eps)
            assert a == pytest.approx(closed, rel=1e-9)
            back = state.alpha * a**2 + state.alpha * bbar * a + 1.0
            assert back == pytest.approx(xi, rel=1e-9)


def test_blind_monotone_in_xi():
    xs = np.linspace(1.0, 50.0, 200)
    vals = [blind_estimate(x, 0.02, 7.0) for x in xs]
    assert all(b > a for a, b in zip(vals, vals[1:]))


@pytest.mark.parametrize("model", [RAYLEIGH, KEYHOLE])
def test_consistency_in_M(model):
    # with exact power input, the relative error shrinks as M grows
    K = 10
    profile = LargeScaleProfile.uniform(K)
    medians = []
    for M in (25, 100, 400):
        state = normalization_alpha(10.0, M, profile)
        alpha = state.alpha
        rng = substream(38, "cons", model, M)
        G = gen_channel_batch(model, M, profile, rng, 500)
        g = G[:, :, 0]
        cross = np.einsum("nm,nmj->nj", g.conj(), G)
        mags = np.abs(cross) ** 2
        gains = np.real(cross[:, 0])
        inter = np.sum(mags, axis=1) - gains**2
        xi = alpha * (gains**2 + inter) + 1.0
        bbar = profile.sum_excluding(0)
        b = alpha * bbar
        a = (-b + np.sqrt(b**2 + 4 * alpha * (xi - 1))) / (2 * alpha)
        rel = np.abs(a - gains) / (M * 1.0)
        medians.append(np.median(rel))
    assert medians[0] > medians[1] > medians[2]
