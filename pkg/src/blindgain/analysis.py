"""Closed-form moments, exact conditional received power, the interference
error term, and the accuracy metric (closed form and Monte Carlo)."""

import math
from dataclasses import dataclass
from typing import Iterable, Optional, Tuple

import numpy as np

from .channel import (
    KEYHOLE,
    RAYLEIGH,
    ChannelRealization,
    effective_gain,
    gen_channel_batch,
)
from .errors import ConfigurationError
from .precoder import PrecoderState
from .profile import LargeScaleProfile


@dataclass(frozen=True)
class Moments:
    mean: float  # E||g||^2
    fourth: float  # E||g||^4
    variance: float  # Var||g||^2


def moments(model_tag: str, M: int, beta: float) -> Moments:
    """Closed-form moments of the effective gain for one user.

    Rayleigh: (M beta, beta^2 M(M+1), M beta^2).
    Keyhole:  (M beta, 2 beta^2 M(M+1), beta^2 (M^2 + 2M)).
    """
    if M < 1 or beta <= 0:
        raise ConfigurationError("need M >= 1 and beta > 0")
    if model_tag == RAYLEIGH:
        return Moments(M * beta, beta**2 * M * (M + 1), M * beta**2)
    if model_tag == KEYHOLE:
        return Moments(M * beta, 2 * beta**2 * M * (M + 1), beta**2 * (M**2 + 2 * M))
    raise ConfigurationError(f"unknown channel model: {model_tag!r}")


def interference_power(ch: ChannelRealization, k: int) -> float:
    """sum_{k' != k} |g_k^H g_k'|^2 for one realization."""
    if not 0 <= k < ch.K:
        raise IndexError(f"user index {k} out of range for K={ch.K}")
    cross = ch.G.conj().T @ ch.G[:, k]  # cross[k'] = g_k'^H g_k
    mags = np.abs(cross) ** 2
    return float(np.sum(mags) - mags[k])


def exact_power(ch: ChannelRealization, state: PrecoderState, k: int) -> float:
    """Conditional mean received power: alpha||g_k||^4 + alpha*interference + 1."""
    gain = effective_gain(ch, k)
    return state.alpha * gain**2 + state.alpha * interference_power(ch, k) + 1.0


def epsilon_k(ch: ChannelRealization, profile: LargeScaleProfile, k: int) -> float:
    """Interference deviation from its conditional mean given g_k.

    sum_{k' != k} |g_k^H g_k'|^2 - (sum_{k' != k} beta_k') ||g_k||^2.
    Defined as exactly 0 for K = 1 (both terms vanish).
    """
    if ch.K == 1:
        return 0.0
    return interference_power(ch, k) - profile.sum_excluding(k) * effective_gain(ch, k)


def accuracy_denominator(
    model_tag: str, M: int, profile: LargeScaleProfile, k: int
) -> float:
    """E[(0.5 * sum_{k' != k} beta_k' + ||g_k||^2)^2] in closed form."""
    bbar = profile.sum_excluding(k)
    mom = moments(model_tag, M, profile.betas[k])
    return 0.25 * bbar**2 + bbar * mom.mean + mom.fourth


def varrho_closed_form(
    model_tag: str, M: int, K: int, profile: LargeScaleProfile, k: int
) -> float:
    """Relative size of the interference deviation, closed form.

    E|eps_k|^2 / E[(0.5 sum' beta + ||g_k||^2)^2]^2; the numerator is
    M(M+1) beta_k^2 sum_{k' != k} beta_k'^2 for Rayleigh and 6x that for
    keyhole. Scales as O(1/M^2).
    """
    if K < 2 or profile.K != K:
        raise ConfigurationError("accuracy metric requires K >= 2 matching profile")
    betas = profile.as_array()
    beta_k = betas[k]
    sum_sq_others = float(np.sum(betas**2) - beta_k**2)
    factor = 1.0 if model_tag == RAYLEIGH else 6.0
    if model_tag not in (RAYLEIGH, KEYHOLE):
        raise ConfigurationError(f"unknown channel model: {model_tag!r}")
    numerator = factor * M * (M + 1) * beta_k**2 * sum_sq_others
    return numerator / accuracy_denominator(model_tag, M, profile, k) ** 2


def epsilon_second_moment(
    model_tag: str, M: int, profile: LargeScaleProfile, k: int
) -> float:
    """E|eps_k|^2 in closed form (the accuracy metric's numerator)."""
    betas = profile.as_array()
    beta_k = betas[k]
    sum_sq_others = float(np.sum(betas**2) - beta_k**2)
    factor = 1.0 if model_tag == RAYLEIGH else 6.0
    return factor * M * (M + 1) * beta_k**2 * sum_sq_others


def _epsilon_samples(
    G: np.ndarray, betas: np.ndarray, k: int
) -> np.ndarray:
    """eps_k for a batch of channel matrices, shape (n,)."""
    g = G[:, :, k]  # (n, M)
    cross = np.einsum("nm,nmj->nj", g.conj(), G)  # cross[n, j] = g_k^H g_j
    mags = np.abs(cross) ** 2
    gains = np.real(cross[:, k])  # g_k^H g_k = ||g_k||^2
    inter = np.sum(mags, axis=1) - gains**2
    sum_beta_others = float(np.sum(betas) - betas[k])
    return inter - sum_beta_others * gains


def varrho_monte_carlo(
    model_tag: str,
    M: int,
    K: int,
    profile: LargeScaleProfile,
    k: int,
    trials: int,
    rng: np.random.Generator,
    chunk_size: int = 4096,
) -> Tuple[float, float]:
    """Monte Carlo estimate of the accuracy metric with its standard error.

    Averages |eps_k|^2 over realizations and divides by the squared
    closed-form denominator (keeping the expectation inside the denominator
    avoids ratio-of-estimates bias). Reduction runs in fixed chunk order.
    """
    if trials < 1:
        raise ConfigurationError("trials must be >= 1")
    if K < 2 or profile.K != K:
        raise ConfigurationError("accuracy metric requires K >= 2 matching profile")
    denom = accuracy_denominator(model_tag, M, profile, k) ** 2
    betas = profile.as_array()
    total = 0.0
    total_sq = 0.0
    done = 0
    while done < trials:
        n = min(chunk_size, trials - done)
        G = gen_channel_batch(model_tag, M, profile, rng, n)
        ratio = np.abs(_epsilon_samples(G, betas, k)) ** 2 / denom
        total += float(np.sum(ratio))
        total_sq += float(np.sum(ratio**2))
        done += n
    mean = total / trials
    var = max(total_sq / trials - mean**2, 0.0)
    stderr = math.sqrt(var / trials)
    return mean, stderr


def normalized_mse(
    estimates: Iterable[Tuple[float, float]], mean_gain: float
) -> float:
    """Sample mean of |(a_k - truth) / mean_gain|^2."""
    pairs = list(estimates)
    if not pairs:
        raise ConfigurationError("normalized_mse needs at least one estimate")
    if mean_gain <= 0:
        raise ConfigurationError("mean_gain must be positive")
    errs = np.array([(a - truth) / mean_gain for a, truth in pairs])
    return float(np.mean(np.abs(errs) ** 2))


def pilot_lmmse_error_variance(
    model_tag: str, M: int, K: int, beta: float, alpha: float
) -> float:
    """Achievable error variance of the pilot-correlation LMMSE estimate.

    v - c^2 (alpha K^2 v + K) with v = Var||g||^2 and
    c = sqrt(alpha) K v / (alpha K^2 v + K).
    """
    v = moments(model_tag, M, beta).variance
    c = math.sqrt(alpha) * K * v / (alpha * K**2 * v + K)
    return v - c**2 * (alpha * K**2 * v + K)
