"""Effective-gain estimators: blind (quadratic root of the sample power),
statistical mean, downlink-pilot LMMSE baseline, and the genie truth."""

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import analysis
from .channel import ChannelRealization, cn_matrix, effective_gain
from .errors import ConfigurationError
from .precoder import PrecoderState
from .profile import LargeScaleProfile

BLIND = "blind"
STATISTICAL = "statistical"
PILOT_LMMSE = "pilot_lmmse"
GENIE = "genie"
METHODS = (BLIND, STATISTICAL, PILOT_LMMSE, GENIE)


@dataclass(frozen=True)
class EstimateReport:
    method: str
    a_k: float
    truth: float
    xi_k: Optional[float] = None  # sample power, blind only
    clamped: bool = False


def blind_estimate(xi_k: float, alpha: float, sum_beta_others: float) -> float:
    """Positive root of xi = alpha a^2 + alpha*sum_beta_others*a + 1.

    For xi < 1 (possible through sampling noise in xi) the root would be
    negative or complex; the estimate is clamped to 0 since the true gain is
    nonnegative.
    """
    if alpha <= 0:
        raise ConfigurationError("alpha must be positive")
    if sum_beta_others < 0:
        raise ConfigurationError("sum of other users' betas cannot be negative")
    if xi_k < 1.0:
        return 0.0
    excess = xi_k - 1.0
    if excess == 0.0:
        return 0.0
    b = alpha * sum_beta_others
    # rationalized form of (-b + sqrt(b^2 + 4 alpha excess)) / (2 alpha);
    # avoids cancellation when b^2 dominates the discriminant
    return 2.0 * excess / (b + math.sqrt(b * b + 4.0 * alpha * excess))


def statistical_estimate(M: int, beta_k: float) -> float:
    """Mean effective gain M * beta_k (same for both channel models)."""
    if M < 1 or beta_k <= 0:
        raise ConfigurationError("need M >= 1 and beta_k > 0")
    return M * beta_k


def pilot_matrix(K: int) -> np.ndarray:
    """K x K DFT pilot matrix: orthogonal rows, each with energy K."""
    n = np.arange(K)
    return np.exp(-2j * np.pi * np.outer(n, n) / K)


def pilot_correlation(
    ch: ChannelRealization,
    state: PrecoderState,
    k: int,
    rng: np.random.Generator,
    noise_scale: float = 1.0,
) -> complex:
    """Correlate user k's received training samples with its own sequence.

    The base station beamforms the K pilot columns over K symbol times; by
    row orthogonality the cross-user terms cancel exactly and
    r_k = sqrt(alpha) * K * ||g_k||^2 + n_tilde with n_tilde ~ CN(0, K).
    """
    K = ch.K
    phi = pilot_matrix(K)
    # y_k over the K training symbols: g_k^H (sqrt(alpha) G phi) + noise
    y = np.sqrt(state.alpha) * (ch.G[:, k].conj() @ ch.G @ phi)
    y = y + noise_scale * cn_matrix(rng, K)
    return complex(np.sum(phi[k].conj() * y))


def lmmse_from_correlation(
    r: complex,
    alpha: float,
    K: int,
    mu: float,
    prior_variance: float,
    noise_power: float = 1.0,
) -> complex:
    """Linear MMSE update mu + c (r - sqrt(alpha) K mu) on the correlator output.

    c = sqrt(alpha) K v / (alpha K^2 v + K * noise_power); with noise_power = 0
    this degenerates to exact inversion, with v = 0 to the prior mean.
    """
    if prior_variance < 0:
        raise ConfigurationError("prior variance cannot be negative")
    sa = math.sqrt(alpha)
    denom = alpha * K**2 * prior_variance + K * noise_power
    if denom == 0:
        return complex(mu)
    c = sa * K * prior_variance / denom
    return mu + c * (r - sa * K * mu)


def pilot_lmmse_estimate(
    ch: ChannelRealization,
    state: PrecoderState,
    profile: LargeScaleProfile,
    k: int,
    rng: np.random.Generator,
    noise_scale: float = 1.0,
    _force_prior_variance: Optional[float] = None,
) -> float:
    """Estimate ||g_k||^2 from a K-symbol beamformed training phase.

    The prior variance is the model-matched Var||g_k||^2; `_force_prior_variance`
    is a testing seam (0 gives the prior-only estimate M beta_k). The real part
    of the LMMSE output is returned, clamped at 0.
    """
    beta_k = profile.betas[k]
    if _force_prior_variance is not None:
        v = _force_prior_variance
    else:
        v = analysis.moments(ch.model_tag, ch.M, beta_k).variance
    r = pilot_correlation(ch, state, k, rng, noise_scale=noise_scale)
    mu = statistical_estimate(ch.M, beta_k)
    a = lmmse_from_correlation(
        r, state.alpha, ch.K, mu, v, noise_power=noise_scale**2
    )
    return max(0.0, a.real)


def genie_estimate(ch: ChannelRealization, k: int) -> float:
    """Truth channel gain, for MSE denominators and sanity checks."""
    return effective_gain(ch, k)
