"""Conjugate beamforming with the long-term average-power normalization."""

from dataclasses import dataclass

import numpy as np

from .channel import ChannelRealization
from .errors import ConfigurationError
from .profile import LargeScaleProfile


@dataclass(frozen=True)
class PrecoderState:
    alpha: float  # normalization so that E||x||^2 = rho over channel and data
    rho: float  # total downlink power; equals SNR since noise variance is 1


def normalization_alpha(
    rho: float, M: int, profile: LargeScaleProfile
) -> PrecoderState:
    """alpha = rho / E[Tr(G G^H)] = rho / (M * sum_k beta_k).

    The expectation holds for both channel models since every small-scale
    entry has unit variance.
    """
    if rho <= 0:
        raise ConfigurationError("rho must be positive")
    if M < 1:
        raise ConfigurationError("antenna count M must be >= 1")
    alpha = rho / (M * profile.sum_all())
    return PrecoderState(alpha=alpha, rho=rho)


def precode(
    ch: ChannelRealization, s: np.ndarray, state: PrecoderState
) -> np.ndarray:
    """x = sqrt(alpha) G s; user k's desired coefficient is sqrt(alpha)||g_k||^2."""
    s = np.asarray(s)
    if s.shape != (ch.K,):
        raise ConfigurationError(
            f"symbol vector has shape {s.shape}, expected ({ch.K},)"
        )
    return np.sqrt(state.alpha) * (ch.G @ s)
