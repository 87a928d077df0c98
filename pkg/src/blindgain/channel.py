"""Channel generation for i.i.d. Rayleigh and keyhole propagation.

Convention: CN(0,1) means independent real/imag parts, each N(0, 1/2), so a
unit-variance complex entry has E|h|^2 = 1.
"""

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import ConfigurationError
from .profile import LargeScaleProfile

RAYLEIGH = "rayleigh"
KEYHOLE = "keyhole"
MODELS = (RAYLEIGH, KEYHOLE)


@dataclass(frozen=True)
class ChannelRealization:
    G: np.ndarray  # M x K complex, column k is g_k = sqrt(beta_k) h_k
    model_tag: str
    keyhole_nu: Optional[np.ndarray] = None  # K complex scalars, keyhole only

    @property
    def M(self) -> int:
        return self.G.shape[0]

    @property
    def K(self) -> int:
        return self.G.shape[1]


def cn_matrix(rng: np.random.Generator, shape) -> np.ndarray:
    """Draw i.i.d. CN(0,1) entries of the given shape."""
    re = rng.standard_normal(shape)
    im = rng.standard_normal(shape)
    return (re + 1j * im) / np.sqrt(2.0)


def _check_dims(M: int, profile: LargeScaleProfile) -> None:
    if M < 1:
        raise ConfigurationError("antenna count M must be >= 1")
    if profile.K < 1:
        raise ConfigurationError("profile needs at least one user")


def gen_rayleigh(
    M: int, profile: LargeScaleProfile, rng: np.random.Generator
) -> ChannelRealization:
    """Draw G with columns g_k = sqrt(beta_k) h_k, h_k i.i.d. CN(0, I_M)."""
    _check_dims(M, profile)
    H = cn_matrix(rng, (M, profile.K))
    G = np.sqrt(profile.as_array())[None, :] * H
    return ChannelRealization(G=G, model_tag=RAYLEIGH)


def gen_keyhole(
    M: int,
    profile: LargeScaleProfile,
    rng: np.random.Generator,
    _force_nu: Optional[np.ndarray] = None,
) -> ChannelRealization:
    """Draw G with columns g_k = sqrt(beta_k) nu_k hbar_k (rank-one per user).

    `_force_nu` is a testing seam that pins the keyhole scalars (e.g. all ones
    to degenerate into a Rayleigh draw); it is not part of the public surface.
    """
    _check_dims(M, profile)
    nu = cn_matrix(rng, profile.K) if _force_nu is None else np.asarray(_force_nu)
    Hbar = cn_matrix(rng, (M, profile.K))
    G = np.sqrt(profile.as_array())[None, :] * nu[None, :] * Hbar
    return ChannelRealization(G=G, model_tag=KEYHOLE, keyhole_nu=nu)


def gen_channel(
    model_tag: str, M: int, profile: LargeScaleProfile, rng: np.random.Generator
) -> ChannelRealization:
    if model_tag == RAYLEIGH:
        return gen_rayleigh(M, profile, rng)
    if model_tag == KEYHOLE:
        return gen_keyhole(M, profile, rng)
    raise ConfigurationError(f"unknown channel model: {model_tag!r}")


def gen_channel_batch(
    model_tag: str,
    M: int,
    profile: LargeScaleProfile,
    rng: np.random.Generator,
    count: int,
) -> np.ndarray:
    """Vectorized draw of `count` channel matrices, shape (count, M, K).

    Used by Monte Carlo moment checks where per-trial substreams are not
    needed; a single stream with fixed draw order keeps it reproducible.
    """
    _check_dims(M, profile)
    if count < 1:
        raise ConfigurationError("count must be >= 1")
    scale = np.sqrt(profile.as_array())[None, None, :]
    if model_tag == RAYLEIGH:
        return scale * cn_matrix(rng, (count, M, profile.K))
    if model_tag == KEYHOLE:
        nu = cn_matrix(rng, (count, profile.K))
        return scale * nu[:, None, :] * cn_matrix(rng, (count, M, profile.K))
    raise ConfigurationError(f"unknown channel model: {model_tag!r}")


def effective_gain(ch: ChannelRealization, k: int) -> float:
    """True effective gain ||g_k||^2 for one realization."""
    if not 0 <= k < ch.K:
        raise IndexError(f"user index {k} out of range for K={ch.K}")
    col = ch.G[:, k]
    return float(np.sum(np.abs(col) ** 2))


def effective_gains(ch: ChannelRealization) -> np.ndarray:
    """||g_k||^2 for every user, length K."""
    return np.sum(np.abs(ch.G) ** 2, axis=0)
