"""Downlink transmission of one T-symbol coherence block."""

from dataclasses import dataclass

import numpy as np

from .channel import ChannelRealization, cn_matrix
from .errors import ConfigurationError
from .precoder import PrecoderState

_QAM4 = np.array([1 + 1j, 1 - 1j, -1 + 1j, -1 - 1j]) / np.sqrt(2.0)


@dataclass(frozen=True)
class TransmissionBlock:
    T: int
    symbols: np.ndarray  # K x T, unit-modulus 4-QAM
    received: np.ndarray  # K x T, y_k(n)
    noise_variance: float = 1.0


def draw_symbols(K: int, T: int, rng: np.random.Generator) -> np.ndarray:
    """i.i.d. uniform 4-QAM, entries (+-1 +-1j)/sqrt(2), shape K x T."""
    if K < 1 or T < 1:
        raise ConfigurationError("K and T must be >= 1")
    return _QAM4[rng.integers(0, 4, size=(K, T))]


def received_matrix(
    ch: ChannelRealization,
    state: PrecoderState,
    symbols: np.ndarray,
    noise: np.ndarray,
) -> np.ndarray:
    """y[k, n] = g_k^H x(n) + noise[k, n] with x(n) = sqrt(alpha) G s(n)."""
    if symbols.shape[0] != ch.K or noise.shape != symbols.shape:
        raise ConfigurationError("symbol/noise shape mismatch")
    C = ch.G.conj().T @ ch.G  # C[k, k'] = g_k^H g_k'
    return np.sqrt(state.alpha) * (C @ symbols) + noise


def run_block(
    ch: ChannelRealization,
    state: PrecoderState,
    T: int,
    rng: np.random.Generator,
) -> TransmissionBlock:
    """Simulate T symbol times over a fixed G with fresh CN(0,1) noise."""
    symbols = draw_symbols(ch.K, T, rng)
    noise = cn_matrix(rng, (ch.K, T))
    received = received_matrix(ch, state, symbols, noise)
    return TransmissionBlock(T=T, symbols=symbols, received=received)


def sample_power(block: TransmissionBlock, k: int) -> float:
    """xi_k = (1/T) sum_n |y_k(n)|^2."""
    if not 0 <= k < block.received.shape[0]:
        raise IndexError(f"user index {k} out of range")
    return float(np.mean(np.abs(block.received[k]) ** 2))
