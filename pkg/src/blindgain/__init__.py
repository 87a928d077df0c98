"""Monte Carlo simulator and estimators for the massive-MIMO TDD downlink
effective channel gain under conjugate beamforming."""

from .analysis import (
    Moments,
    accuracy_denominator,
    epsilon_k,
    epsilon_second_moment,
    exact_power,
    interference_power,
    moments,
    normalized_mse,
    varrho_closed_form,
    varrho_monte_carlo,
)
from .channel import (
    KEYHOLE,
    RAYLEIGH,
    ChannelRealization,
    effective_gain,
    effective_gains,
    gen_channel,
    gen_channel_batch,
    gen_keyhole,
    gen_rayleigh,
)
from .errors import ConfigurationError
from .estimators import (
    BLIND,
    GENIE,
    PILOT_LMMSE,
    STATISTICAL,
    EstimateReport,
    blind_estimate,
    genie_estimate,
    pilot_lmmse_estimate,
    statistical_estimate,
)
from .harness import (
    INFINITE,
    ResultRow,
    ResultsTable,
    SystemConfig,
    export_csv,
    export_json,
    run_experiment,
)
from .linksim import TransmissionBlock, draw_symbols, run_block, sample_power
from .precoder import PrecoderState, normalization_alpha, precode
from .profile import LargeScaleProfile
from .rng import substream

__version__ = "0.1.0"
