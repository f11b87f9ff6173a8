"""Unipolar OFDM toolkit for the discrete-time Gaussian optical intensity channel.

Closed-form achievable information rates of ten unipolar OFDM schemes under an
average optical power constraint, optimizers for their free parameters, and a
Monte Carlo signal-chain simulator that validates the analytic predictions.
"""

from uofdm.core import (
    ChannelSpec,
    ParameterError,
    Rate,
    SchemeConfig,
    TruncGauss,
    erf,
    erfc,
    snr_db_to_channel,
    tg_mean,
)
from uofdm.clipstats import (
    ClipMoments,
    ado_dco_distortion,
    asymmetric_clip_stats,
    symmetric_clip_moments,
)
from uofdm.rates import (
    RateBreakdown,
    asymptotic_constants,
    capacity_bounds,
    equal_allocation,
    geometric_allocation,
    rate_aco_family,
    rate_ado,
    rate_dco,
    rate_dco_finite_n,
    rate_haco,
    rate_multi,
    scheme_rate,
)
from uofdm.optim import (
    NotFoundError,
    OptResult,
    find_crossover,
    find_lambda_jump,
    optimize_ado,
    optimize_dco,
    optimize_double_lambda,
    optimize_multi,
    optimize_scheme,
)
from uofdm.sim import (
    Frame,
    MomentEstimate,
    SimParams,
    SpectrumBlock,
    check_autocorrelation,
    demodulate_single,
    estimate_moments,
    genie_sic_demodulate,
    modulate,
    unitary_dft,
    unitary_idft,
    validation_report,
)

__version__ = "0.1.0"
