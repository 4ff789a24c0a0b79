"""Fading numbers and nonasymptotic capacity bounds for noncoherent fading relay channels."""

from .capacity_bounds import (
    BoundId,
    BoundPoint,
    BoundSweep,
    beam_select_objective,
    c_iid_upper,
    c_iid_upper_objective,
    df_lower,
    df_lower_objective,
    miso_beam_select_lower,
    relay_miso_upper,
)
from .errors import (
    BudgetExceededError,
    ConfigError,
    DomainError,
    EmbeddingError,
    FadingRelayError,
    IllConditionedError,
    InfeasibleTargetError,
    InsufficientDataError,
    PreconditionError,
    QuadratureError,
    SearchError,
    SpecialFunctionOverflow,
)
from .fading_number import (
    FadingNumberReport,
    Regime,
    classify_regime,
    df_one_bit_form,
    optimal_df_alpha,
    p2p_fading_number,
    relay_lower_bound_df,
    relay_upper_bound,
)
from .qpsk_mi import McConfig, McEstimate, df_qpsk_lower, miso_qpsk_lower, qpsk_mixture_mi
from .scenarios import builtin_scenario, load_scenario
from .search import Direction, Scale, SearchConfig, SearchResult, optimize_box
from .simlab import SimRun, empirical_prediction_error, generate_fading_path, qpsk_mi_quadrature
from .spectral import (
    ChannelScenario,
    SpectralModel,
    SpectrumKind,
    autocovariance,
    finite_memory_prediction_error,
    make_piecewise,
    noisy_prediction_error,
    prediction_error,
)

__version__ = "0.1.0"
