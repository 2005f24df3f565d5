"""leakqec: leakage-aware bit-flip code simulation and analysis toolkit.

Subpackages cover the multi-level reset gate model (`reset_model`), the
stochastic code simulator with leakage levels (`code_sim`), detection-event
correlation analysis (`correlation`), matching-based decoding and error
suppression fits (`decoder`), leakage rate-equation fits (`leakage_fit`),
and config-driven experiment pipelines (`pipelines`, `cli`).
"""

__version__ = "0.1.0"

from .reset_model import (  # noqa: F401
    ResetPulseParams,
    ResetErrorBudget,
    paper_pulse_params,
    theta_tilde,
    time_of_x,
    trajectory,
    landau_zener_diabatic,
    hold_survival,
    reset_error_budget,
    error_landscape,
)
from .code_sim import (  # noqa: F401
    ChainLayout,
    NoiseParams,
    Schedule,
    SyndromeDataset,
    run_shot,
    run_experiment,
    sweep_leakage_growth,
    leakage_population_curve,
    save_dataset,
    load_dataset,
)
from .correlation import (  # noqa: F401
    DetectionMatrix,
    PijMatrix,
    detection_events,
    event_fraction,
    pij,
    pij_matrix,
    checkerboard_statistic,
)
from .decoder import (  # noqa: F401
    MatchingGraph,
    DecodeOutcome,
    LambdaFit,
    build_graph,
    mwpm,
    decode_dataset,
    logical_error_rate,
    eps_from_p_logical,
    p_logical_from_eps,
    subsample,
    lambda_fit,
)
from .leakage_fit import (  # noqa: F401
    LeakageRateFit,
    rate_model,
    fit_rates,
    fit_rates_constrained,
)
from .pipelines import PostselectionReport, postselect  # noqa: F401
from .defaults import calibrated_noise, reset_removal_from_pulse  # noqa: F401
