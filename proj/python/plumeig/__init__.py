from ._core import (
    AllMassLost,
    ConfigError,
    CostModel,
    Error,
    GridSpec,
    PlumeParams,
    SourcePosterior,
    cli,
    concentration,
    eig_exact,
    hpd_region,
    info_gain_bits,
    map_estimate,
    posterior_update,
    run_episode,
    score_map,
    select_next,
    snr_area_fraction,
    train,
)

__version__ = "0.1.0"
