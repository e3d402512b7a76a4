"""k-variates seeding and its distributed, streaming and private variants."""

from ._kvariates import (
    KvariatesError,
    brute_force_optimum,
    dkmeans,
    dp_kvariates,
    epsilon_tilde,
    fit_log_model,
    gen_hyperrect,
    kmeanspp_seed,
    kvariates_seed,
    lr_bound_rhs,
    okmeans,
    potential,
    skmeans,
    spread_report,
)

__all__ = [
    "KvariatesError",
    "brute_force_optimum",
    "dkmeans",
    "dp_kvariates",
    "epsilon_tilde",
    "fit_log_model",
    "gen_hyperrect",
    "kmeanspp_seed",
    "kvariates_seed",
    "lr_bound_rhs",
    "okmeans",
    "potential",
    "skmeans",
    "spread_report",
]
