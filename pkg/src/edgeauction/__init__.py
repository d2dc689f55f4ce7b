"""Auction-based allocation of edge computing capacity to mobile miners."""

from .auction import (
    AuctionConfig,
    AuctionOutcome,
    SelectionDivergence,
    bidder_utility,
    compare_selection_rules,
    oracle_exhaustive,
    oracle_topk,
    run_auction,
    select_winners_greedy,
    vcg_payment,
    welfare_of_set,
    write_divergence_report,
)
from .calibration import (
    AlphaFit,
    HashPowerSample,
    fit_alpha,
    load_samples,
    predict_gamma,
)
from .experiments import (
    DEFAULT_GRIDS,
    GridMean,
    InstancePoint,
    RNG_FAMILY,
    SWEEPABLE_PARAMETERS,
    SweepSpec,
    default_sweep_spec,
    emit_results,
    generate_instance,
    run_sweep,
    stable_instance_seed,
    sweep_metadata,
)
from .model import (
    BidderProfile,
    BlockchainParams,
    MarketConfig,
    NetworkEffectParams,
    block_win_probability,
    ex_ante_valuation,
    ex_post_valuation,
    general_social_welfare,
    hash_power,
    network_effect,
    orphan_probability,
)

__version__ = "0.1.0"

__all__ = [
    "AlphaFit",
    "AuctionConfig",
    "AuctionOutcome",
    "BidderProfile",
    "BlockchainParams",
    "DEFAULT_GRIDS",
    "GridMean",
    "HashPowerSample",
    "InstancePoint",
    "MarketConfig",
    "NetworkEffectParams",
    "RNG_FAMILY",
    "SWEEPABLE_PARAMETERS",
    "SelectionDivergence",
    "SweepSpec",
    "bidder_utility",
    "block_win_probability",
    "compare_selection_rules",
    "default_sweep_spec",
    "emit_results",
    "ex_ante_valuation",
    "ex_post_valuation",
    "fit_alpha",
    "general_social_welfare",
    "generate_instance",
    "hash_power",
    "load_samples",
    "network_effect",
    "oracle_exhaustive",
    "oracle_topk",
    "orphan_probability",
    "predict_gamma",
    "run_auction",
    "run_sweep",
    "select_winners_greedy",
    "stable_instance_seed",
    "sweep_metadata",
    "vcg_payment",
    "welfare_of_set",
    "write_divergence_report",
]
