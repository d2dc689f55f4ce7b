"""Winner selection and pricing for renting edge capacity to miners.

Each bidder asks for one resource unit, so an outcome is just a winner set
W. Its welfare, written in terms of the submitted bids, is

    S(W) = (1/|W|) w(|W|) sum_{i in W} b_i - c |W|,     S(empty) = 0,

with w the network-effect curve from the model module. Selection walks the
bids in descending order and admits candidates while welfare strictly
improves; payments charge each winner the externality it imposes, computed
from a counterfactual run without that winner.

Two independent oracles are provided for cross-checking the greedy rule:
an exact scan over top-k prefixes and an exhaustive subset enumeration
(the latter also evaluates rosters with non-unit demands).
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .model import (
    BidderProfile,
    MarketConfig,
    NetworkEffectParams,
    network_effect,
)

__all__ = [
    "AuctionConfig",
    "AuctionOutcome",
    "SelectionDivergence",
    "WinnerSet",
    "welfare_of_set",
    "select_winners_greedy",
    "vcg_payment",
    "run_auction",
    "oracle_topk",
    "oracle_exhaustive",
    "bidder_utility",
    "compare_selection_rules",
    "write_divergence_report",
]

# Positions (or roster ids) of the winners, in admission order.
WinnerSet = tuple[int, ...]

# Payments this close to zero from below are rounding residue and clamp to
# zero; anything more negative indicates a bug and is refused loudly.
_PAYMENT_TOLERANCE = 1e-9

_MAX_EXHAUSTIVE_BIDDERS = 20


@dataclass(frozen=True)
class AuctionConfig:
    market: MarketConfig
    network: NetworkEffectParams

    def __post_init__(self) -> None:
        if not isinstance(self.market, MarketConfig):
            raise ValueError("market must be a MarketConfig")
        if not isinstance(self.network, NetworkEffectParams):
            raise ValueError("network must be a NetworkEffectParams")


@dataclass(frozen=True)
class AuctionOutcome:
    """Everything the provider publishes after clearing one auction."""

    ids: tuple[int, ...]          # bidder ids, in submission order
    allocation: tuple[int, ...]   # x_i in {0, 1}, aligned with ids
    payments: tuple[float, ...]   # p_i >= 0, aligned with ids; losers pay 0
    winners: WinnerSet            # winner ids in admission order
    welfare: float


@dataclass(frozen=True)
class SelectionDivergence:
    """Record of one instance where the greedy rule missed the top-k optimum."""

    bids: tuple[float, ...]
    capacity: int
    greedy_winner_count: int
    greedy_welfare: float
    topk_winner_count: int
    topk_welfare: float


def _validate_bids(bids: Sequence[float]) -> list[float]:
    out = []
    for b in bids:
        fb = float(b)
        if not np.isfinite(fb):
            raise ValueError("bids must be finite")
        if fb < 0:
            raise ValueError("bids must be >= 0")
        out.append(fb)
    return out


def welfare_of_set(bids_in_w: Iterable[float], config: AuctionConfig) -> float:
    """Welfare of a winner set, given the bids of its members.

    Returns exactly 0.0 for the empty set.
    """
    bids = _validate_bids(list(bids_in_w))
    k = len(bids)
    if k == 0:
        return 0.0
    w = network_effect(float(k), config.network)
    return (1.0 / k) * w * sum(bids) - config.market.unit_cost * k


def _descending_order(bids: np.ndarray) -> np.ndarray:
    # Stable sort keeps submission order among equal bids.
    return np.argsort(-bids, kind="stable")


def _prefix_welfare(prefix_sums: np.ndarray, limit: int, config: AuctionConfig) -> np.ndarray:
    """Welfare of the top-k prefix for k = 1..limit, from cumulative bid sums."""
    kk = np.arange(1, limit + 1, dtype=float)
    u = np.exp(-config.network.nu * kk)
    w = (1.0 - u) / (1.0 + config.network.mu * u)
    return (w / kk) * prefix_sums[1 : limit + 1] - config.market.unit_cost * kk


def _first_decrease_stop(welfare_by_k: np.ndarray) -> int:
    """Number of candidates admitted before welfare first fails to improve."""
    gains = np.diff(np.concatenate(([0.0], welfare_by_k)))
    blocked = np.flatnonzero(gains <= 0.0)
    return int(blocked[0]) if blocked.size else int(welfare_by_k.size)


def select_winners_greedy(bids: Sequence[float], config: AuctionConfig) -> WinnerSet:
    """Admit bidders in descending-bid order while welfare strictly improves.

    Ties between equal bids are broken toward the earlier position. Admission
    also stops when all bidders are in or when capacity is reached. A
    candidate whose inclusion leaves welfare unchanged is rejected. Returns
    positions into the bid vector, in admission order.
    """
    values = np.asarray(_validate_bids(bids), dtype=float)
    n = values.size
    if n == 0:
        return ()
    order = _descending_order(values)
    prefix = np.concatenate(([0.0], np.cumsum(values[order])))
    limit = min(n, config.market.capacity)
    welfare_by_k = _prefix_welfare(prefix, limit, config)
    m = _first_decrease_stop(welfare_by_k)
    return tuple(int(i) for i in order[:m])


def _roster_bids(roster: Sequence[BidderProfile]) -> dict[int, float]:
    by_id: dict[int, float] = {}
    for p in roster:
        if p.id in by_id:
            raise ValueError(f"duplicate bidder id {p.id}")
        by_id[p.id] = p.bid
    return by_id


def vcg_payment(
    winner_id: int,
    roster: Sequence[BidderProfile],
    winners: WinnerSet,
    config: AuctionConfig,
) -> float:
    """Payment of one winner: welfare the others lose by its presence.

    Re-runs greedy selection on the roster without the winner to get the
    counterfactual welfare, then subtracts the welfare of the remaining
    winners evaluated as a set of their own.
    """
    by_id = _roster_bids(roster)
    if winner_id not in by_id:
        raise ValueError(f"unknown bidder id {winner_id}")
    if winner_id not in winners:
        raise ValueError(f"bidder {winner_id} is not a winner")
    rest = [p for p in roster if p.id != winner_id]
    counterfactual = select_winners_greedy([p.bid for p in rest], config)
    s_prime = welfare_of_set([rest[i].bid for i in counterfactual], config)
    remaining = [by_id[i] for i in winners if i != winner_id]
    return _clamp_payment(s_prime - welfare_of_set(remaining, config))


def _clamp_payment(p: float) -> float:
    if p < -_PAYMENT_TOLERANCE:
        raise RuntimeError(
            f"internal consistency failure: payment {p} is negative beyond tolerance"
        )
    return 0.0 if p < 0.0 else p


def run_auction(roster: Sequence[BidderProfile], config: AuctionConfig) -> AuctionOutcome:
    """Clear one auction: select winners, price every winner, assemble the outcome.

    Only unit demands are supported; the selection and pricing rules are not
    defined for divisible requests. Payments reuse one global descending
    sort plus prefix sums, which matches a literal re-run of the selection
    for every winner but costs O(n) per winner instead of O(n log n).
    """
    ids = tuple(p.id for p in roster)
    if len(set(ids)) != len(ids):
        raise ValueError("duplicate bidder ids in roster")
    for p in roster:
        if p.demand != 1.0:
            raise ValueError(
                f"bidder {p.id} demands {p.demand} units; the auction requires unit demands"
            )
    n = len(roster)
    if n == 0:
        return AuctionOutcome(ids=(), allocation=(), payments=(), winners=(), welfare=0.0)

    values = np.asarray(_validate_bids([p.bid for p in roster]), dtype=float)
    order = _descending_order(values)
    sorted_bids = values[order]
    prefix = np.concatenate(([0.0], np.cumsum(sorted_bids)))
    capacity = config.market.capacity
    cost = config.market.unit_cost

    limit = min(n, capacity)
    welfare_by_k = _prefix_welfare(prefix, limit, config)
    m = _first_decrease_stop(welfare_by_k)
    welfare = float(welfare_by_k[m - 1]) if m > 0 else 0.0

    payments = [0.0] * n
    if m > 0:
        # Welfare of the top-k prefix of the roster with one winner removed:
        # below the winner's rank the prefix is unchanged, at and above it
        # the next bid slides in, so only cumulative sums are needed.
        limit2 = min(n - 1, capacity)
        kk = np.arange(1, limit2 + 1)
        u = np.exp(-config.network.nu * kk.astype(float))
        w_by_k = (1.0 - u) / (1.0 + config.network.mu * u)
        sum_winners = float(prefix[m])
        q = m - 1
        w_q = network_effect(float(q), config.network) if q > 0 else 0.0
        for t in range(m):
            bid_j = float(sorted_bids[t])
            sums = np.where(kk <= t, prefix[1 : limit2 + 1], prefix[2 : limit2 + 2] - bid_j)
            s2 = (w_by_k / kk) * sums - cost * kk
            m2 = _first_decrease_stop(s2)
            s_prime = float(s2[m2 - 1]) if m2 > 0 else 0.0
            if q > 0:
                others = (1.0 / q) * w_q * (sum_winners - bid_j) - cost * q
            else:
                others = 0.0
            payments[int(order[t])] = _clamp_payment(s_prime - others)

    winner_positions = [int(i) for i in order[:m]]
    winner_lookup = set(winner_positions)
    allocation = tuple(1 if i in winner_lookup else 0 for i in range(n))
    winners = tuple(ids[i] for i in winner_positions)

    check = welfare_of_set([values[i] for i in winner_positions], config)
    if abs(check - welfare) > 1e-9:
        raise RuntimeError("internal consistency failure: welfare mismatch")

    return AuctionOutcome(
        ids=ids,
        allocation=allocation,
        payments=tuple(payments),
        winners=winners,
        welfare=welfare,
    )


def oracle_topk(bids: Sequence[float], config: AuctionConfig) -> tuple[WinnerSet, float]:
    """Exact optimum over top-k prefixes, scanning every feasible k.

    Ties prefer the smaller k. Independent of the greedy path: evaluates
    welfare_of_set from scratch for each k.
    """
    values = _validate_bids(bids)
    n = len(values)
    order = sorted(range(n), key=lambda i: (-values[i], i))
    best_k = 0
    best = 0.0
    for k in range(1, min(n, config.market.capacity) + 1):
        s = welfare_of_set([values[i] for i in order[:k]], config)
        if s > best:
            best, best_k = s, k
    return tuple(order[:best_k]), best


def oracle_exhaustive(
    roster: Sequence[BidderProfile], config: AuctionConfig
) -> tuple[tuple[int, ...], float]:
    """Brute-force welfare maximum over every subset of the roster.

    Evaluates the bid-valued objective

        (sum_{i in W} d_i^alpha b_i / sum_{i in W} d_i^alpha) w(sum d_i) - c sum d_i

    which reduces to welfare_of_set when all demands are 1, and enumerates
    rosters with arbitrary demands as well. Subsets whose total demand
    exceeds capacity are infeasible. Ties are broken toward the
    lexicographically smallest sorted id list; the empty set attains 0.
    Refuses rosters with more than 20 bidders.
    """
    n = len(roster)
    if n > _MAX_EXHAUSTIVE_BIDDERS:
        raise ValueError(
            f"exhaustive enumeration over {n} bidders refused (limit {_MAX_EXHAUSTIVE_BIDDERS})"
        )
    ids = [p.id for p in roster]
    if len(set(ids)) != n:
        raise ValueError("duplicate bidder ids in roster")
    if n == 0:
        return (), 0.0

    demands = np.array([p.demand for p in roster], dtype=float)
    bids = np.asarray(_validate_bids([p.bid for p in roster]), dtype=float)
    weights = demands ** config.market.hash_exponent

    size = 1 << n
    demand_sum = np.zeros(size)
    weight_sum = np.zeros(size)
    value_sum = np.zeros(size)
    for i in range(n):
        lo = 1 << i
        demand_sum[lo : 2 * lo] = demand_sum[:lo] + demands[i]
        weight_sum[lo : 2 * lo] = weight_sum[:lo] + weights[i]
        value_sum[lo : 2 * lo] = value_sum[:lo] + weights[i] * bids[i]

    u = np.exp(-config.network.nu * demand_sum)
    w = (1.0 - u) / (1.0 + config.network.mu * u)
    with np.errstate(invalid="ignore", divide="ignore"):
        welfare = (value_sum / weight_sum) * w - config.market.unit_cost * demand_sum
    welfare[0] = 0.0
    welfare[demand_sum > config.market.capacity] = -np.inf

    best = float(welfare.max())
    if best <= 0.0:
        return tuple(0 for _ in range(n)), 0.0

    candidates = np.flatnonzero(welfare == best)

    def id_key(mask: int) -> tuple[int, ...]:
        return tuple(sorted(ids[i] for i in range(n) if mask >> i & 1))

    chosen = min((int(mask) for mask in candidates), key=id_key)
    allocation = tuple(1 if chosen >> i & 1 else 0 for i in range(n))
    return allocation, best


def bidder_utility(
    bidder_id: int, true_value: float, outcome: AuctionOutcome, config: AuctionConfig
) -> float:
    """Quasi-linear utility: realized value share minus payment; losers get 0."""
    if bidder_id not in outcome.ids:
        raise ValueError(f"unknown bidder id {bidder_id}")
    idx = outcome.ids.index(bidder_id)
    if outcome.allocation[idx] == 0:
        return 0.0
    k = len(outcome.winners)
    share = (1.0 / k) * network_effect(float(k), config.network)
    return share * true_value - outcome.payments[idx]


def compare_selection_rules(
    bids: Sequence[float], config: AuctionConfig, tolerance: float = 1e-9
) -> SelectionDivergence | None:
    """Check the greedy stopping rule against the exact top-k scan.

    The first-decrease stop can underperform the scan when the prefix
    welfare dips before rising again, which happens for strongly S-shaped
    network curves. Returns None on agreement, else a full record of the
    instance so it can be logged instead of silently dropped.
    """
    greedy = select_winners_greedy(bids, config)
    greedy_welfare = welfare_of_set([bids[i] for i in greedy], config)
    topk, topk_welfare = oracle_topk(bids, config)
    if abs(greedy_welfare - topk_welfare) <= tolerance:
        return None
    return SelectionDivergence(
        bids=tuple(float(b) for b in bids),
        capacity=config.market.capacity,
        greedy_winner_count=len(greedy),
        greedy_welfare=greedy_welfare,
        topk_winner_count=len(topk),
        topk_welfare=topk_welfare,
    )


def write_divergence_report(
    records: Sequence[SelectionDivergence], path: str | Path
) -> Path:
    """Dump divergence records to a JSON file and return its path."""
    target = Path(path)
    target.parent.mkdir(parents=True, exist_ok=True)
    payload = [asdict(r) for r in records]
    target.write_text(json.dumps(payload, indent=2) + "\n")
    return target
