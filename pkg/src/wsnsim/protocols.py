"""Cluster-head election, cluster formation and per-round data exchange.

Event order inside one TDMA frame is fixed so runs are reproducible and
auditable against a straight-line event list:

1. members transmit one packet each to their head (ascending member id);
2. heads, ascending id: pay receive per delivered packet, then either
   aggregate + transmit one packet to the sink (LEACH/SEP, or gateway
   fallback), or forward (received + 1) raw packets to their gateway;
3. gateways process clusters in ascending head id: receive, aggregate,
   transmit one fused packet per cluster to the sink;
4. direct-to-sink nodes fuse their own sample and transmit it to the sink.

A sender must cover the full cost of a packet for it to be delivered;
a node that depletes mid-sequence spends its remaining energy and delivers
nothing further that round.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .config import ProtocolKind, SimConfig
from .energy import EnergyLedger
from .errors import ContractViolationError, InvalidParameterError
from .nodes import Network, NodeKind


def leach_threshold(in_g: bool, r: int, p: float) -> float:
    """Election threshold T for one node at round r.

    Nodes that already served as head this epoch (in_g false) get 0.
    The denominator shrinks over the epoch so the last eligible round
    elects every remaining candidate.
    """
    if not 0 < p < 1:
        raise InvalidParameterError("p must lie in (0, 1)")
    if not in_g:
        return 0.0
    epoch = int(round(1 / p))
    t = p / (1 - p * (r % epoch))
    return min(max(t, 0.0), 1.0)


def sep_probabilities(p: float, m: float, a: float) -> tuple[float, float]:
    """Per-class election probabilities for a two-level energy population.

    Weighted so that (1-m)*p_normal + m*p_advanced == p, i.e. the expected
    number of heads per round is unchanged by the heterogeneity.
    """
    if not 0 < p < 1:
        raise InvalidParameterError("p must lie in (0, 1)")
    if not 0 <= m <= 1:
        raise InvalidParameterError("m must lie in [0, 1]")
    if a < 0:
        raise InvalidParameterError("a must be non-negative")
    p_normal = p / (1 + a * m)
    p_advanced = p * (1 + a) / (1 + a * m)
    return p_normal, p_advanced


@dataclass
class ElectionState:
    """Round counter plus the per-class election probabilities."""

    round: int = 0
    p_normal: float = 0.1
    p_advanced: float = 0.1

    @classmethod
    def for_config(cls, config: SimConfig) -> "ElectionState":
        if config.protocol is ProtocolKind.SEP:
            p_n, p_a = sep_probabilities(config.p_select, config.sep_m, config.sep_a)
        else:
            p_n = p_a = config.p_select
        return cls(round=0, p_normal=p_n, p_advanced=p_a)

    def epoch_length(self, p: float) -> int:
        return max(1, int(round(1 / p)))


@dataclass
class ClusterTopology:
    """One round's clustering: heads, member assignment, gateway assignment."""

    heads: np.ndarray                                   # sorted ascending
    member_ids: np.ndarray
    member_head: np.ndarray                             # parallel to member_ids
    direct_ids: np.ndarray                              # transmit straight to sink
    gateway_of: dict[int, int] = field(default_factory=dict)
    member_d2: np.ndarray | None = None                 # squared member-head distances
    member_head_pos: np.ndarray | None = None           # index of each head in `heads`

    @property
    def membership(self) -> dict[int, int]:
        return {int(m): int(h) for m, h in zip(self.member_ids, self.member_head)}

    def members_of(self, head: int) -> np.ndarray:
        return self.member_ids[self.member_head == head]


def epoch_reset(net: Network, state: ElectionState) -> None:
    """Re-admit alive nodes into the candidate pool at their class's epoch start."""
    for kind, p in ((NodeKind.NORMAL, state.p_normal), (NodeKind.ADVANCED, state.p_advanced)):
        if state.round % state.epoch_length(p) == 0:
            net.in_g[net.alive & (net.kind == kind)] = True


def elect_cluster_heads(net: Network, state: ElectionState, kind: ProtocolKind, rng) -> np.ndarray:
    """Draw one uniform per node and elect candidates below their threshold.

    Consumes exactly net.n draws from `rng` every call, regardless of how
    many nodes are eligible, so the random stream layout is stable.
    Gateways are never candidates. Elected nodes leave the candidate pool.
    """
    u = rng.random(net.n)
    t_normal = leach_threshold(True, state.round, state.p_normal)
    candidates = net.alive & net.in_g & net.sensing
    if state.p_advanced == state.p_normal:
        elected = candidates & (u < t_normal)
    else:
        t_advanced = leach_threshold(True, state.round, state.p_advanced)
        threshold = np.where(net.is_advanced, t_advanced, t_normal)
        elected = candidates & (u < threshold)
    net.in_g[elected] = False
    return np.flatnonzero(elected)


def assign_members(net: Network, heads: np.ndarray) -> ClusterTopology:
    """Attach every alive sensing non-head to its nearest head.

    Ties go to the lowest head id. With no heads, all such nodes are
    flagged direct-to-sink instead.
    """
    empty = np.empty(0, dtype=np.int64)
    heads = np.sort(np.asarray(heads, dtype=np.int64))
    eligible = net.alive & net.sensing
    eligible[heads] = False
    ids = np.flatnonzero(eligible)
    if heads.size == 0:
        return ClusterTopology(heads=heads, member_ids=empty, member_head=empty,
                               direct_ids=ids)
    if net.d2_pair is not None:
        # row slice keeps each candidate row contiguous; argmin over axis 0
        # returns the first (lowest-id) head on ties, like the dense path
        drows = net.d2_pair[heads]
        nearest = np.argmin(drows, axis=0)[ids]
        member_d2 = drows.min(axis=0)[ids]
    else:
        dx = net.x[ids, None] - net.x[heads][None, :]
        dy = net.y[ids, None] - net.y[heads][None, :]
        d2 = dx * dx + dy * dy
        nearest = np.argmin(d2, axis=1)  # first minimum = lowest head id
        member_d2 = d2[np.arange(ids.size), nearest]
    return ClusterTopology(heads=heads, member_ids=ids, member_head=heads[nearest],
                           direct_ids=empty, member_d2=member_d2,
                           member_head_pos=nearest)


def assign_gateways(net: Network, heads: np.ndarray) -> dict[int, int]:
    """Map each head to its nearest alive gateway (ties to lowest gateway id).

    Empty when no gateway is alive; the steady-state phase then falls back
    to head-aggregates-and-sends-to-sink.
    """
    gateways = np.flatnonzero(net.alive & (net.kind == NodeKind.GATEWAY))
    if gateways.size == 0 or len(heads) == 0:
        return {}
    heads = np.asarray(heads, dtype=np.int64)
    if net.d2_pair is not None:
        d2 = net.d2_pair[np.ix_(heads, gateways)]
    else:
        dx = net.x[heads, None] - net.x[gateways][None, :]
        dy = net.y[heads, None] - net.y[gateways][None, :]
        d2 = dx * dx + dy * dy
    nearest = gateways[np.argmin(d2, axis=1)]
    return {int(h): int(g) for h, g in zip(heads, nearest)}


def _debit_vec(net: Network, ledger: EnergyLedger, ids: np.ndarray, cost: np.ndarray) -> None:
    """Vectorized debit with clamp-at-zero death, mirroring energy.debit."""
    before = net.energy[ids]
    remaining = before - cost
    if ids.size and remaining.min() > 0:
        # nobody dies: skip the clamp and death bookkeeping
        net.energy[ids] = remaining
        ledger.record_many(ids, cost)
        return
    dead = remaining <= 0
    net.energy[ids] = np.where(dead, 0.0, remaining)
    if dead.any():
        net.alive[ids[dead]] = False
    ledger.record_many(ids, np.minimum(cost, before))


def steady_state_round(kind: ProtocolKind, topo: ClusterTopology, net: Network,
                       config: SimConfig, ledger: EnergyLedger) -> int:
    """Run one TDMA frame of data transfer; returns fused packets at the sink."""
    radio = config.radio
    bits = config.packet_bits
    e_tx0 = radio.e_elec * bits          # electronics part of one packet
    e_rx = radio.e_elec * bits
    fs = radio.eps_fs * bits
    mp = radio.eps_mp * bits
    d0sq = radio.eps_fs / radio.eps_mp   # crossover distance squared
    e_agg = radio.e_da * bits            # per fused signal
    sx, sy = config.sink
    x, y = net.x, net.y

    def tx_cost(d2):
        return e_tx0 + np.where(d2 <= d0sq, fs * d2, mp * d2 * d2)

    heads = topo.heads
    if heads.size and not net.alive[heads].all():
        raise ContractViolationError("cluster head set contains a dead node")

    packets = 0
    n_recv = np.zeros(heads.size, dtype=np.int64)

    # phase 1: members transmit to their heads
    m = topo.member_ids
    if m.size:
        mh = topo.member_head
        if not net.alive[m].all():
            raise ContractViolationError("membership contains a dead node")
        d2 = topo.member_d2
        if d2 is None:
            d2 = (x[m] - x[mh]) ** 2 + (y[m] - y[mh]) ** 2
        cost = tx_cost(d2)
        delivered = cost <= net.energy[m]
        _debit_vec(net, ledger, m, cost)
        head_pos = topo.member_head_pos
        if head_pos is None:
            head_pos = np.searchsorted(heads, mh)
        n_recv = np.bincount(head_pos[delivered], minlength=heads.size)

    # phase 2: heads
    if heads.size:
        rx_total = e_rx * n_recv.astype(np.float64)
        if kind is ProtocolKind.GATEWAY and topo.gateway_of:
            gw = np.array([topo.gateway_of[int(h)] for h in heads], dtype=np.int64)
            d2g = (net.d2_pair[heads, gw] if net.d2_pair is not None
                   else (x[heads] - x[gw]) ** 2 + (y[heads] - y[gw]) ** 2)
            fwd_unit = tx_cost(d2g)
            n_out = n_recv + 1  # members' packets plus the head's own sample, raw
            total = rx_total + n_out * fwd_unit
            before = net.energy[heads]
            ok = total <= before
            n_fwd = np.where(ok, n_out, 0)
            for j in np.flatnonzero(~ok):
                # head depletes mid-sequence: receive first, then count how
                # many full forward packets the remainder covers
                budget = before[j] - rx_total[j]
                if budget > 0 and fwd_unit[j] > 0:
                    n_fwd[j] = min(int(n_out[j]), int(budget / fwd_unit[j]))
            _debit_vec(net, ledger, heads, total)
            packets += _gateway_phase(net, ledger, heads, gw, n_fwd,
                                      e_rx, e_agg, tx_cost, sx, sy)
        else:
            # LEACH/SEP head duty, also the no-alive-gateway fallback
            d2s = (net.d2_sink[heads] if net.d2_sink is not None
                   else (x[heads] - sx) ** 2 + (y[heads] - sy) ** 2)
            total = rx_total + e_agg * (n_recv + 1) + tx_cost(d2s)
            ok = total <= net.energy[heads]
            _debit_vec(net, ledger, heads, total)
            packets += int(ok.sum())

    # phase 4: direct-to-sink nodes fuse their own sample and transmit
    d = topo.direct_ids
    if d.size:
        d2s = (net.d2_sink[d] if net.d2_sink is not None
               else (x[d] - sx) ** 2 + (y[d] - sy) ** 2)
        cost = e_agg * 1 + tx_cost(d2s)
        ok = cost <= net.energy[d]
        _debit_vec(net, ledger, d, cost)
        packets += int(ok.sum())

    return packets


def _gateway_phase(net: Network, ledger: EnergyLedger, heads: np.ndarray,
                   gw: np.ndarray, n_fwd: np.ndarray, e_rx: float, e_agg: float,
                   tx_cost, sx: float, sy: float) -> int:
    """Phase 3: gateways receive, fuse and relay one packet per cluster."""
    d2s = (net.d2_sink[gw] if net.d2_sink is not None
           else (net.x[gw] - sx) ** 2 + (net.y[gw] - sy) ** 2)
    has_data = n_fwd > 0
    # per-cluster cost at the gateway; silent clusters cost nothing
    cluster_cost = np.where(has_data, e_rx * n_fwd + e_agg * n_fwd + tx_cost(d2s), 0.0)

    gw_unique, gw_pos = np.unique(gw, return_inverse=True)
    totals = np.bincount(gw_pos, weights=cluster_cost, minlength=gw_unique.size)
    before = net.energy[gw_unique]
    ok = totals <= before

    packets = int(np.count_nonzero(has_data & ok[gw_pos]))
    slow = np.flatnonzero(~ok)
    for k in slow:
        # gateway depletes partway: clusters are served in ascending head id
        # (heads is sorted, so cluster order here is already ascending)
        mask = gw_pos == k
        cum = np.cumsum(cluster_cost[mask])
        packets += int(np.count_nonzero((cum <= before[k]) & has_data[mask]))
    _debit_vec(net, ledger, gw_unique, totals)
    return packets
