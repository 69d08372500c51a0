"""Deployment, round loop and lifetime metrics.

One round = epoch bookkeeping, election, member assignment, gateway
assignment (GATEWAY protocol only), then `frames_per_round` steady-state
TDMA frames. A run is a pure function of its SimConfig, seed included.

Random stream layout (numpy PCG64 via default_rng): deployment draws
`rng.random((n_nodes, 2))` for normal positions, then
`rng.random((n_gateways, 2))` for random gateway placement; every round
draws exactly `rng.random(n_total)` election uniforms. Nothing else
consumes randomness.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .config import GatewayPlacement, ProtocolKind, SimConfig
from .energy import EnergyLedger
from .errors import ContractViolationError, InvalidParameterError
from .nodes import Network, NodeKind, Role
from . import protocols

RNG_ALGORITHM = "numpy.random PCG64 (default_rng)"


@dataclass(slots=True)
class RoundMetrics:
    round: int
    alive_normal: int
    alive_high: int
    alive_sensing: int
    heads_count: int
    clusters_count: int       # heads with at least one member
    energy_remaining_total: float
    packets_to_sink: int


@dataclass
class SimResult:
    """Lifetime summary plus the full per-round series of one run."""

    fnd: int | None
    hnd: int | None
    lnd: int | None
    series: list[RoundMetrics]
    config_echo: SimConfig
    total_energy_spent: float
    per_node_spent: np.ndarray
    terminated_early: bool    # all sensing nodes died before max_rounds
    rng_algorithm: str = RNG_ALGORITHM

    @property
    def rounds_executed(self) -> int:
        return len(self.series)


def init_deployment(config: SimConfig, rng) -> Network:
    """Place n_nodes sensing nodes uniformly, then the high-energy nodes.

    Ids run 0..n_nodes-1 for normals, then the high-energy nodes. Under
    the GATEWAY protocol the high-energy nodes are pure relays; otherwise
    they are deployed as sensing nodes (SEP's advanced class) so total
    deployed energy is identical across protocols.
    """
    w, h = config.area
    scale = np.array([w, h])
    pos_n = rng.random((config.n_nodes, 2)) * scale
    if config.n_gateways > 0:
        if config.gateway_placement is GatewayPlacement.RANDOM:
            pos_g = rng.random((config.n_gateways, 2)) * scale
        else:
            pos_g = _grid_positions(config.n_gateways, w, h)
    else:
        pos_g = np.empty((0, 2))

    high_kind = (NodeKind.GATEWAY if config.protocol is ProtocolKind.GATEWAY
                 else NodeKind.ADVANCED)
    kind = np.concatenate([
        np.full(config.n_nodes, NodeKind.NORMAL, dtype=np.int8),
        np.full(config.n_gateways, high_kind, dtype=np.int8),
    ])
    energy = np.concatenate([
        np.full(config.n_nodes, config.e0_normal),
        np.full(config.n_gateways, config.e0_high),
    ])
    xy = np.concatenate([pos_n, pos_g])
    return Network(xy[:, 0], xy[:, 1], kind, energy)


def _grid_positions(count: int, w: float, h: float) -> np.ndarray:
    """Evenly spaced lattice cell centers, row-major, for GRID placement."""
    cols = math.ceil(math.sqrt(count))
    rows = math.ceil(count / cols)
    pts = []
    for j in range(rows):
        for i in range(cols):
            if len(pts) == count:
                break
            pts.append(((i + 0.5) * w / cols, (j + 0.5) * h / rows))
    return np.array(pts)


def lifetime_metrics(series: list[RoundMetrics], deployed: int):
    """First/half/last node death rounds from the alive-sensing series."""
    if not series:
        raise InvalidParameterError("series must be non-empty")
    fnd = hnd = lnd = None
    prev = None
    for m in series:
        alive = m.alive_sensing
        if prev is not None and alive > prev:
            raise ContractViolationError("alive counts must be non-increasing")
        prev = alive
        if fnd is None and alive < deployed:
            fnd = m.round
        if hnd is None and alive <= deployed / 2:
            hnd = m.round
        if lnd is None and alive == 0:
            lnd = m.round
    return fnd, hnd, lnd


def run(config: SimConfig) -> SimResult:
    """Execute one seeded run to completion."""
    rng = np.random.default_rng(config.seed)
    net = init_deployment(config, rng)
    sx, sy = config.sink
    net.d2_sink = (net.x - sx) ** 2 + (net.y - sy) ** 2
    # positions never change, so pairwise distances are computed once
    net.d2_pair = ((net.x[:, None] - net.x[None, :]) ** 2
                   + (net.y[:, None] - net.y[None, :]) ** 2)
    ledger = EnergyLedger(net.n)
    state = protocols.ElectionState.for_config(config)
    kind = config.protocol
    is_gateway = kind is ProtocolKind.GATEWAY
    deployed_sensing = config.n_nodes + (0 if is_gateway else config.n_gateways)

    normal_mask = net.kind == NodeKind.NORMAL
    high_mask = net.kind != NodeKind.NORMAL
    sensing_mask = net.sensing

    def alive_counts():
        alive = net.alive
        return (int(np.count_nonzero(alive & normal_mask)),
                int(np.count_nonzero(alive & high_mask)),
                int(np.count_nonzero(alive & sensing_mask)))

    # per-kind counts only change when somebody dies, so key them on the
    # total alive count instead of recomputing three masked counts per round
    n_alive = int(np.count_nonzero(net.alive))
    counts = alive_counts()

    series: list[RoundMetrics] = []
    terminated_early = False
    for r in range(config.max_rounds):
        state.round = r
        protocols.epoch_reset(net, state)
        if config.setup_cost_joules > 0:
            alive_ids = np.flatnonzero(net.alive)
            protocols._debit_vec(net, ledger, alive_ids,
                                 np.full(alive_ids.size, config.setup_cost_joules))

        heads = protocols.elect_cluster_heads(net, state, kind, rng)
        topo = protocols.assign_members(net, heads)
        if is_gateway:
            topo.gateway_of = protocols.assign_gateways(net, heads)

        net.role[:] = Role.NONE
        net.role[topo.heads] = Role.HEAD
        net.role[topo.member_ids] = Role.MEMBER
        net.role[topo.direct_ids] = Role.DIRECT_TO_SINK
        if is_gateway:
            net.role[net.alive & (net.kind == NodeKind.GATEWAY)] = Role.GATEWAY_RELAY

        packets = 0
        for _ in range(config.frames_per_round):
            packets += protocols.steady_state_round(kind, topo, net, config, ledger)

        now_alive = int(np.count_nonzero(net.alive))
        if now_alive != n_alive:
            n_alive = now_alive
            counts = alive_counts()
        n_clusters = 0
        if topo.heads.size and topo.member_ids.size:
            occupied = np.bincount(topo.member_head_pos, minlength=topo.heads.size)
            n_clusters = int(np.count_nonzero(occupied))
        series.append(RoundMetrics(
            round=r,
            alive_normal=counts[0],
            alive_high=counts[1],
            alive_sensing=counts[2],
            heads_count=int(topo.heads.size),
            clusters_count=n_clusters,
            energy_remaining_total=float(net.energy.sum()),
            packets_to_sink=packets,
        ))
        if series[-1].alive_sensing == 0:
            terminated_early = r < config.max_rounds - 1
            break

    fnd, hnd, lnd = lifetime_metrics(series, deployed_sensing)
    return SimResult(
        fnd=fnd, hnd=hnd, lnd=lnd,
        series=series,
        config_echo=config,
        total_energy_spent=ledger.total_spent,
        per_node_spent=ledger.spent_array.copy(),
        terminated_early=terminated_early,
    )
