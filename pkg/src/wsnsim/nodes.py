"""Node state, kept as a struct-of-arrays for fast round processing."""

from __future__ import annotations

from dataclasses import dataclass
from enum import IntEnum
from typing import Iterable

import numpy as np


class NodeKind(IntEnum):
    NORMAL = 0      # plain sensing node
    ADVANCED = 1    # high-energy sensing node (SEP class, or plain under LEACH)
    GATEWAY = 2     # high-energy relay/manager, never senses or gets elected


class Role(IntEnum):
    NONE = 0
    MEMBER = 1
    HEAD = 2
    GATEWAY_RELAY = 3
    DIRECT_TO_SINK = 4


@dataclass
class Node:
    """Read-only snapshot of one node, for tests and inspection."""

    id: int
    x: float
    y: float
    kind: NodeKind
    energy: float
    initial_energy: float
    alive: bool
    in_g: bool
    role: Role


class Network:
    """All node state as parallel numpy arrays, indexed by node id."""

    __slots__ = ("x", "y", "kind", "energy", "initial_energy", "alive", "in_g",
                 "role", "sensing", "is_advanced", "d2_sink", "d2_pair")

    def __init__(self, x, y, kind, energy):
        self.x = np.asarray(x, dtype=np.float64)
        self.y = np.asarray(y, dtype=np.float64)
        self.kind = np.asarray(kind, dtype=np.int8)
        self.energy = np.asarray(energy, dtype=np.float64).copy()
        self.initial_energy = self.energy.copy()
        self.alive = self.energy > 0
        self.in_g = self.alive.copy()
        self.role = np.full(self.x.shape, Role.NONE, dtype=np.int8)
        # kinds are fixed for a node's lifetime, so these masks are static
        self.sensing = self.kind != NodeKind.GATEWAY
        self.is_advanced = self.kind == NodeKind.ADVANCED
        self.d2_sink = None  # squared distances to the sink, cached by the engine
        self.d2_pair = None  # pairwise squared distances, cached by the engine

    @classmethod
    def from_nodes(cls, nodes: Iterable[Node]) -> "Network":
        nodes = sorted(nodes, key=lambda nd: nd.id)
        net = cls(
            [nd.x for nd in nodes],
            [nd.y for nd in nodes],
            [nd.kind for nd in nodes],
            [nd.energy for nd in nodes],
        )
        for i, nd in enumerate(nodes):
            net.initial_energy[i] = nd.initial_energy
            net.alive[i] = nd.alive
            net.in_g[i] = nd.in_g
            net.role[i] = nd.role
        return net

    @property
    def n(self) -> int:
        return self.x.shape[0]

    def node(self, i: int) -> Node:
        return Node(
            id=i,
            x=float(self.x[i]),
            y=float(self.y[i]),
            kind=NodeKind(self.kind[i]),
            energy=float(self.energy[i]),
            initial_energy=float(self.initial_energy[i]),
            alive=bool(self.alive[i]),
            in_g=bool(self.in_g[i]),
            role=Role(self.role[i]),
        )

    def nodes(self) -> list[Node]:
        return [self.node(i) for i in range(self.n)]
