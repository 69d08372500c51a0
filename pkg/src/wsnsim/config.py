"""Run configuration: protocol choice, deployment and energy parameters."""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

from .energy import RadioParams
from .errors import InvalidParameterError


class ProtocolKind(Enum):
    LEACH = "LEACH"
    SEP = "SEP"
    GATEWAY = "GATEWAY"


class GatewayPlacement(Enum):
    RANDOM = "RANDOM"
    GRID = "GRID"


@dataclass
class SimConfig:
    """Complete description of one simulation run (seed included).

    `sep_m` defaults to n_gateways/n_nodes so SEP's extra energy budget
    matches a gateway deployment of the same size; `sep_a = 1` matches the
    2:1 ratio of the two initial energy levels.
    """

    area: tuple[float, float] = (100.0, 100.0)
    n_nodes: int = 100
    n_gateways: int = 4
    e0_normal: float = 0.5
    e0_high: float = 1.0
    p_select: float = 0.1
    packet_bits: int = 4000
    frames_per_round: int = 1
    max_rounds: int = 1000
    sink: tuple[float, float] = (50.0, 100.0)
    protocol: ProtocolKind = ProtocolKind.LEACH
    sep_m: float | None = None
    sep_a: float = 1.0
    seed: int = 0
    gateway_placement: GatewayPlacement = GatewayPlacement.RANDOM
    setup_cost_joules: float = 0.0
    radio: RadioParams = field(default_factory=RadioParams)

    def __post_init__(self) -> None:
        if self.area[0] <= 0 or self.area[1] <= 0:
            raise InvalidParameterError("area dimensions must be positive")
        if self.n_nodes < 1:
            raise InvalidParameterError("n_nodes must be at least 1")
        if self.n_gateways < 0:
            raise InvalidParameterError("n_gateways must be non-negative")
        if self.e0_normal < 0 or self.e0_high < 0:
            raise InvalidParameterError("initial energies must be non-negative")
        if not 0 < self.p_select < 1:
            raise InvalidParameterError("p_select must lie in (0, 1)")
        if self.packet_bits < 1:
            raise InvalidParameterError("packet_bits must be positive")
        if self.frames_per_round < 1:
            raise InvalidParameterError("frames_per_round must be at least 1")
        if self.max_rounds < 1:
            raise InvalidParameterError("max_rounds must be at least 1")
        if self.setup_cost_joules < 0:
            raise InvalidParameterError("setup_cost_joules must be non-negative")
        if self.seed < 0:
            raise InvalidParameterError("seed must be a non-negative integer")
        if self.sep_m is None:
            self.sep_m = self.n_gateways / self.n_nodes
        if not 0 <= self.sep_m <= 1:
            raise InvalidParameterError("sep_m must lie in [0, 1]")
        if self.sep_a < 0:
            raise InvalidParameterError("sep_a must be non-negative")
