"""Round-based simulator for cluster-based wireless sensor networks.

Implements LEACH, SEP and a gateway-managed clustering protocol under a
two-regime first-order radio energy model, with a deterministic seeded
benchmark harness for lifetime comparisons.
"""

from .config import GatewayPlacement, ProtocolKind, SimConfig
from .energy import (EnergyLedger, RadioParams, aggregate_energy,
                     crossover_distance, debit, receive_energy, transmit_energy)
from .engine import (RNG_ALGORITHM, RoundMetrics, SimResult, init_deployment,
                     lifetime_metrics, run)
from .errors import ContractViolationError, InvalidParameterError
from .nodes import Network, Node, NodeKind, Role
from .protocols import (ClusterTopology, ElectionState, assign_gateways,
                        assign_members, elect_cluster_heads, epoch_reset,
                        leach_threshold, sep_probabilities, steady_state_round)

__version__ = "0.1.0"

__all__ = [
    "ClusterTopology", "ContractViolationError", "ElectionState", "EnergyLedger",
    "GatewayPlacement", "InvalidParameterError", "Network", "Node", "NodeKind",
    "ProtocolKind", "RNG_ALGORITHM", "RadioParams", "Role", "RoundMetrics",
    "SimConfig", "SimResult", "aggregate_energy", "assign_gateways",
    "assign_members", "crossover_distance", "debit", "elect_cluster_heads",
    "epoch_reset", "init_deployment", "leach_threshold", "lifetime_metrics",
    "receive_energy", "run", "sep_probabilities", "steady_state_round",
    "transmit_energy",
]
