"""First-order radio energy model and energy bookkeeping.

Transmit cost has two amplifier regimes: free-space (d^2) below the
crossover distance d0 and multipath (d^4) above it. All values are in
joules; nJ/pJ constants are converted once at construction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ContractViolationError, InvalidParameterError


@dataclass(frozen=True)
class RadioParams:
    """Radio constants (joules per bit, except e_da which is per bit per signal)."""

    e_elec: float = 50e-9       # TX/RX electronics, J/bit
    eps_fs: float = 10e-12      # free-space amplifier, J/bit/m^2
    eps_mp: float = 0.0013e-12  # multipath amplifier, J/bit/m^4
    e_da: float = 5e-9          # data aggregation, J/bit/signal

    def __post_init__(self) -> None:
        for name in ("e_elec", "eps_fs", "eps_mp", "e_da"):
            if getattr(self, name) <= 0:
                raise InvalidParameterError(f"{name} must be strictly positive")

    @property
    def d0(self) -> float:
        """Crossover distance in meters, always recomputed from the coefficients."""
        return crossover_distance(self)


def crossover_distance(params: RadioParams) -> float:
    """Distance at which the free-space and multipath amplifier costs agree."""
    return math.sqrt(params.eps_fs / params.eps_mp)


def transmit_energy(bits: float, distance: float, params: RadioParams) -> float:
    """Energy to transmit `bits` over `distance` meters.

    Uses the free-space branch at or below the crossover distance (both
    branches agree there) and the multipath branch beyond it.
    """
    if bits < 0:
        raise InvalidParameterError("bits must be non-negative")
    if distance < 0:
        raise InvalidParameterError("distance must be non-negative")
    cost = params.e_elec * bits
    if distance <= crossover_distance(params):
        cost += params.eps_fs * bits * distance * distance
    else:
        cost += params.eps_mp * bits * distance ** 4
    return cost


def receive_energy(bits: float, params: RadioParams) -> float:
    """Energy to receive `bits` (electronics only, distance independent)."""
    if bits < 0:
        raise InvalidParameterError("bits must be non-negative")
    return params.e_elec * bits


def aggregate_energy(bits_per_signal: float, n_signals: int, params: RadioParams) -> float:
    """Energy to fuse `n_signals` signals of `bits_per_signal` bits each."""
    if bits_per_signal < 0 or n_signals < 0:
        raise InvalidParameterError("bits and signal count must be non-negative")
    return params.e_da * bits_per_signal * n_signals


class EnergyLedger:
    """Cumulative per-node record of energy actually removed from the network."""

    def __init__(self, n_nodes: int):
        if n_nodes < 0:
            raise InvalidParameterError("n_nodes must be non-negative")
        self._spent = np.zeros(n_nodes, dtype=np.float64)

    def record(self, node_id: int, amount: float) -> None:
        if amount < 0:
            raise InvalidParameterError("ledger amounts must be non-negative")
        self._spent[node_id] += amount

    def record_many(self, node_ids: np.ndarray, amounts: np.ndarray) -> None:
        # callers never pass duplicate ids within one call
        self._spent[node_ids] += amounts

    def spent(self, node_id: int) -> float:
        return float(self._spent[node_id])

    @property
    def total_spent(self) -> float:
        return float(self._spent.sum())

    @property
    def per_node_spent(self) -> dict[int, float]:
        return {i: float(v) for i, v in enumerate(self._spent)}

    @property
    def spent_array(self) -> np.ndarray:
        return self._spent


def debit(net, node_id: int, amount: float, ledger: EnergyLedger) -> None:
    """Remove `amount` joules from one node, clamping at zero.

    The node dies when its energy reaches zero; the ledger records only
    what was actually available to remove.
    """
    if amount < 0:
        raise InvalidParameterError("debit amount must be non-negative")
    if not net.alive[node_id]:
        raise ContractViolationError(f"debit on dead node {node_id}")
    before = float(net.energy[node_id])
    paid = min(before, amount)
    remaining = before - amount
    if remaining <= 0:
        net.energy[node_id] = 0.0
        net.alive[node_id] = False
    else:
        net.energy[node_id] = remaining
    ledger.record(node_id, paid)
