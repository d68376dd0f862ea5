"""Controller load model.

Two modes are exposed:

* "full" - weighted aggregation of three overhead families: data interaction
  (switch polling), routing formulation (Packet-in processing plus flow-table
  distribution), and inter-controller state synchronization.
* "simplified" - the sum of supervised switch flow rates. Hop-free; used by
  the introductory golden scenarios and available everywhere as an
  alternative load definition.

All loads are KB/s. Packet sizes are configured in bytes and converted to KB
internally so the weighted sum adds like with like.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import ParameterError
from .state import NetworkState

LOAD_MODES = ("full", "simplified")

_WEIGHT_SUM_TOL = 1e-9


@dataclass(frozen=True)
class LoadModelParams:
    """Model constants: polling rate, packet sizes, and component weights.

    nu        average per-switch polling rate, KB/s
    p_packet  average Packet-in size, bytes
    zeta_sync synchronization packet size, bytes
    sigma     weights of (data, routing, sync); must sum to 1
    """

    nu: float = 15.0
    p_packet: float = 30.0
    zeta_sync: float = 18.0
    sigma: tuple[float, float, float] = (1 / 3, 1 / 3, 1 / 3)

    def __post_init__(self):
        if self.nu < 0 or self.p_packet < 0 or self.zeta_sync < 0:
            raise ParameterError("nu, p_packet and zeta_sync must be >= 0")
        if len(self.sigma) != 3 or any(w < 0 for w in self.sigma):
            raise ParameterError("sigma must be three non-negative weights")
        if abs(sum(self.sigma) - 1.0) > _WEIGHT_SUM_TOL:
            raise ParameterError(
                f"sigma weights must sum to 1, got {sum(self.sigma)!r}"
            )

    @property
    def p_packet_kb(self) -> float:
        return self.p_packet / 1000.0

    @property
    def zeta_sync_kb(self) -> float:
        return self.zeta_sync / 1000.0


@dataclass(frozen=True)
class LoadBreakdown:
    """One controller's load split into its three weighted components."""

    f_data: float
    f_packet: float
    f_table: float
    f_state: float
    total: float

    @property
    def f_routing(self) -> float:
        return self.f_packet + self.f_table


def _check_mode(mode: str):
    if mode not in LOAD_MODES:
        raise ParameterError(f"unknown load mode {mode!r}; expected one of {LOAD_MODES}")


def load_vector(state: NetworkState, params: LoadModelParams,
                mode: str = "full") -> np.ndarray:
    """Per-controller loads, KB/s, in controller declaration order."""
    _check_mode(mode)
    if mode == "simplified":
        return kernels.simplified_loads(
            state.master_idx, state.flow_rates, state.n_controllers
        )
    loads, _, _, _, _ = kernels.full_loads(
        state.master_idx, state.flow_rates, state.hops_sc, state.peer_hop_sum,
        params.nu, params.p_packet_kb, params.zeta_sync_kb, *params.sigma,
    )
    return loads


def data_interaction_overhead(state: NetworkState, params: LoadModelParams,
                              controller: str) -> float:
    """Polling overhead: nu times the hop sum to all supervised switches."""
    m = state.controller_index(controller)
    total = 0.0
    for i in range(state.n_switches):
        if state.master_idx[i] == m:
            total += float(state.hops_sc[i, m])
    return params.nu * total


def routing_overhead(state: NetworkState, params: LoadModelParams,
                     controller: str) -> float:
    """Packet-in processing plus flow-table distribution overhead.

    The Packet-in part charges p_packet per hop to each supervised switch.
    The flow-table part charges alpha * (hop to supervised switch) * (hop to
    peer controller) over all supervised switches and all peer controllers
    (full-mesh controller peering).
    """
    m = state.controller_index(controller)
    hop_sum = 0.0
    rate_hop_sum = 0.0
    for i in range(state.n_switches):
        if state.master_idx[i] == m:
            h = float(state.hops_sc[i, m])
            hop_sum += h
            rate_hop_sum += float(state.flow_rates[i]) * h
    f_packet = params.p_packet_kb * hop_sum
    f_table = rate_hop_sum * float(state.peer_hop_sum[m])
    return f_packet + f_table


def state_sync_overhead(state: NetworkState, params: LoadModelParams,
                        controller: str) -> float:
    """Synchronization overhead toward every peer controller (full mesh)."""
    m = state.controller_index(controller)
    return params.zeta_sync_kb * float(state.peer_hop_sum[m])


def controller_load(state: NetworkState, params: LoadModelParams,
                    controller: str) -> LoadBreakdown:
    """Full-mode load of one controller with its component breakdown."""
    m = state.controller_index(controller)
    loads, f_data, f_packet, f_table, f_state = kernels.full_loads(
        state.master_idx, state.flow_rates, state.hops_sc, state.peer_hop_sum,
        params.nu, params.p_packet_kb, params.zeta_sync_kb, *params.sigma,
    )
    return LoadBreakdown(
        f_data=float(f_data[m]),
        f_packet=float(f_packet[m]),
        f_table=float(f_table[m]),
        f_state=float(f_state[m]),
        total=float(loads[m]),
    )


def simplified_load(state: NetworkState, controller: str) -> float:
    """Sum of flow rates over the controller's supervised switches, KB/s."""
    m = state.controller_index(controller)
    loads = kernels.simplified_loads(
        state.master_idx, state.flow_rates, state.n_controllers
    )
    return float(loads[m])
