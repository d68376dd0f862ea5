"""Mutable network assignment held as an immutable value: which controller
masters which switch, controller capacities, and per-switch flow rates.

Controllers and switches are identified by the topology node they live on.
A controller may share its node with a switch (hop distance 0 between them).
Every mutation returns a fresh NetworkState; existing values are never
touched, so states are safe to share and to replay.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .errors import StateError
from .topology import Topology

# Per-controller load budget used when a scenario omits capacities, KB/s.
DEFAULT_CAPACITY_KBPS = 5000.0

# Advisory band for switches per controller; violations warn, never fail.
DOMAIN_SIZE_SOFT_RANGE = (5, 20)


@dataclass(frozen=True)
class ControllerRecord:
    node: str
    capacity: float = DEFAULT_CAPACITY_KBPS


@dataclass(frozen=True)
class SwitchRecord:
    node: str
    flow_rate: float


class NetworkState:
    """Validated (controllers, switches, mastership) triple plus the derived
    index arrays the load and planning code works on.

    Do not mutate. Use reassign()/with_flow_rates() to derive new states.
    """

    __slots__ = (
        "topology",
        "controllers",
        "switches",
        "mastership",
        "controller_nodes",
        "switch_nodes",
        "capacities",
        "flow_rates",
        "master_idx",
        "hops_sc",
        "hops_cc",
        "peer_hop_sum",
        "_controller_pos",
        "_switch_pos",
    )

    def __init__(self, topology: Topology, controllers, switches, mastership,
                 _skip_checks: bool = False):
        controllers = tuple(controllers)
        switches = tuple(switches)
        mastership = dict(mastership)
        if not _skip_checks:
            _validate(topology, controllers, switches, mastership)

        self.topology = topology
        self.controllers = controllers
        self.switches = switches
        self.mastership = mastership
        self.controller_nodes = tuple(c.node for c in controllers)
        self.switch_nodes = tuple(s.node for s in switches)
        self._controller_pos = {c.node: m for m, c in enumerate(controllers)}
        self._switch_pos = {s.node: i for i, s in enumerate(switches)}

        self.capacities = np.array([c.capacity for c in controllers], dtype=np.float64)
        self.flow_rates = np.array([s.flow_rate for s in switches], dtype=np.float64)
        self.master_idx = np.array(
            [self._controller_pos[mastership[s.node]] for s in switches],
            dtype=np.int64,
        )

        c_idx = [topology.node_index(n) for n in self.controller_nodes]
        s_idx = [topology.node_index(n) for n in self.switch_nodes]
        hops = topology.hop_matrix
        self.hops_sc = hops[np.ix_(s_idx, c_idx)].astype(np.float64)
        self.hops_cc = hops[np.ix_(c_idx, c_idx)].astype(np.float64)
        self.peer_hop_sum = self.hops_cc.sum(axis=1)  # diagonal is 0

        if not _skip_checks:
            self._check_capacity_floor()
            self._warn_domain_sizes()

    # -- queries ---------------------------------------------------------

    @property
    def n_controllers(self) -> int:
        return len(self.controllers)

    @property
    def n_switches(self) -> int:
        return len(self.switches)

    def controller_index(self, node: str) -> int:
        try:
            return self._controller_pos[node]
        except KeyError:
            raise StateError(f"unknown controller {node!r}") from None

    def switch_index(self, node: str) -> int:
        try:
            return self._switch_pos[node]
        except KeyError:
            raise StateError(f"unknown switch {node!r}") from None

    def gamma(self, controller: str) -> tuple[str, ...]:
        """Switch set currently mastered by the controller (declaration order)."""
        m = self.controller_index(controller)
        return tuple(
            self.switch_nodes[i]
            for i in range(self.n_switches)
            if self.master_idx[i] == m
        )

    def domain_flow_sums(self) -> np.ndarray:
        """Per-controller sum of supervised flow rates, KB/s."""
        sums = np.zeros(self.n_controllers, dtype=np.float64)
        np.add.at(sums, self.master_idx, self.flow_rates)
        return sums

    # -- derivations -----------------------------------------------------

    def reassign(self, switch: str, new_controller: str) -> "NetworkState":
        """Move one switch to a new master. Returns a new state."""
        self.switch_index(switch)
        self.controller_index(new_controller)
        new_map = dict(self.mastership)
        new_map[switch] = new_controller
        nxt = NetworkState(self.topology, self.controllers, self.switches,
                           new_map, _skip_checks=True)
        nxt._check_capacity_floor()
        return nxt

    def with_flow_rates(self, rates) -> "NetworkState":
        """Replace all switch flow rates (order matches self.switches)."""
        rates = np.asarray(rates, dtype=np.float64)
        if rates.shape != (self.n_switches,):
            raise StateError(
                f"expected {self.n_switches} flow rates, got shape {rates.shape}"
            )
        if (rates < 0).any():
            raise StateError("flow rates must be non-negative")
        switches = tuple(
            SwitchRecord(s.node, float(r)) for s, r in zip(self.switches, rates)
        )
        nxt = NetworkState(self.topology, self.controllers, switches,
                           self.mastership, _skip_checks=True)
        nxt._check_capacity_floor()
        return nxt

    # -- internal validation ----------------------------------------------

    def _check_capacity_floor(self):
        # At least one controller must stay within its processing capacity
        # (measured on supervised flow sums, the capacity's own unit).
        sums = self.domain_flow_sums()
        if not (sums <= self.capacities).any():
            raise StateError(
                "every controller exceeds its capacity: "
                + ", ".join(
                    f"{n}={s:.1f}/{c:.1f}"
                    for n, s, c in zip(self.controller_nodes, sums, self.capacities)
                )
            )

    def _warn_domain_sizes(self):
        lo, hi = DOMAIN_SIZE_SOFT_RANGE
        counts = np.bincount(self.master_idx, minlength=self.n_controllers)
        for node, count in zip(self.controller_nodes, counts):
            if not lo <= count <= hi:
                warnings.warn(
                    f"controller {node} supervises {count} switches, "
                    f"outside the advisory range [{lo}, {hi}]",
                    stacklevel=3,
                )


def _validate(topology, controllers, switches, mastership):
    if not controllers:
        raise StateError("at least one controller is required")
    ctrl_nodes = [c.node for c in controllers]
    if len(set(ctrl_nodes)) != len(ctrl_nodes):
        raise StateError("duplicate controller nodes")
    sw_nodes = [s.node for s in switches]
    if len(set(sw_nodes)) != len(sw_nodes):
        raise StateError("duplicate switch nodes")

    for c in controllers:
        if not topology.has_node(c.node):
            raise StateError(f"controller node {c.node!r} not in topology")
        if c.capacity <= 0:
            raise StateError(f"controller {c.node!r} capacity must be > 0")
    for s in switches:
        if not topology.has_node(s.node):
            raise StateError(f"switch node {s.node!r} not in topology")
        if s.flow_rate < 0:
            raise StateError(f"switch {s.node!r} flow rate must be >= 0")

    ctrl_set = set(ctrl_nodes)
    for s in switches:
        master = mastership.get(s.node)
        if master is None:
            raise StateError(f"switch {s.node!r} has no master controller")
        if master not in ctrl_set:
            raise StateError(
                f"switch {s.node!r} mapped to unknown controller {master!r}"
            )
    extra = set(mastership) - set(sw_nodes)
    if extra:
        raise StateError(f"mastership refers to unknown switches: {sorted(extra)}")


def new_state(topology, controllers, switches, mastership) -> NetworkState:
    """Validated state from records and a total switch -> controller mapping."""
    return NetworkState(topology, controllers, switches, mastership)


def switches_of(state: NetworkState, controller: str) -> tuple[str, ...]:
    """The switch set supervised by the controller."""
    return state.gamma(controller)


def reassign(state: NetworkState, switch: str, new_controller: str) -> NetworkState:
    """Functional form of NetworkState.reassign."""
    return state.reassign(switch, new_controller)
