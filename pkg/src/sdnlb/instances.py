"""Seeded random problem instances for tests and benchmarks.

Topologies are random connected graphs (spanning tree plus extra edges);
every node hosts a switch, controllers are co-located on a random subset of
nodes, and mastership goes to the nearest controller. Capacities are sized
from the realized initial loads so migrations stay feasible.
"""

from __future__ import annotations

import random
import warnings

from .load_model import LoadModelParams, load_vector
from .state import ControllerRecord, NetworkState, SwitchRecord, new_state
from .topology import Topology, build_topology


def random_connected_topology(seed: int, n_nodes: int,
                              extra_edge_fraction: float = 0.3) -> Topology:
    """Random spanning tree plus a fraction of extra edges."""
    if n_nodes < 2:
        raise ValueError("need at least 2 nodes")
    rng = random.Random(seed)
    nodes = [f"n{i:03d}" for i in range(n_nodes)]
    order = nodes[:]
    rng.shuffle(order)
    links = set()
    for i in range(1, n_nodes):
        a = order[i]
        b = order[rng.randrange(i)]
        links.add((a, b) if a < b else (b, a))
    extra = int(extra_edge_fraction * n_nodes)
    attempts = 0
    while extra > 0 and attempts < 50 * n_nodes:
        attempts += 1
        a, b = rng.sample(nodes, 2)
        key = (a, b) if a < b else (b, a)
        if key not in links:
            links.add(key)
            extra -= 1
    return build_topology(nodes, sorted(links))


def random_instance(seed: int, n_controllers: int, n_switches: int, *,
                    rate_range: tuple[float, float] = (50.0, 350.0),
                    capacity_factor: float = 3.0,
                    load_params: LoadModelParams | None = None,
                    load_mode: str = "full") -> NetworkState:
    """A validated random NetworkState with nearest-controller mastership.

    Capacities are capacity_factor times the largest initial load (but at
    least the flow-sum of the busiest domain), identical for all
    controllers, so the instance starts feasible with headroom for
    migrations.
    """
    if n_controllers < 2 or n_switches < n_controllers:
        raise ValueError("need >= 2 controllers and >= n_controllers switches")
    if load_params is None:
        load_params = LoadModelParams()
    rng = random.Random(seed)

    topo = random_connected_topology(seed, n_switches)
    nodes = list(topo.nodes)
    ctrl_nodes = rng.sample(nodes, n_controllers)

    switches = [
        SwitchRecord(node, round(rng.uniform(*rate_range), 3)) for node in nodes
    ]
    mastership = {}
    for node in nodes:
        mastership[node] = min(
            ctrl_nodes, key=lambda c: (topo.hops(node, c), ctrl_nodes.index(c))
        )

    # First pass with loose capacities just to measure the realized loads.
    # Fuzz instances routinely sit outside the advisory domain-size band, so
    # the soft warning is silenced here.
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        probe = new_state(
            topo,
            [ControllerRecord(c, capacity=1e12) for c in ctrl_nodes],
            switches,
            mastership,
        )
        loads = load_vector(probe, load_params, load_mode)
        flow_sums = probe.domain_flow_sums()
        cap = capacity_factor * max(float(loads.max()), float(flow_sums.max()))
        controllers = [ControllerRecord(c, capacity=cap) for c in ctrl_nodes]
        return new_state(topo, controllers, switches, mastership)
