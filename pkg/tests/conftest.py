"""Shared fixtures: the three-domain golden scenario and small helpers."""

import warnings

import pytest

from sdnlb.load_model import LoadModelParams
from sdnlb.planner import PlannerParams
from sdnlb.state import ControllerRecord, SwitchRecord, new_state
from sdnlb.topology import build_topology

# Three controller domains, nine switches, one transit node. Flow rates put
# the domains at 90 / 150 / 70 KB/s; the hop geometry makes s6 sit 3 hops
# from both c2 and c3 while s7 is 4 hops from c3 and 6 from c1.
FIG1_NODES = ["c1", "c2", "c3", "s1", "s2", "s3", "s4", "s5", "s6", "s7",
              "s8", "s9", "t"]
FIG1_LINKS = [
    ("c1", "s1"), ("c1", "s2"), ("c1", "s3"),
    ("c2", "s4"), ("c2", "s5"), ("c2", "s7"),
    ("c3", "s8"), ("c3", "s9"),
    ("s4", "s8"), ("s4", "t"), ("s8", "t"),
    ("s6", "t"), ("s6", "s1"),
]
FIG1_RATES = {"s1": 30, "s2": 30, "s3": 30, "s4": 30, "s5": 30, "s6": 40,
              "s7": 50, "s8": 30, "s9": 40}
FIG1_MASTERSHIP = {
    "s1": "c1", "s2": "c1", "s3": "c1",
    "s4": "c2", "s5": "c2", "s6": "c2", "s7": "c2",
    "s8": "c3", "s9": "c3",
}


def make_fig1_topology():
    return build_topology(FIG1_NODES, FIG1_LINKS)


def make_fig1_state(capacity=5000.0):
    topo = make_fig1_topology()
    controllers = [ControllerRecord(c, capacity) for c in ("c1", "c2", "c3")]
    switches = [SwitchRecord(s, FIG1_RATES[s]) for s in sorted(FIG1_RATES)]
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        return new_state(topo, controllers, switches, FIG1_MASTERSHIP)


@pytest.fixture
def fig1_topology():
    return make_fig1_topology()


@pytest.fixture
def fig1_state():
    return make_fig1_state()


@pytest.fixture
def load_params():
    return LoadModelParams()


@pytest.fixture
def planner_params():
    return PlannerParams(seed=42)
