"""Scenario files: the single structured input describing an experiment.

A scenario is a JSON document; all randomness in a run flows from its
mandatory "seed" field. Schema (field names are stable; golden CSVs depend
on them):

{
  "topology": {"builtin": "os3e"} | {"file": "relative/or/absolute.graphml"},
  "controllers": [{"node": "...", "capacity": 5000.0}, ...],
  "switches": [{"node": "...", "flow_rate": 30.0}, ...],
  "mastership": {"switch-node": "controller-node", ...} | "nearest",
  "load_mode": "full" | "simplified",
  "load_params": {"nu": 15.0, "p_packet_bytes": 30.0, "zeta_sync_bytes": 18.0,
                   "sigma": [0.333.., 0.333.., 0.333..]},
  "planner": {"gamma": 0.5, "t0": 1.0, "max_temp_change": 100, "mode": "sa"},
  "detection": {"zero_load": "error" | "epsilon", "lambda_scale": 1.0},
  "executor": {"max_rounds": 10},
  "strategies": ["easm", "nsm", "csm", "musm"],
  "trace": {"kind": "constant" | "uniform-walk" | "spike", "steps": 20, ...},
  "seed": 42,
  "output_dir": "out"
}

Only topology, controllers, switches, mastership, and seed are mandatory;
everything else has the defaults shown above. "capacity" defaults to
5000 KB/s. Relative topology paths resolve against the scenario file.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

from .errors import ScenarioError
from .executor import DEFAULT_MAX_ROUNDS
from .load_model import LOAD_MODES, LoadModelParams
from .planner import PlannerParams
from .state import ControllerRecord, NetworkState, SwitchRecord, new_state
from .strategies import StrategyKind
from .topology import Topology, builtin_os3e, load_graphml_file

BUILTIN_TOPOLOGIES = ("os3e",)


@dataclass(frozen=True)
class TraceSpec:
    kind: str = "constant"
    steps: int = 20
    mean: float = 200.0
    band: tuple[float, float] = (100.0, 300.0)
    step_size: float = 20.0
    spike_factor: float = 4.0
    spike_every: int = 50
    spike_duration: int = 5


@dataclass(frozen=True)
class ScenarioConfig:
    name: str
    topology: Topology
    state: NetworkState
    load_mode: str
    load_params: LoadModelParams
    planner_params: PlannerParams
    zero_load: str
    lambda_scale: float
    max_rounds: int
    strategies: tuple[StrategyKind, ...]
    trace: TraceSpec
    seed: int
    output_dir: str | None = None
    base_rates: tuple[float, ...] = field(default=())


def _require(doc: dict, key: str):
    if key not in doc:
        raise ScenarioError(f"scenario is missing required field {key!r}")
    return doc[key]


def _resolve_topology(spec, base_dir: Path) -> Topology:
    if not isinstance(spec, dict) or len(spec) != 1:
        raise ScenarioError(
            'topology must be {"builtin": name} or {"file": path}'
        )
    if "builtin" in spec:
        name = spec["builtin"]
        if name not in BUILTIN_TOPOLOGIES:
            raise ScenarioError(
                f"unknown builtin topology {name!r}; available: {BUILTIN_TOPOLOGIES}"
            )
        return builtin_os3e()
    if "file" in spec:
        path = Path(spec["file"])
        if not path.is_absolute():
            path = base_dir / path
        if not path.exists():
            raise ScenarioError(f"topology file not found: {path}")
        return load_graphml_file(path)
    raise ScenarioError('topology must contain "builtin" or "file"')


def _nearest_mastership(topology, controllers, switches):
    nodes = [c.node for c in controllers]
    out = {}
    for s in switches:
        out[s.node] = min(nodes, key=lambda c: (topology.hops(s.node, c),
                                                nodes.index(c)))
    return out


def load_scenario(path) -> ScenarioConfig:
    """Parse and validate a scenario file into a ready-to-run config."""
    path = Path(path)
    if not path.exists():
        raise ScenarioError(f"scenario file not found: {path}")
    try:
        doc = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise ScenarioError(f"scenario {path} is not valid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise ScenarioError("scenario root must be a JSON object")

    topology = _resolve_topology(_require(doc, "topology"), path.parent)

    try:
        controllers = [
            ControllerRecord(c["node"], float(c.get("capacity", 5000.0)))
            for c in _require(doc, "controllers")
        ]
        switches = [
            SwitchRecord(s["node"], float(s["flow_rate"]))
            for s in _require(doc, "switches")
        ]
    except (KeyError, TypeError) as exc:
        raise ScenarioError(f"bad controller/switch record: {exc}") from exc

    mastership = _require(doc, "mastership")
    if mastership == "nearest":
        mastership = _nearest_mastership(topology, controllers, switches)
    elif not isinstance(mastership, dict):
        raise ScenarioError('mastership must be a mapping or "nearest"')

    seed = _require(doc, "seed")
    if not isinstance(seed, int):
        raise ScenarioError("seed must be an integer (no implicit entropy)")

    load_mode = doc.get("load_mode", "full")
    if load_mode not in LOAD_MODES:
        raise ScenarioError(f"load_mode must be one of {LOAD_MODES}")

    lp = doc.get("load_params", {})
    load_params = LoadModelParams(
        nu=float(lp.get("nu", 15.0)),
        p_packet=float(lp.get("p_packet_bytes", 30.0)),
        zeta_sync=float(lp.get("zeta_sync_bytes", 18.0)),
        sigma=tuple(lp.get("sigma", (1 / 3, 1 / 3, 1 / 3))),
    )

    pp = doc.get("planner", {})
    planner_params = PlannerParams(
        gamma=float(pp.get("gamma", 0.5)),
        t0=float(pp.get("t0", 1.0)),
        max_temp_change=int(pp.get("max_temp_change", 100)),
        seed=int(pp.get("seed", seed)),
        mode=pp.get("mode", "sa"),
    )

    det = doc.get("detection", {})
    zero_load = det.get("zero_load", "error")
    lambda_scale = float(det.get("lambda_scale", 1.0))

    max_rounds = int(doc.get("executor", {}).get("max_rounds", DEFAULT_MAX_ROUNDS))

    names = doc.get("strategies", ["easm", "nsm", "csm", "musm"])
    try:
        strategies = tuple(StrategyKind(n) for n in names)
    except ValueError as exc:
        valid = [k.value for k in StrategyKind]
        raise ScenarioError(f"unknown strategy in {names!r}; valid: {valid}") from exc

    tr = doc.get("trace", {})
    trace = TraceSpec(
        kind=tr.get("kind", "constant"),
        steps=int(tr.get("steps", 20)),
        mean=float(tr.get("mean", 200.0)),
        band=tuple(tr.get("band", (100.0, 300.0))),
        step_size=float(tr.get("step_size", 20.0)),
        spike_factor=float(tr.get("spike_factor", 4.0)),
        spike_every=int(tr.get("spike_every", 50)),
        spike_duration=int(tr.get("spike_duration", 5)),
    )

    state = new_state(topology, controllers, switches, mastership)
    return ScenarioConfig(
        name=path.stem,
        topology=topology,
        state=state,
        load_mode=load_mode,
        load_params=load_params,
        planner_params=planner_params,
        zero_load=zero_load,
        lambda_scale=lambda_scale,
        max_rounds=max_rounds,
        strategies=strategies,
        trace=trace,
        seed=seed,
        output_dir=doc.get("output_dir"),
        base_rates=tuple(s.flow_rate for s in switches),
    )
