"""The four migration strategies behind one step interface.

All four trigger on the same imbalance detection so a comparison isolates
the migration policy itself:

* nsm  - never migrates; the static baseline.
* csm  - moves a seeded-random switch of each overloaded controller to the
         hop-closest controller whose load is below the mean.
* musm - moves the highest-flow-rate switch of each overloaded controller to
         the controller with the largest residual capacity.
* easm - one efficiency-driven rebalance round per step.

Each step returns (new_state, StepReport); states are never mutated in
place, so a trajectory can be replayed from any point.
"""

from __future__ import annotations

import enum
import logging
import random
from dataclasses import dataclass, field

from .detection import detect
from .errors import StateError
from .executor import ExecutedTriplet, rebalance
from .load_model import LoadModelParams, load_vector
from .planner import (
    MigrationTriplet,
    PlannerParams,
    emigration_controllers,
    migration_cost,
    simplified_migration_cost,
)
from .state import NetworkState

logger = logging.getLogger(__name__)


class StrategyKind(enum.Enum):
    NSM = "nsm"
    CSM = "csm"
    MUSM = "musm"
    EASM = "easm"


@dataclass(frozen=True)
class StepReport:
    migrations: tuple[ExecutedTriplet, ...] = ()
    cost: float = 0.0
    rounds: int = 0
    notes: tuple[str, ...] = field(default=())


def _triplet_cost(state, params, switch, source, target, load_mode):
    if load_mode == "simplified":
        return simplified_migration_cost(state, switch, target)
    return migration_cost(state, params, switch, source, target)


def _apply_single(state, params, load_mode, source, switch, target, notes):
    """Reassign one switch, capturing pre/post loads; on failure add a note."""
    pre = load_vector(state, params, load_mode)
    cost = _triplet_cost(state, params, switch, source, target, load_mode)
    try:
        nxt = state.reassign(switch, target)
    except StateError as exc:
        notes.append(f"migration of {switch} to {target} rejected: {exc}")
        return state, None
    post = load_vector(nxt, params, load_mode)
    trip = MigrationTriplet(emigration=source, switch=switch, immigration=target,
                            cost=cost, efficiency=0.0)
    return nxt, ExecutedTriplet(
        triplet=trip,
        pre_loads=tuple(float(x) for x in pre),
        post_loads=tuple(float(x) for x in post),
    )


def step_nsm(state: NetworkState) -> tuple[NetworkState, StepReport]:
    """Static mapping: never migrates."""
    return state, StepReport()


def step_csm(state: NetworkState, params: LoadModelParams,
             rng: random.Random | int, *, load_mode: str = "full",
             zero_load: str = "error",
             lambda_scale: float = 1.0) -> tuple[NetworkState, StepReport]:
    """Closest-migration baseline.

    For each overloaded controller (most loaded first) a uniformly random
    switch of its domain moves to the hop-closest controller whose load is
    below the controller mean; distance ties go to the earliest-declared
    controller. No underloaded controller means a logged no-op.
    """
    if isinstance(rng, int):
        rng = random.Random(rng)
    det = detect(state, params, load_mode=load_mode, zero_load=zero_load,
                 lambda_scale=lambda_scale)
    if det.balanced:
        return state, StepReport()

    loads = det.loads
    mean = float(loads.sum()) / state.n_controllers
    notes: list[str] = []
    migrations: list[ExecutedTriplet] = []
    current = state
    for source in emigration_controllers(det):
        m = state.controller_index(source)
        domain = sorted(current.gamma(source))
        if not domain:
            continue
        switch = rng.choice(domain)
        i = current.switch_index(switch)
        below = [n for n in range(state.n_controllers)
                 if n != m and loads[n] < mean]
        if not below:
            notes.append(f"no underloaded controller for {source}")
            logger.warning("csm: no underloaded controller for %s", source)
            continue
        target_idx = min(below, key=lambda n: (current.hops_sc[i, n], n))
        target = state.controller_nodes[target_idx]
        current, done = _apply_single(current, params, load_mode, source,
                                      switch, target, notes)
        if done:
            migrations.append(done)

    return current, StepReport(
        migrations=tuple(migrations),
        cost=sum(m.triplet.cost for m in migrations),
        rounds=1 if migrations else 0,
        notes=tuple(notes),
    )


def step_musm(state: NetworkState, params: LoadModelParams, *,
              load_mode: str = "full", zero_load: str = "error",
              lambda_scale: float = 1.0) -> tuple[NetworkState, StepReport]:
    """Maximum-residual-capacity baseline.

    For each overloaded controller the switch with the highest flow rate
    moves to the controller with the largest remaining capacity; residual
    ties go to the earliest-declared controller.
    """
    det = detect(state, params, load_mode=load_mode, zero_load=zero_load,
                 lambda_scale=lambda_scale)
    if det.balanced:
        return state, StepReport()

    loads = det.loads
    notes: list[str] = []
    migrations: list[ExecutedTriplet] = []
    current = state
    for source in emigration_controllers(det):
        m = state.controller_index(source)
        domain = sorted(current.gamma(source))
        if not domain:
            continue
        # max() keeps the first maximum, so ties resolve to the lowest
        # switch id / earliest controller without extra keys.
        switch = max(domain,
                     key=lambda s: current.flow_rates[current.switch_index(s)])
        others = [n for n in range(state.n_controllers) if n != m]
        target_idx = max(others, key=lambda n: state.capacities[n] - loads[n])
        target = state.controller_nodes[target_idx]
        current, done = _apply_single(current, params, load_mode, source,
                                      switch, target, notes)
        if done:
            migrations.append(done)

    return current, StepReport(
        migrations=tuple(migrations),
        cost=sum(m.triplet.cost for m in migrations),
        rounds=1 if migrations else 0,
        notes=tuple(notes),
    )


def step_easm(state: NetworkState, load_params: LoadModelParams,
              planner_params: PlannerParams, *, load_mode: str = "full",
              zero_load: str = "error", lambda_scale: float = 1.0,
              rng: random.Random | None = None) -> tuple[NetworkState, StepReport]:
    """Efficiency-driven strategy: one rebalance round per simulation step."""
    nxt, report = rebalance(state, load_params, planner_params,
                            load_mode=load_mode, max_rounds=1,
                            zero_load=zero_load, lambda_scale=lambda_scale,
                            rng=rng)
    notes = (report.stall_reason,) if report.stall_reason else ()
    return nxt, StepReport(
        migrations=report.executed,
        cost=report.total_cost,
        rounds=report.rounds,
        notes=notes,
    )


def strategy_step(kind: StrategyKind, state: NetworkState,
                  load_params: LoadModelParams, planner_params: PlannerParams,
                  rng: random.Random, *, load_mode: str = "full",
                  zero_load: str = "error", lambda_scale: float = 1.0):
    """Uniform dispatcher used by the simulator."""
    if kind is StrategyKind.NSM:
        return step_nsm(state)
    if kind is StrategyKind.CSM:
        return step_csm(state, load_params, rng, load_mode=load_mode,
                        zero_load=zero_load, lambda_scale=lambda_scale)
    if kind is StrategyKind.MUSM:
        return step_musm(state, load_params, load_mode=load_mode,
                         zero_load=zero_load, lambda_scale=lambda_scale)
    if kind is StrategyKind.EASM:
        return step_easm(state, load_params, planner_params,
                         load_mode=load_mode, zero_load=zero_load,
                         lambda_scale=lambda_scale, rng=rng)
    raise ValueError(f"unknown strategy {kind!r}")
