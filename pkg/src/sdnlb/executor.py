"""Plan execution and the detect -> plan -> execute loop.

Execution applies triplets in plan order against the evolving state; a
triplet invalidated by an earlier one (switch already moved, target over
capacity) is skipped and logged rather than failing the run. The rebalance
loop commits a round only if it strictly reduced the load variance;
otherwise the round is discarded and the loop stops, so the per-round
variance history is always non-increasing and the loop always terminates
within its round budget.
"""

from __future__ import annotations

import logging
import random
from dataclasses import dataclass

from .detection import detect
from .errors import StateError
from .load_model import LoadModelParams, load_vector
from .planner import MigrationPlan, MigrationTriplet, PlannerParams, plan, variance_before
from .state import NetworkState

logger = logging.getLogger(__name__)

DEFAULT_MAX_ROUNDS = 10


@dataclass(frozen=True)
class ExecutedTriplet:
    """A committed migration with the load vectors around it."""

    triplet: MigrationTriplet
    pre_loads: tuple[float, ...]
    post_loads: tuple[float, ...]


@dataclass(frozen=True)
class SkippedTriplet:
    triplet: MigrationTriplet
    reason: str


@dataclass(frozen=True)
class RebalanceReport:
    rounds: int
    executed: tuple[ExecutedTriplet, ...]
    skipped: tuple[SkippedTriplet, ...]
    total_cost: float
    final_lambda: float
    balanced: bool
    stall_reason: str | None
    variance_history: tuple[float, ...]

    @property
    def migrations(self) -> int:
        return len(self.executed)


def execute_plan(state: NetworkState, migration_plan: MigrationPlan,
                 params: LoadModelParams, load_mode: str = "full"):
    """Apply a plan's triplets in order.

    Returns (new_state, executed, skipped). A triplet is skipped when its
    switch no longer belongs to the emigration controller, when the target
    would exceed capacity under the hop-weighted hypothetical load, or when
    the reassignment itself would leave every controller over capacity.
    """
    executed: list[ExecutedTriplet] = []
    skipped: list[SkippedTriplet] = []
    current = state
    for trip in migration_plan.triplets:
        i = current.switch_index(trip.switch)
        m = current.controller_index(trip.emigration)
        n = current.controller_index(trip.immigration)
        if current.master_idx[i] != m:
            skipped.append(SkippedTriplet(trip, "switch already moved"))
            logger.warning("skipping %s: switch already moved", trip)
            continue
        loads = load_vector(current, params, load_mode)
        alpha = float(current.flow_rates[i])
        if loads[n] + alpha * current.hops_sc[i, n] > current.capacities[n]:
            skipped.append(SkippedTriplet(trip, "target over capacity"))
            logger.warning("skipping %s: target over capacity", trip)
            continue
        try:
            nxt = current.reassign(trip.switch, trip.immigration)
        except StateError as exc:
            skipped.append(SkippedTriplet(trip, str(exc)))
            logger.warning("skipping %s: %s", trip, exc)
            continue
        post = load_vector(nxt, params, load_mode)
        executed.append(
            ExecutedTriplet(
                triplet=trip,
                pre_loads=tuple(float(x) for x in loads),
                post_loads=tuple(float(x) for x in post),
            )
        )
        current = nxt
    return current, tuple(executed), tuple(skipped)


def rebalance(state: NetworkState, load_params: LoadModelParams,
              planner_params: PlannerParams, *, load_mode: str = "full",
              max_rounds: int = DEFAULT_MAX_ROUNDS, zero_load: str = "error",
              lambda_scale: float = 1.0,
              rng: random.Random | None = None):
    """Iterate detect -> plan -> execute until balanced, stalled, or out of
    rounds. Returns (final_state, RebalanceReport).

    Stall cases: a nonempty trigger set with an empty plan, a plan whose
    every triplet was skipped, or a round that failed to strictly reduce the
    load variance (that round is rolled back before stopping). The reverse
    of a move committed in round r is barred in round r + 1.
    """
    if max_rounds < 1:
        raise ValueError("max_rounds must be >= 1")
    if rng is None:
        rng = random.Random(planner_params.seed)

    current = state
    executed: list[ExecutedTriplet] = []
    skipped: list[SkippedTriplet] = []
    variance_history = [variance_before(load_vector(current, load_params, load_mode))]
    rounds = 0
    stall_reason: str | None = None
    barred: frozenset = frozenset()

    for _ in range(max_rounds):
        det = detect(current, load_params, load_mode=load_mode,
                     zero_load=zero_load, lambda_scale=lambda_scale)
        if det.balanced:
            break
        round_plan = plan(current, load_params, planner_params, det,
                          load_mode=load_mode, rng=rng, barred=barred)
        if not round_plan:
            stall_reason = "no feasible migration"
            break
        trial, trial_exec, trial_skip = execute_plan(
            current, round_plan, load_params, load_mode
        )
        skipped.extend(trial_skip)
        if not trial_exec:
            stall_reason = "every planned migration was skipped"
            break
        var_now = variance_history[-1]
        var_next = variance_before(load_vector(trial, load_params, load_mode))
        if var_next >= var_now:
            stall_reason = "round would not reduce load variance"
            break
        current = trial
        executed.extend(trial_exec)
        variance_history.append(var_next)
        rounds += 1
        barred = frozenset(
            (ex.triplet.switch, ex.triplet.emigration) for ex in trial_exec
        )

    final_det = detect(current, load_params, load_mode=load_mode,
                       zero_load=zero_load, lambda_scale=lambda_scale)
    report = RebalanceReport(
        rounds=rounds,
        executed=tuple(executed),
        skipped=tuple(skipped),
        total_cost=sum(ex.triplet.cost for ex in executed),
        final_lambda=final_det.threshold,
        balanced=final_det.balanced,
        stall_reason=stall_reason,
        variance_history=tuple(variance_history),
    )
    return current, report
