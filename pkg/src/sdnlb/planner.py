"""Migration planning: pick emigration controllers, the switch each one
gives up, and the immigration controller that receives it.

The planning objective is migration efficiency: absolute change in the
population variance of controller loads per unit migration cost. Hypothetical
post-move loads follow the hop-weighted update (source loses alpha * hop to
source, target gains alpha * hop to target). Switch choice combines best
efficiency, how close the move brings the source to the mean load, and a
preference for far switches; target choice combines residual capacity and
efficiency, optionally searched with simulated annealing over planner seeds.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass

import numpy as np

from . import kernels
from .detection import DetectionResult
from .errors import ParameterError, PlannerError
from .load_model import LoadModelParams, load_vector
from .state import NetworkState

PLANNER_MODES = ("sa", "exhaustive")


@dataclass(frozen=True)
class PlannerParams:
    """Planner knobs.

    gamma            weight of residual capacity versus efficiency in target
                     scoring, in [0, 1]
    t0               initial annealing temperature, > 0
    max_temp_change  annealing iteration budget, >= 1
    seed             RNG seed; all planner randomness derives from it
    mode             "sa" or "exhaustive"
    """

    gamma: float = 0.5
    t0: float = 1.0
    max_temp_change: int = 100
    seed: int = 0
    mode: str = "sa"

    def __post_init__(self):
        if not 0.0 <= self.gamma <= 1.0:
            raise ParameterError("gamma must be within [0, 1]")
        if self.t0 <= 0:
            raise ParameterError("t0 must be > 0")
        if self.max_temp_change < 1:
            raise ParameterError("max_temp_change must be >= 1")
        if self.mode not in PLANNER_MODES:
            raise ParameterError(
                f"unknown planner mode {self.mode!r}; expected {PLANNER_MODES}"
            )


@dataclass(frozen=True)
class MigrationTriplet:
    """One committed migration mapping."""

    emigration: str
    switch: str
    immigration: str
    cost: float
    efficiency: float


@dataclass(frozen=True)
class MigrationPlan:
    triplets: tuple[MigrationTriplet, ...]
    warnings: tuple[str, ...] = ()

    @property
    def total_cost(self) -> float:
        return sum(t.cost for t in self.triplets)

    def __bool__(self) -> bool:
        return bool(self.triplets)


# -- cost and efficiency primitives ---------------------------------------


def migration_cost(state: NetworkState, params: LoadModelParams, switch: str,
                   source: str, target: str) -> float:
    """Migrating-request overhead plus hop-weighted load change, KB/s."""
    i = state.switch_index(switch)
    m = state.controller_index(source)
    n = state.controller_index(target)
    if state.master_idx[i] != m:
        raise PlannerError(f"switch {switch!r} is not mastered by {source!r}")
    if m == n:
        raise PlannerError("source and target controller must differ")
    alpha = float(state.flow_rates[i])
    return float(params.p_packet_kb
                 + alpha * abs(state.hops_sc[i, n] - state.hops_sc[i, m]))


def simplified_migration_cost(state: NetworkState, switch: str, target: str) -> float:
    """Flow rate times hop count to the target controller, KB/s."""
    i = state.switch_index(switch)
    n = state.controller_index(target)
    return float(state.flow_rates[i]) * float(state.hops_sc[i, n])


def variance_before(loads) -> float:
    """Population variance of the load vector, (KB/s)^2."""
    loads = np.asarray(loads, dtype=np.float64)
    if loads.ndim != 1 or loads.size == 0:
        raise PlannerError("loads must be a non-empty vector")
    values = loads.tolist()
    m = len(values)
    total = 0.0
    for v in values:
        total += v
    mean = total / m
    acc = 0.0
    for v in values:
        d = v - mean
        acc += d * d
    return acc / m


def _hypothetical_loads(state, loads, switch, source, target):
    i = state.switch_index(switch)
    m = state.controller_index(source)
    n = state.controller_index(target)
    if state.master_idx[i] != m:
        raise PlannerError(f"switch {switch!r} is not mastered by {source!r}")
    if m == n:
        raise PlannerError("source and target controller must differ")
    alpha = float(state.flow_rates[i])
    updated = np.array(loads, dtype=np.float64, copy=True)
    updated[m] = updated[m] - alpha * state.hops_sc[i, m]
    updated[n] = updated[n] + alpha * state.hops_sc[i, n]
    return updated


def variance_after(state: NetworkState, params: LoadModelParams, switch: str,
                   source: str, target: str, load_mode: str = "full") -> float:
    """Variance after the hypothetical hop-weighted load update of one move."""
    loads = load_vector(state, params, load_mode)
    return variance_before(_hypothetical_loads(state, loads, switch, source, target))


def migration_efficiency(state: NetworkState, params: LoadModelParams, switch: str,
                         source: str, target: str, load_mode: str = "full") -> float:
    """Absolute variance change per unit migration cost."""
    loads = load_vector(state, params, load_mode)
    before = variance_before(loads)
    after = variance_before(_hypothetical_loads(state, loads, switch, source, target))
    return abs(after - before) / migration_cost(state, params, switch, source, target)


# -- emigration controllers ------------------------------------------------


def emigration_controllers(detection: DetectionResult) -> tuple[str, ...]:
    """Higher-loaded controller of each trigger, deduplicated, ordered by
    descending load (ties by controller declaration order)."""
    nodes = []
    for rec in detection.triggers:
        if rec.overloaded not in nodes:
            nodes.append(rec.overloaded)
    return tuple(
        sorted(nodes, key=lambda n: (-detection.load_of(n),
                                     detection.controllers.index(n)))
    )


# -- selection scores -------------------------------------------------------


def _softmax_weights(hops_to_master):
    """exp(hop) weights over a controller's own switches, overflow-safe."""
    hmax = max(hops_to_master)
    expd = [math.exp(h - hmax) for h in hops_to_master]
    total = sum(expd)
    return [e / total for e in expd]


@dataclass(frozen=True)
class _SwitchCandidate:
    """Scored migration options for one switch of the emigration controller."""

    switch: str
    index: int
    rho: float
    tau_best: float
    targets: tuple[int, ...]       # feasible controller indices
    tau: np.ndarray                # per-controller efficiency (NaN at source)
    closest_target_hops: float


def _scan_switches(state, loads, params, source_idx, *, claimed=frozenset(),
                   barred=frozenset(), promised=None):
    """Score every switch of one emigration controller.

    Feasibility of a target accounts for hypothetical loads already promised
    to it earlier in the same plan and for barred (switch, target) pairs.
    """
    domain = [
        i for i in range(state.n_switches) if state.master_idx[i] == source_idx
    ]
    if not domain:
        return []

    mean = float(np.sum(loads)) / state.n_controllers
    hops_to_master = [float(state.hops_sc[i, source_idx]) for i in domain]
    weights = _softmax_weights(hops_to_master)

    out = []
    for pos, i in enumerate(domain):
        node = state.switch_nodes[i]
        if node in claimed:
            continue
        alpha = float(state.flow_rates[i])
        hops_i = state.hops_sc[i]
        tau, _cost, _va = kernels.candidate_efficiencies(
            np.ascontiguousarray(loads), source_idx, alpha,
            np.ascontiguousarray(hops_i), params.p_packet_kb,
        )
        targets = []
        for n in range(state.n_controllers):
            if n == source_idx:
                continue
            if (node, state.controller_nodes[n]) in barred:
                continue
            extra = promised.get(n, 0.0) if promised else 0.0
            if loads[n] + extra + alpha * hops_i[n] <= state.capacities[n]:
                targets.append(n)

        if targets:
            tau_best = max(float(tau[n]) for n in targets)
            closeness = 1.0 / (
                1.0 + abs(mean - (float(loads[source_idx]) - alpha * hops_i[source_idx]))
            )
            rho = tau_best * closeness * weights[pos]
            closest = min(float(hops_i[n]) for n in targets)
        else:
            tau_best = 0.0
            rho = 0.0
            closest = math.inf
        out.append(
            _SwitchCandidate(
                switch=node, index=i, rho=rho, tau_best=tau_best,
                targets=tuple(targets), tau=tau, closest_target_hops=closest,
            )
        )
    return out


def switch_selection_score(state: NetworkState, load_params: LoadModelParams,
                           planner_params: PlannerParams, source: str,
                           switch: str, load_mode: str = "full") -> float:
    """Selection score of one switch: best efficiency over feasible targets,
    times closeness of the source's post-move load to the mean, times the
    softmax weight of the switch's hop distance among its domain.

    Zero when the switch has no feasible immigration target.
    """
    del planner_params  # the score has no tunables; kept for signature parity
    m = state.controller_index(source)
    i = state.switch_index(switch)
    if state.master_idx[i] != m:
        raise PlannerError(f"switch {switch!r} is not mastered by {source!r}")
    loads = load_vector(state, load_params, load_mode)
    for cand in _scan_switches(state, loads, load_params, m):
        if cand.index == i:
            return cand.rho
    raise PlannerError(f"switch {switch!r} not found in domain of {source!r}")


def select_switch(state: NetworkState, load_params: LoadModelParams,
                  planner_params: PlannerParams, source: str,
                  load_mode: str = "full", rng: random.Random | None = None) -> str:
    """Deterministic argmax of the switch selection score.

    Exact ties prefer the switch whose closest feasible target is fewest hops
    away, then fall back to a seeded-uniform choice.
    """
    m = state.controller_index(source)
    if rng is None:
        rng = random.Random(planner_params.seed)
    loads = load_vector(state, load_params, load_mode)
    cands = _scan_switches(state, loads, load_params, m)
    if not cands:
        raise PlannerError(f"controller {source!r} has no switches to migrate")
    best = _pick_switch(cands, rng)
    return best.switch


def _pick_switch(cands, rng):
    top = max(c.rho for c in cands)
    tied = [c for c in cands if c.rho == top]
    if len(tied) > 1:
        closest = min(c.closest_target_hops for c in tied)
        tied = [c for c in tied if c.closest_target_hops == closest]
    if len(tied) > 1:
        return rng.choice(tied)
    return tied[0]


# -- immigration controller selection ---------------------------------------


def _minmax(values):
    lo, hi = min(values), max(values)
    if hi == lo:
        return [1.0] * len(values)
    return [(v - lo) / (hi - lo) for v in values]


def _immigration_scores(state, loads, gamma, switch_idx, candidate_idx, tau):
    """Normalized weighted score per candidate: gamma * residual capacity +
    (1 - gamma) * efficiency, each min-max normalized over the candidates."""
    alpha = float(state.flow_rates[switch_idx])
    resid = [
        float(state.capacities[n]) - float(loads[n]) - alpha for n in candidate_idx
    ]
    taus = [float(tau[n]) for n in candidate_idx]
    resid_n = _minmax(resid)
    tau_n = _minmax(taus)
    return [gamma * r + (1.0 - gamma) * t for r, t in zip(resid_n, tau_n)]


def feasible_immigration_targets(state: NetworkState, params: LoadModelParams,
                                 switch: str, load_mode: str = "full") -> tuple[str, ...]:
    """Controllers that can absorb the switch without exceeding capacity."""
    i = state.switch_index(switch)
    m = int(state.master_idx[i])
    loads = load_vector(state, params, load_mode)
    alpha = float(state.flow_rates[i])
    out = []
    for n in range(state.n_controllers):
        if n == m:
            continue
        if loads[n] + alpha * state.hops_sc[i, n] <= state.capacities[n]:
            out.append(state.controller_nodes[n])
    return tuple(out)


def immigration_score(state: NetworkState, load_params: LoadModelParams,
                      planner_params: PlannerParams, switch: str, target: str,
                      load_mode: str = "full") -> float:
    """Score of one feasible target, normalized over the feasible set."""
    i = state.switch_index(switch)
    m = int(state.master_idx[i])
    n = state.controller_index(target)
    loads = load_vector(state, load_params, load_mode)
    feas = feasible_immigration_targets(state, load_params, switch, load_mode)
    if target not in feas:
        raise PlannerError(
            f"controller {target!r} is not a feasible target for {switch!r}"
        )
    candidate_idx = [state.controller_index(c) for c in feas]
    tau, _, _ = kernels.candidate_efficiencies(
        np.ascontiguousarray(loads), m, float(state.flow_rates[i]),
        np.ascontiguousarray(state.hops_sc[i]), load_params.p_packet_kb,
    )
    scores = _immigration_scores(
        state, loads, planner_params.gamma, i, candidate_idx, tau
    )
    return scores[candidate_idx.index(n)]


def _pick_target(candidate_idx, scores, hops_i, rng):
    """argmax score; exact ties prefer the closest target, then seeded-uniform."""
    top = max(scores)
    tied = [n for n, s in zip(candidate_idx, scores) if s == top]
    if len(tied) > 1:
        closest = min(float(hops_i[n]) for n in tied)
        tied = [n for n in tied if float(hops_i[n]) == closest]
    if len(tied) > 1:
        return rng.choice(tied)
    return tied[0]


def _sa_pick(candidate_idx, scores, hops_i, params: PlannerParams, rng):
    """Simulated annealing over the discrete candidate set.

    Walks with a cooling schedule t_k = t0 / (k + 1); an improving mutation is
    always accepted, a worsening one with Metropolis probability exp(delta/t).
    Returns the best-scoring candidate seen (ties resolved like the
    exhaustive picker)."""
    k_candidates = len(candidate_idx)
    if k_candidates == 1:
        return candidate_idx[0]

    cur = rng.randrange(k_candidates)
    visited = {cur}
    for k in range(params.max_temp_change):
        t_k = params.t0 / (k + 1)
        step = rng.randrange(k_candidates - 1)
        mut = step if step < cur else step + 1  # uniform over the others
        visited.add(mut)
        if scores[mut] > scores[cur]:
            cur = mut
        else:
            delta = scores[mut] - scores[cur]
            omega = rng.random()
            if math.exp(delta / t_k) > omega:
                cur = mut

    idx = sorted(visited)
    return _pick_target(
        [candidate_idx[j] for j in idx], [scores[j] for j in idx], hops_i, rng
    )


def select_immigration_sa(state: NetworkState, load_params: LoadModelParams,
                          planner_params: PlannerParams, switch: str,
                          candidates, load_mode: str = "full",
                          rng: random.Random | None = None) -> str:
    """Annealing-based target choice among the given feasible candidates."""
    return _select_immigration(state, load_params, planner_params, switch,
                               candidates, load_mode, rng, mode="sa")


def select_immigration_exhaustive(state: NetworkState, load_params: LoadModelParams,
                                  planner_params: PlannerParams, switch: str,
                                  candidates, load_mode: str = "full",
                                  rng: random.Random | None = None) -> str:
    """Exact argmax target choice among the given feasible candidates."""
    return _select_immigration(state, load_params, planner_params, switch,
                               candidates, load_mode, rng, mode="exhaustive")


def _select_immigration(state, load_params, planner_params, switch, candidates,
                        load_mode, rng, mode):
    candidates = list(candidates)
    if not candidates:
        raise PlannerError(f"no immigration target for switch {switch!r}")
    if rng is None:
        rng = random.Random(planner_params.seed)
    i = state.switch_index(switch)
    m = int(state.master_idx[i])
    candidate_idx = [state.controller_index(c) for c in candidates]
    if m in candidate_idx:
        raise PlannerError("the current master cannot be an immigration target")
    loads = load_vector(state, load_params, load_mode)
    tau, _, _ = kernels.candidate_efficiencies(
        np.ascontiguousarray(loads), m, float(state.flow_rates[i]),
        np.ascontiguousarray(state.hops_sc[i]), load_params.p_packet_kb,
    )
    scores = _immigration_scores(
        state, loads, planner_params.gamma, i, candidate_idx, tau
    )
    hops_i = state.hops_sc[i]
    if mode == "sa":
        n = _sa_pick(candidate_idx, scores, hops_i, planner_params, rng)
    else:
        n = _pick_target(candidate_idx, scores, hops_i, rng)
    return state.controller_nodes[n]


# -- full planning pass ------------------------------------------------------


def plan(state: NetworkState, load_params: LoadModelParams,
         planner_params: PlannerParams, detection: DetectionResult, *,
         load_mode: str = "full", rng: random.Random | None = None,
         barred=frozenset()) -> MigrationPlan:
    """One triplet per emigration controller, most loaded first.

    A switch already claimed by an earlier triplet is skipped, and targets
    account for loads promised earlier in the same plan. Controllers for
    which no feasible move exists contribute a warning instead of a triplet.
    """
    if rng is None:
        rng = random.Random(planner_params.seed)
    loads = detection.loads
    triplets = []
    warnings = []
    claimed: set[str] = set()
    promised: dict[int, float] = {}

    for source in emigration_controllers(detection):
        m = state.controller_index(source)
        cands = _scan_switches(state, loads, load_params, m, claimed=claimed,
                               barred=barred, promised=promised)
        cands = [c for c in cands if c.targets]
        if not cands:
            warnings.append(f"no feasible migration for controller {source}")
            continue
        chosen = _pick_switch(cands, rng)
        scores = _immigration_scores(
            state, loads, planner_params.gamma, chosen.index,
            list(chosen.targets), chosen.tau,
        )
        hops_i = state.hops_sc[chosen.index]
        if planner_params.mode == "sa":
            n = _sa_pick(list(chosen.targets), scores, hops_i, planner_params, rng)
        else:
            n = _pick_target(list(chosen.targets), scores, hops_i, rng)

        target = state.controller_nodes[n]
        if load_mode == "simplified":
            cost = simplified_migration_cost(state, chosen.switch, target)
        else:
            cost = migration_cost(state, load_params, chosen.switch, source, target)
        triplets.append(
            MigrationTriplet(
                emigration=source, switch=chosen.switch, immigration=target,
                cost=cost, efficiency=float(chosen.tau[n]),
            )
        )
        claimed.add(chosen.switch)
        alpha = float(state.flow_rates[chosen.index])
        promised[n] = promised.get(n, 0.0) + alpha * float(hops_i[n])

    return MigrationPlan(tuple(triplets), tuple(warnings))
