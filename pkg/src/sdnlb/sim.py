"""Time-stepped experiments: synthetic traffic traces, per-step strategy
invocation, and metric recording.

Every run is a pure function of (scenario, seed): traces are precomputed
from a seeded generator, and each strategy draws from its own RNG derived
from the run seed, so runs are reproducible bit for bit.
"""

from __future__ import annotations

import hashlib
import math
import random
from dataclasses import dataclass

import numpy as np

from .errors import ParameterError, SdnlbError
from .load_model import LoadModelParams, load_vector
from .planner import PlannerParams, variance_before
from .state import NetworkState
from .strategies import StrategyKind, strategy_step

TRACE_KINDS = ("constant", "uniform-walk", "spike")

# Reported when a controller sits at or beyond capacity.
SATURATED = math.inf


@dataclass(frozen=True)
class TrafficTrace:
    """Per-step, per-switch flow rates, KB/s. Fully determined by
    (kind, params, seed)."""

    kind: str
    seed: int
    rates: np.ndarray  # shape (steps, n_switches)

    @property
    def steps(self) -> int:
        return int(self.rates.shape[0])


@dataclass(frozen=True)
class MetricsRecord:
    step: int
    loads: tuple[float, ...]
    lbr: float
    migration_cost_step: float
    cumulative_cost: float
    migrations_count: int
    rounds: int
    response_proxy: float
    throughput_proxy: float
    error: str = ""


def derive_seed(base: int, *parts) -> int:
    """Stable sub-seed derivation (hashlib, not hash(), for reproducibility)."""
    text = f"{base}|" + "|".join(str(p) for p in parts)
    digest = hashlib.blake2b(text.encode(), digest_size=8).digest()
    return int.from_bytes(digest, "big")


def lbr(loads) -> float:
    """Load balancing rate: 1 - (population std / mean), clamped to [0, 1].

    1 means perfectly even loads; the metric is invariant to scaling all
    loads by the same positive constant.
    """
    loads = np.asarray(loads, dtype=np.float64)
    if loads.ndim != 1 or loads.size == 0:
        raise ParameterError("loads must be a non-empty vector")
    if (loads < 0).any():
        raise ParameterError("loads must be non-negative")
    mean = float(loads.sum()) / loads.size
    if mean <= 0:
        raise ParameterError("mean load must be positive")
    std = math.sqrt(variance_before(loads))
    return min(1.0, max(0.0, 1.0 - std / mean))


def generate_trace(kind: str, steps: int, seed: int, *, base_rates=None,
                   n_switches: int | None = None, mean: float = 200.0,
                   band: tuple[float, float] = (100.0, 300.0),
                   step_size: float = 20.0, spike_factor: float = 4.0,
                   spike_every: int = 50, spike_duration: int = 5) -> TrafficTrace:
    """Build a deterministic traffic trace.

    constant      every step repeats base_rates.
    uniform-walk  per-switch random walk with uniform +/- step_size moves,
                  reflected into band (band must straddle its own midpoint
                  start, so the long-run mean sits at the band center).
    spike         base_rates, with one random switch multiplied by
                  spike_factor for spike_duration steps every spike_every
                  steps.
    """
    if steps < 1:
        raise ParameterError("steps must be >= 1")
    if kind not in TRACE_KINDS:
        raise ParameterError(f"unknown trace kind {kind!r}; expected {TRACE_KINDS}")

    if base_rates is not None:
        base = np.asarray(base_rates, dtype=np.float64)
        n = base.size
    else:
        if n_switches is None:
            raise ParameterError("base_rates or n_switches is required")
        n = n_switches
        base = np.full(n, mean, dtype=np.float64)

    rng = np.random.default_rng(seed)

    if kind == "constant":
        rates = np.tile(base, (steps, 1))
    elif kind == "uniform-walk":
        lo, hi = band
        if not 0 <= lo < hi:
            raise ParameterError(f"invalid band {band!r}")
        rates = np.empty((steps, n), dtype=np.float64)
        cur = np.full(n, (lo + hi) / 2.0)
        for t in range(steps):
            cur = cur + rng.uniform(-step_size, step_size, size=n)
            cur = _reflect(cur, lo, hi)
            rates[t] = cur
    else:  # spike
        if spike_every < 1 or spike_duration < 1 or spike_factor <= 0:
            raise ParameterError("spike parameters must be positive")
        rates = np.tile(base, (steps, 1))
        for start in range(0, steps, spike_every):
            hot = int(rng.integers(0, n))
            stop = min(start + spike_duration, steps)
            rates[start:stop, hot] *= spike_factor

    return TrafficTrace(kind=kind, seed=seed, rates=rates)


def _reflect(values, lo, hi):
    span = hi - lo
    period = 2.0 * span
    x = np.mod(values - lo, period)
    x = np.where(x > span, period - x, x)
    return lo + x


def run(state: NetworkState, kind: StrategyKind, trace: TrafficTrace,
        load_params: LoadModelParams, planner_params: PlannerParams, *,
        load_mode: str = "full", zero_load: str = "error",
        lambda_scale: float = 1.0, seed: int = 0,
        check_invariants: bool = False) -> list[MetricsRecord]:
    """Drive one strategy over a trace, recording one metrics row per step.

    A strategy error at some step is recorded in that row and the run
    continues with the unmodified state.
    """
    if trace.rates.shape[1] != state.n_switches:
        raise ParameterError(
            f"trace covers {trace.rates.shape[1]} switches, "
            f"state has {state.n_switches}"
        )
    rng = random.Random(derive_seed(seed, kind.value))
    records: list[MetricsRecord] = []
    cumulative = 0.0
    current = state

    for t in range(trace.steps):
        current = current.with_flow_rates(trace.rates[t])
        step_alpha = float(current.flow_rates.sum())
        error = ""
        report = None
        try:
            current, report = strategy_step(
                kind, current, load_params, planner_params, rng,
                load_mode=load_mode, zero_load=zero_load,
                lambda_scale=lambda_scale,
            )
        except SdnlbError as exc:
            error = str(exc)

        if check_invariants:
            # migrations only move mastership; switches and rates never change
            _assert_partition(current)
            assert abs(float(current.flow_rates.sum()) - step_alpha) < 1e-9

        loads = load_vector(current, load_params, load_mode)
        cost = report.cost if report else 0.0
        cumulative += cost
        records.append(
            MetricsRecord(
                step=t,
                loads=tuple(float(x) for x in loads),
                lbr=lbr(loads),
                migration_cost_step=cost,
                cumulative_cost=cumulative,
                migrations_count=len(report.migrations) if report else 0,
                rounds=report.rounds if report else 0,
                response_proxy=_response_proxy(loads, current.capacities),
                throughput_proxy=_throughput_proxy(loads, current.capacities),
                error=error,
            )
        )
    return records


def _response_proxy(loads, capacities) -> float:
    """Mean inverse capacity headroom; saturates to inf at or over capacity.

    Diagnostic only: a rough stand-in for response time, never an
    acceptance target.
    """
    total = 0.0
    for load, cap in zip(loads, capacities):
        if load >= cap:
            return SATURATED
        total += 1.0 / (cap - load)
    return total / len(capacities)


def _throughput_proxy(loads, capacities) -> float:
    """Sum of capacity-clipped loads. Diagnostic only."""
    return float(sum(min(float(l), float(c)) for l, c in zip(loads, capacities)))


def _assert_partition(state: NetworkState):
    union: set[str] = set()
    count = 0
    for c in state.controller_nodes:
        part = state.gamma(c)
        count += len(part)
        union.update(part)
    assert count == state.n_switches and union == set(state.switch_nodes)
