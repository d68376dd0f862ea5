"""Load-imbalance detection.

Builds the pairwise load-ratio matrix, derives the trigger threshold from its
spread, and emits one trigger record per unordered controller pair whose
trigger factor exceeds the threshold. All arithmetic is full precision;
ratios make the whole mechanism invariant to scaling every load by the same
positive constant.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DetectionError, ParameterError
from .load_model import LoadModelParams, load_vector
from .state import NetworkState

ZERO_LOAD_POLICIES = ("error", "epsilon")

# Floor substituted for zero loads in "epsilon" mode, KB/s.
ZERO_LOAD_EPSILON = 1e-6


@dataclass(frozen=True)
class TriggerRecord:
    """One triggered pair: the higher-loaded controller first."""

    overloaded: str
    underloaded: str
    factor: float


@dataclass(frozen=True)
class DetectionResult:
    controllers: tuple[str, ...]
    loads: np.ndarray
    matrix: np.ndarray
    threshold: float
    triggers: tuple[TriggerRecord, ...]

    @property
    def balanced(self) -> bool:
        return not self.triggers

    def load_of(self, controller: str) -> float:
        return float(self.loads[self.controllers.index(controller)])


def load_difference_matrix(loads) -> np.ndarray:
    """Pairwise ratio matrix: entry (m, n) is loads[m] / loads[n]."""
    loads = np.asarray(loads, dtype=np.float64)
    if loads.ndim != 1 or loads.size == 0:
        raise DetectionError("loads must be a non-empty vector")
    if (loads <= 0).any():
        bad = [int(i) for i in np.flatnonzero(loads <= 0)]
        raise DetectionError(
            f"degenerate loads at controller indices {bad}: ratios need "
            f"strictly positive loads (epsilon mode substitutes a floor)"
        )
    return loads[:, None] / loads[None, :]


def threshold(matrix: np.ndarray) -> float:
    """Trigger threshold: relative spread (max - min) / max of the matrix."""
    if matrix.size == 0:
        raise DetectionError("empty load difference matrix")
    hi = float(matrix.max())
    lo = float(matrix.min())
    return (hi - lo) / hi


def detect(state: NetworkState, params: LoadModelParams, *,
           load_mode: str = "full", zero_load: str = "error",
           lambda_scale: float = 1.0) -> DetectionResult:
    """Compute loads, the ratio matrix, the threshold, and the trigger set.

    Unordered controller pairs are scanned once in index order; a pair whose
    trigger factor strictly exceeds the (optionally scaled) threshold
    contributes one record, higher-loaded controller first. An empty trigger
    set means the loads count as balanced.
    """
    if zero_load not in ZERO_LOAD_POLICIES:
        raise ParameterError(
            f"unknown zero_load policy {zero_load!r}; expected {ZERO_LOAD_POLICIES}"
        )
    if lambda_scale < 1.0:
        raise ParameterError("lambda_scale must be >= 1.0")

    loads = load_vector(state, params, load_mode)
    ratio_input = loads
    if zero_load == "epsilon":
        ratio_input = np.maximum(loads, ZERO_LOAD_EPSILON)

    matrix = load_difference_matrix(ratio_input)
    lam = threshold(matrix) * lambda_scale

    records = []
    n = state.n_controllers
    for m in range(n):
        for k in range(m + 1, n):
            delta = abs(float(matrix[m, k]) - float(matrix[k, m]))
            if delta > lam:
                hi, lo = (m, k) if ratio_input[m] > ratio_input[k] else (k, m)
                records.append(
                    TriggerRecord(
                        overloaded=state.controller_nodes[hi],
                        underloaded=state.controller_nodes[lo],
                        factor=delta,
                    )
                )
    return DetectionResult(
        controllers=state.controller_nodes, loads=loads, matrix=matrix,
        threshold=lam, triggers=tuple(records),
    )
