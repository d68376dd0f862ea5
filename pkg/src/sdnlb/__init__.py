"""sdnlb: deterministic multi-controller SDN load-balancing simulator and
switch-migration planner."""

from .detection import DetectionResult, TriggerRecord, detect, load_difference_matrix, threshold
from .executor import ExecutedTriplet, RebalanceReport, execute_plan, rebalance
from .kernels import BACKEND as KERNEL_BACKEND
from .load_model import (
    LoadBreakdown,
    LoadModelParams,
    controller_load,
    data_interaction_overhead,
    load_vector,
    routing_overhead,
    simplified_load,
    state_sync_overhead,
)
from .planner import (
    MigrationPlan,
    MigrationTriplet,
    PlannerParams,
    emigration_controllers,
    immigration_score,
    migration_cost,
    migration_efficiency,
    plan,
    select_immigration_exhaustive,
    select_immigration_sa,
    select_switch,
    simplified_migration_cost,
    switch_selection_score,
    variance_after,
    variance_before,
)
from .scenario import ScenarioConfig, load_scenario
from .sim import MetricsRecord, TrafficTrace, generate_trace, lbr, run
from .state import ControllerRecord, NetworkState, SwitchRecord, new_state, reassign, switches_of
from .strategies import StrategyKind, step_csm, step_easm, step_musm, step_nsm
from .topology import Topology, all_pairs_hops, builtin_os3e, parse_graphml

__version__ = "0.1.0"
