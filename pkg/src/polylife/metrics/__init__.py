"""Post-hoc analysis: ratios, spread, capacity, clustering."""

from .areas import (
    BlockArea,
    binned_forgetting,
    block_areas,
    forgetting_ratio,
    paired_forgetting_rows,
    paired_transfer_rows,
    transfer_ratio,
    uniform_random_areas,
)
from .capacity import (
    CapacityTable,
    brute_force_capacity_scan,
    empirical_task_capacity,
    integrated_task_capacity,
)
from .clusters import (
    LINKAGE_THRESHOLD,
    ClusterPoint,
    ClusterResult,
    cluster_point_from_stats,
    cluster_tasks,
)
from .spread import epsilon_greedy_distribution, policy_spread, total_variation
from .theory import POLYNOMIAL_TARGETS, linear_fit_expected_error

__all__ = [
    "LINKAGE_THRESHOLD",
    "POLYNOMIAL_TARGETS",
    "BlockArea",
    "CapacityTable",
    "ClusterPoint",
    "ClusterResult",
    "binned_forgetting",
    "block_areas",
    "brute_force_capacity_scan",
    "cluster_point_from_stats",
    "cluster_tasks",
    "empirical_task_capacity",
    "epsilon_greedy_distribution",
    "forgetting_ratio",
    "integrated_task_capacity",
    "linear_fit_expected_error",
    "paired_forgetting_rows",
    "paired_transfer_rows",
    "policy_spread",
    "total_variation",
    "transfer_ratio",
    "uniform_random_areas",
]
