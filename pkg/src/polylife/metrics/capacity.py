"""Empirical task capacity and its tolerance-integrated variant.

Capacity is measured against the one-to-one condition (one policy per task):
N_pi* is the smallest library size whose lifetime average reaches
(1 - eps_c) of the one-to-one performance, and C_emp = n_tau / N_pi*.
Integrating C_emp over eps_c in [0, 1] gives a threshold-free benchmark
number; the integrand is piecewise constant with breakpoints at
1 - R(N_pi)/R_one_to_one, so the integral is computed exactly.
"""

from __future__ import annotations

from dataclasses import dataclass

from ..exceptions import AnalysisError


@dataclass(frozen=True)
class CapacityTable:
    entries: dict[int, float]  # library size -> lifetime average performance
    one_to_one: int  # library size of the reference condition

    def __post_init__(self):
        if not self.entries:
            raise AnalysisError("capacity table is empty")
        if self.one_to_one not in self.entries:
            raise AnalysisError("capacity table lacks the 1-to-1 entry")
        if self.entries[self.one_to_one] <= 0:
            raise AnalysisError("1-to-1 reference performance must be positive")

    @property
    def reference(self) -> float:
        return self.entries[self.one_to_one]


def empirical_task_capacity(
    table: CapacityTable, n_tau: int, eps_c: float = 0.05
) -> tuple[float, int]:
    """Returns (C_emp, N_pi*) at tolerance eps_c.

    If no condition qualifies, the 1-to-1 size is used (it always satisfies
    the rule at eps_c >= 0, so this only matters for malformed tables).
    """
    threshold = (1.0 - eps_c) * table.reference
    qualifying = [n for n, perf in table.entries.items() if perf >= threshold]
    n_star = min(qualifying) if qualifying else table.one_to_one
    return n_tau / n_star, n_star


def capacity_breakpoints(table: CapacityTable) -> list[tuple[float, int]]:
    """(eps, n_pi) pairs: the tolerance at which each library size starts to
    qualify, clipped to [0, 1]."""
    ref = table.reference
    points = []
    for n, perf in sorted(table.entries.items()):
        eps = 1.0 - perf / ref
        points.append((min(max(eps, 0.0), 1.0), n))
    return points


def integrated_task_capacity(table: CapacityTable, n_tau: int) -> float:
    """Exact piecewise-constant integral of C_emp(eps_c) over eps_c in [0, 1]."""
    points = capacity_breakpoints(table)
    edges = sorted({0.0, 1.0, *(eps for eps, _ in points)})
    total = 0.0
    for lo, hi in zip(edges, edges[1:]):
        qualifying = [n for eps, n in points if eps <= lo]
        if not qualifying:
            raise AnalysisError("no qualifying entry; table reference is inconsistent")
        total += (hi - lo) * n_tau / min(qualifying)
    return total


def brute_force_capacity_scan(
    table: CapacityTable, n_tau: int, eps_c: float
) -> tuple[float, int]:
    """Independent oracle: scan every entry instead of min-selection."""
    best = None
    for n, perf in table.entries.items():
        if perf >= (1.0 - eps_c) * table.reference and (best is None or n < best):
            best = n
    if best is None:
        best = table.one_to_one
    return n_tau / best, best
