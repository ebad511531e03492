"""Rectangular minimum-cost assignment with forbidden entries.

Forbidden entries are marked with ``INFEASIBLE`` (``inf``). They are replaced
by one large finite cost before solving, so the solver first maximizes the
number of feasible pairs and then minimizes their total cost; pairs landing
on a forbidden entry are dropped from the result.
"""
from __future__ import annotations

import numpy as np
from scipy.optimize import linear_sum_assignment

INFEASIBLE = float("inf")


def _padding_cost(feasible: np.ndarray, n: int) -> float:
    span = float(np.max(np.abs(feasible))) if feasible.size else 0.0
    # any extra forbidden pair must outweigh the largest possible swing of the feasible part
    return (2 * n + 1) * span + 1.0


def solve_assignment(costs) -> list[tuple[int, int]]:
    """Return ``(row, col)`` pairs of a min-cost matching, sorted by row.

    Only feasible (finite) entries are returned; the matching has the largest
    achievable number of feasible pairs and, among those, the least cost.
    """
    m = np.asarray(costs, dtype=np.float64)
    if m.ndim != 2:
        raise ValueError(f"cost matrix must be 2-D, got shape {m.shape}")
    rows, cols = m.shape
    if rows == 0 or cols == 0:
        return []
    forbidden = ~np.isfinite(m)
    if np.isnan(m).any() or np.isneginf(m).any():
        raise ValueError("cost matrix holds NaN or -inf")
    if forbidden.all():
        return []
    work = m
    if forbidden.any():
        work = m.copy()
        work[forbidden] = _padding_cost(m[~forbidden], min(rows, cols))
    r_idx, c_idx = linear_sum_assignment(work)
    pairs = [(int(r), int(c)) for r, c in zip(r_idx, c_idx) if not forbidden[r, c]]
    pairs.sort()
    return pairs


def assignment_cost(costs, pairs) -> float:
    m = np.asarray(costs, dtype=np.float64)
    total = 0.0
    for r, c in sorted(pairs):
        total += float(m[r, c])
    return total
