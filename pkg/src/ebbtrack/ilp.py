"""Exact solver for ``max rho.x  s.t.  C^T x <= 1, x binary``.

Rows are split into connected components (rows sharing a column) and each
component is solved by depth-first branch and bound. Column conflicts are
tracked with integer bitmasks.

Tie-breaking between optima with equal objective: the selection containing
the smallest index on which the two selections differ wins. Rows with
``rho <= 0`` are never selected. The reported objective is always summed over
the selected rows in ascending index order.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

BRUTEFORCE_LIMIT = 25


@dataclass(frozen=True)
class IlpSolution:
    selected: frozenset
    objective: float

    def indices(self) -> list[int]:
        return sorted(self.selected)


def canonical_objective(rho, selected) -> float:
    total = 0.0
    for i in sorted(selected):
        total += rho[i]
    return total


def _prefer(cand, best) -> bool:
    """True when sorted tuple ``cand`` beats ``best`` in the tie-break order."""
    diff = set(cand).symmetric_difference(best)
    return bool(diff) and min(diff) in cand


def _better(obj, sel, best_obj, best_sel) -> bool:
    if best_sel is None or obj > best_obj:
        return True
    return obj == best_obj and _prefer(sel, best_sel)


def _components(rows, keep):
    parent = {}

    def find(x):
        while parent.setdefault(x, x) != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for i in keep:
        cols = rows[i]
        root = find(cols[0])
        for c in cols[1:]:
            rc = find(c)
            if rc != root:
                parent[rc] = root
    groups = {}
    for i in keep:
        groups.setdefault(find(rows[i][0]), []).append(i)
    return sorted(groups.values(), key=lambda g: g[0])


def _solve_component(idx, rows, rho):
    order = sorted(idx, key=lambda i: (-rho[i], i))
    n = len(order)
    val = [rho[i] for i in order]
    cols = [rows[i] for i in order]
    masks = [sum(1 << c for c in rows[i]) for i in order]
    share = [rho[i] / len(rows[i]) for i in order]

    # greedy incumbent
    used = 0
    greedy = []
    for k in range(n):
        if not masks[k] & used:
            used |= masks[k]
            greedy.append(order[k])
    best_sel = tuple(sorted(greedy))
    best_obj = canonical_objective(rho, best_sel)

    stack = [(0, 0, 0.0, ())]
    while stack:
        pos, used, value, chosen = stack.pop()
        row_bound = value
        col_best = {}
        first = -1
        for k in range(pos, n):
            if masks[k] & used:
                continue
            if first < 0:
                first = k
            row_bound += val[k]
            s = share[k]
            for c in cols[k]:
                if s > col_best.get(c, 0.0):
                    col_best[c] = s
        if first < 0:
            sel = tuple(sorted(chosen))
            obj = canonical_objective(rho, sel)
            if _better(obj, sel, best_obj, best_sel):
                best_obj, best_sel = obj, sel
            continue
        bound = min(row_bound, value + math.fsum(col_best.values()))
        # keep ties alive: float rounding of the running sum must not prune an equal optimum
        if bound < best_obj - 1e-9 * (1.0 + abs(best_obj)):
            continue
        stack.append((first + 1, used, value, chosen))
        stack.append((first + 1, used | masks[first], value + val[first], chosen + (order[first],)))
    return best_sel


def solve_map(hset, threads: int | None = None) -> IlpSolution:
    """Exact MAP selection for a :class:`~ebbtrack.association.HypothesisSet`."""
    rows = hset.rows()
    rho = [h.likelihood for h in hset.hypotheses]
    keep = [i for i in range(len(rows)) if rho[i] > 0.0]
    comps = _components(rows, keep)
    work = lambda comp: _solve_component(comp, rows, rho)
    if threads is not None and threads > 1 and len(comps) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(work, comps))
    else:
        parts = [work(c) for c in comps]
    selected = frozenset(i for part in parts for i in part)
    return IlpSolution(selected, canonical_objective(rho, selected))


def solve_map_bruteforce(hset) -> IlpSolution:
    """Enumerate every feasible subset; test oracle for :func:`solve_map`."""
    m = len(hset.hypotheses)
    if m > BRUTEFORCE_LIMIT:
        raise ValueError(f"oracle size limit: {m} hypotheses > {BRUTEFORCE_LIMIT}")
    rows = hset.rows()
    rho = [h.likelihood for h in hset.hypotheses]
    best = [-math.inf, None]

    def visit(i, used, chosen):
        if i == m:
            obj = canonical_objective(rho, chosen)
            if _better(obj, chosen, best[0], best[1]):
                best[0], best[1] = obj, chosen
            return
        visit(i + 1, used, chosen)
        if rho[i] > 0.0 and not used.intersection(rows[i]):
            visit(i + 1, used.union(rows[i]), chosen + (i,))

    visit(0, frozenset(), ())
    return IlpSolution(frozenset(best[1]), canonical_objective(rho, best[1]))
