import logging
from collections.abc import Sequence
from dataclasses import dataclass

import networkx as nx
import numpy as np

from mfas_cover.covering import (
    ConstraintIndex,
    CoverConstraint,
    enumerate_constraints,
    local_ratio_cover,
    minimalize_support,
)
from mfas_cover.exceptions import GuardExceeded
from mfas_cover.instance import Instance, format_amount
from mfas_cover.poset import Arc
from mfas_cover.settings import DEFAULT_SETTINGS, Settings
from mfas_cover.solution import DeltaSolution, Permutation

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class OracleResult:
    best_perm: Permutation
    best_total_cost: int
    explored: int


def order_cost(order: Sequence[int], inst: Instance) -> int:
    w = inst.w
    return sum(w[order[p]][order[q]] for p in range(len(order)) for q in range(p + 1, len(order)))


def _inside_sums(inst: Instance) -> np.ndarray:
    """table[j][S] = sum of w(j, k) over k in S."""
    n = inst.n
    w = inst.w
    dtype = np.int64 if sum(map(sum, w)) < 2**62 else object
    table = np.zeros((n, 1 << n), dtype=dtype)
    for j in range(n):
        row = table[j]
        for k in range(n):
            if w[j][k]:
                row.reshape(-1, 2, 1 << k)[:, 1, :] += w[j][k]
    return table


def exact_min_extension(inst: Instance, *, settings: Settings = DEFAULT_SETTINGS) -> OracleResult:
    """
    Optimal linear extension by dynamic programming over placed prefixes.

    g(S) is the cheapest cost of ordering the vertices outside S after the
    prefix S; placing j next costs w(j, k) for every k still unplaced.
    Reconstruction walks forward taking the smallest optimal next vertex.
    """
    n = inst.n
    if n > settings.extension_guard:
        raise GuardExceeded(f"extension oracle limited to n <= {settings.extension_guard}, got n={n}")
    if n == 0:
        return OracleResult(Permutation(()), 0, 1)

    pred = inst.poset.predecessor_masks
    inside = _inside_sums(inst)
    row_total = [sum(row) for row in inst.w]
    full = (1 << n) - 1

    def step_cost(j, mask):
        return row_total[j] - int(inside[j][mask])

    g = [None] * (full + 1)
    g[full] = 0
    explored = 1
    for mask in range(full - 1, -1, -1):
        if any(mask >> j & 1 and pred[j] & ~mask for j in range(n)):
            continue
        best = None
        for j in range(n):
            bit = 1 << j
            if mask & bit or pred[j] & ~mask:
                continue
            value = step_cost(j, mask) + g[mask | bit]
            if best is None or value < best:
                best = value
        g[mask] = best
        explored += 1

    order = []
    mask = 0
    while mask != full:
        for j in range(n):
            bit = 1 << j
            if mask & bit or pred[j] & ~mask:
                continue
            if step_cost(j, mask) + g[mask | bit] == g[mask]:
                order.append(j)
                mask |= bit
                break
    logger.info("extension oracle: optimum %s over %d states", format_amount(g[0]), explored)
    return OracleResult(Permutation(tuple(order)), g[0], explored)


def brute_force_min_extension(inst: Instance, *, settings: Settings = DEFAULT_SETTINGS) -> OracleResult:
    """Enumerate every linear extension; ties go to the lexicographically smallest order."""
    if inst.n > settings.brute_force_guard:
        raise GuardExceeded(f"brute force limited to n <= {settings.brute_force_guard}, got n={inst.n}")
    best = None
    explored = 0
    for order in nx.all_topological_sorts(inst.poset.graph()):
        explored += 1
        key = (order_cost(order, inst), tuple(order))
        if best is None or key < best:
            best = key
    total, order = best
    return OracleResult(Permutation(order), total, explored)


class _CoverSearch:
    """Depth-first hitting-set search over positive-weight arcs."""

    def __init__(self, rows: Sequence[tuple[Arc, ...]], w, incumbent: set[Arc]):
        self.rows = rows
        self.w = w
        self.best = set(incumbent)
        self.best_cost = sum(w[i][j] for i, j in incumbent)
        self.explored = 0

    def weight(self, arc):
        return self.w[arc[0]][arc[1]]

    def lower_bound(self, uncovered, forbidden):
        used = set()
        bound = 0
        for row in uncovered:
            allowed = [arc for arc in row if arc not in forbidden]
            if not allowed:
                return None
            if used.isdisjoint(row):
                used.update(row)
                bound += min(self.weight(arc) for arc in allowed)
        return bound

    def search(self, chosen: set[Arc], spent: int, forbidden: frozenset):
        self.explored += 1
        uncovered = [row for row in self.rows if chosen.isdisjoint(row)]
        if not uncovered:
            if spent < self.best_cost:
                self.best, self.best_cost = set(chosen), spent
            return
        bound = self.lower_bound(uncovered, forbidden)
        if bound is None or spent + bound >= self.best_cost:
            return
        row = min(uncovered, key=lambda r: sum(1 for arc in r if arc not in forbidden))
        options = sorted((arc for arc in row if arc not in forbidden), key=lambda a: (self.weight(a), a))
        excluded = set(forbidden)
        for arc in options:
            chosen.add(arc)
            self.search(chosen, spent + self.weight(arc), frozenset(excluded))
            chosen.discard(arc)
            excluded.add(arc)


def exact_min_cover(
    inst: Instance,
    *,
    constraints: Sequence[CoverConstraint] = None,
    settings: Settings = DEFAULT_SETTINGS,
) -> tuple[DeltaSolution, int]:
    """
    Minimum variable-cost integral cover of the given rows (default: the
    poset covering relaxation) by branch and bound.

    Zero-weight arcs are taken for free; the search branches on the
    remaining rows and the returned solution is minimalized.
    """
    if constraints is None:
        constraints = enumerate_constraints(inst, settings=settings)
    w = inst.w
    free = {arc for c in constraints for arc in c.arcs if w[arc[0]][arc[1]] == 0}
    rows = [c.arcs for c in constraints if free.isdisjoint(c.arcs)]
    variables = {arc for row in rows for arc in row}
    if len(variables) > settings.cover_variable_guard:
        raise GuardExceeded(
            f"cover oracle limited to {settings.cover_variable_guard} positive-weight arcs, got {len(variables)}"
        )

    live = ConstraintIndex([CoverConstraint(row, ()) for row in rows])
    incumbent = minimalize_support(local_ratio_cover(rows, w), inst, live)
    search = _CoverSearch(rows, w, incumbent)
    search.search(set(), 0, frozenset())
    index = ConstraintIndex(constraints)
    support = minimalize_support(search.best | free, inst, index)
    value = sum(w[i][j] for i, j in support)
    logger.info("cover oracle: optimum %s after %d nodes", format_amount(value), search.explored)
    return DeltaSolution.from_arcs(inst.poset, support), value
