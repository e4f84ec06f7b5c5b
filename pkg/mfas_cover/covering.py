import logging
import math
from collections.abc import Sequence
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property, lru_cache

import numpy as np

from mfas_cover.enums import ViolationKind
from mfas_cover.exceptions import BudgetExhausted, CapExceeded, NotFeasibleInput, ValidationFailed
from mfas_cover.instance import Instance
from mfas_cover.poset import Arc, Poset, incomparable_pairs
from mfas_cover.settings import DEFAULT_SETTINGS, Settings
from mfas_cover.solution import DeltaSolution, canonical_cycle, check_cover_feasible

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class CoverConstraint:
    """
    One row ``sum of arcs >= 1`` of the covering relaxation.

    For arcs (a1, ..., ac) in stored order the witnesses are
    (x2, y1), (x3, y2), ..., (x1, yc), each in the reflexive poset.
    """

    arcs: tuple[Arc, ...]
    witnesses: tuple[Arc, ...]

    @property
    def size(self) -> int:
        return len(self.arcs)

    @property
    def strict(self) -> bool:
        return any(x != y for x, y in self.witnesses)

    @property
    def kind(self) -> ViolationKind:
        if self.size == 2:
            return ViolationKind.POSET_PAIR if self.strict else ViolationKind.PAIR
        return ViolationKind.POSET_TRIPLE if self.strict else ViolationKind.TRIPLE


def _witnesses(arcs: Sequence[Arc]) -> tuple[Arc, ...]:
    c = len(arcs)
    return tuple((arcs[(i + 1) % c][0], arcs[i][1]) for i in range(c))


def _make(arcs: Sequence[Arc]) -> CoverConstraint:
    arcs = canonical_cycle(list(arcs))
    return CoverConstraint(arcs, _witnesses(arcs))


@lru_cache(maxsize=32)
def _poset_constraints(poset: Poset) -> tuple[CoverConstraint, ...]:
    inc = sorted(incomparable_pairs(poset))
    inc_set = set(inc)
    by_tail: dict[int, list[Arc]] = {}
    for arc in inc:
        by_tail.setdefault(arc[0], []).append(arc)

    pairs = {}
    for x1, y1 in inc:
        for x2 in poset.down(y1):
            for y2 in poset.up(x1):
                other = (x2, y2)
                if other in inc_set and other != (x1, y1):
                    key = frozenset(((x1, y1), other))
                    if key not in pairs:
                        pairs[key] = _make(((x1, y1), other))

    triples = {}
    for first in inc:
        x1, y1 = first
        for x2 in poset.down(y1):
            for second in by_tail.get(x2, ()):
                for x3 in poset.down(second[1]):
                    for third in by_tail.get(x3, ()):
                        if not poset.in_p(x1, third[1]):
                            continue
                        key = frozenset((first, second, third))
                        if len(key) == 3 and key not in triples:
                            triples[key] = _make((first, second, third))

    ordered = sorted(pairs.values(), key=lambda c: c.arcs) + sorted(triples.values(), key=lambda c: c.arcs)
    logger.debug("enumerated %d pair and %d triple constraints", len(pairs), len(triples))
    return tuple(ordered)


def enumerate_constraints(inst: Instance, *, settings: Settings = DEFAULT_SETTINGS) -> tuple[CoverConstraint, ...]:
    """
    All pair and triple constraints of the covering relaxation, deduplicated
    by arc set, pairs first, each group in lexicographic order.
    """
    if inst.n > settings.triple_enumeration_cap:
        raise CapExceeded(f"constraint enumeration limited to n <= {settings.triple_enumeration_cap}, got n={inst.n}")
    return _poset_constraints(inst.poset)


def enumerate_triangle_constraints(inst: Instance) -> tuple[CoverConstraint, ...]:
    """
    Pair and triangle constraints of the poset-free relaxation with poset
    arcs fixed: rows containing a poset arc are satisfied and dropped, reversed
    poset arcs are fixed to 0 and leave their row.
    """
    poset = inst.poset
    n = inst.n
    found = {}
    for i in range(n):
        for j in range(i + 1, n):
            if not poset.comparable(i, j):
                found.setdefault(frozenset(((i, j), (j, i))), _make(((i, j), (j, i))))
    for i in range(n):
        for j in range(i + 1, n):
            for k in range(i + 1, n):
                if k == j:
                    continue
                cycle = ((i, j), (j, k), (k, i))
                if any(arc in poset.strict_pairs for arc in cycle):
                    continue
                # a reversed poset arc (b, a) is fixed to 0; (a, b) then certifies the shorter row
                free = tuple(arc for arc in cycle if not poset.comparable(*arc))
                found.setdefault(frozenset(free), _make(free))
    return tuple(sorted(found.values(), key=lambda c: (c.size, c.arcs)))


def constraint_dump(constraints: Sequence[CoverConstraint]) -> list[str]:
    lines = []
    for constraint in constraints:
        word = "pair" if constraint.size == 2 else "triple"
        lines.append(" ".join([word, *(f"{x} {y}" for x, y in constraint.arcs)]))
    return lines


class ConstraintIndex:
    """Constraints with an arc -> constraint-positions lookup."""

    def __init__(self, constraints: Sequence[CoverConstraint]):
        self.constraints = tuple(constraints)

    @cached_property
    def by_arc(self) -> dict[Arc, tuple[int, ...]]:
        index: dict[Arc, list[int]] = {}
        for position, constraint in enumerate(self.constraints):
            for arc in constraint.arcs:
                index.setdefault(arc, []).append(position)
        return {arc: tuple(positions) for arc, positions in index.items()}

    def coverage(self, support) -> list[int]:
        return [sum(1 for arc in c.arcs if arc in support) for c in self.constraints]

    def is_covered(self, support) -> bool:
        return all(any(arc in support for arc in c.arcs) for c in self.constraints)


@lru_cache(maxsize=32)
def _index_for(poset: Poset) -> ConstraintIndex:
    return ConstraintIndex(_poset_constraints(poset))


def constraint_index(inst: Instance, *, settings: Settings = DEFAULT_SETTINGS) -> ConstraintIndex:
    enumerate_constraints(inst, settings=settings)
    return _index_for(inst.poset)


def local_ratio_cover(rows: Sequence[tuple[Arc, ...]], w) -> set[Arc]:
    """
    Every still-uncovered row, in the given order, pays its cheapest
    residual weight on all of its arcs; arcs whose residual reaches zero
    join the cover.
    """
    residual = {}
    chosen = set()
    for arcs in rows:
        if any(arc in chosen for arc in arcs):
            continue
        for i, j in arcs:
            residual.setdefault((i, j), w[i][j])
        step = min(residual[arc] for arc in arcs)
        for arc in arcs:
            residual[arc] -= step
            if residual[arc] == 0:
                chosen.add(arc)
    return chosen


def primal_dual_cover(inst: Instance, *, settings: Settings = DEFAULT_SETTINGS) -> DeltaSolution:
    """Local-ratio cover of the constraints in enumeration order; factor <= 3, the largest row size."""
    constraints = enumerate_constraints(inst, settings=settings)
    chosen = local_ratio_cover([c.arcs for c in constraints], inst.w)
    logger.debug("primal-dual cover picked %d arcs", len(chosen))
    return DeltaSolution.from_arcs(inst.poset, chosen)


def minimalize_support(support, inst: Instance, index: ConstraintIndex) -> set[Arc]:
    """
    Drop arcs heaviest first (ties lexicographic) while every constraint keeps
    a covering arc. The input support must cover every constraint.
    """
    w = inst.w
    support = set(support)
    coverage = index.coverage(support)
    by_arc = index.by_arc
    for arc in sorted(support, key=lambda a: (-w[a[0]][a[1]], a)):
        positions = by_arc.get(arc, ())
        if all(coverage[p] >= 2 for p in positions):
            support.discard(arc)
            for p in positions:
                coverage[p] -= 1
    return support


def minimalize(delta: DeltaSolution, inst: Instance, *, settings: Settings = DEFAULT_SETTINGS) -> DeltaSolution:
    delta.require_integral()
    index = constraint_index(inst, settings=settings)
    if not index.is_covered(delta.support):
        violated = check_cover_feasible(delta, inst, settings=settings)
        raise NotFeasibleInput(
            f"cannot minimalize an infeasible cover ({len(violated)} violated constraints)",
            dump="\n".join(v.describe() for v in violated[:20]),
        )
    kept = minimalize_support(delta.support, inst, index)
    if len(kept) != len(delta.support):
        logger.debug("minimalize removed %d of %d arcs", len(delta.support) - len(kept), len(delta.support))
    return DeltaSolution.from_arcs(inst.poset, kept)


# --- fractional cover ----------------------------------------------------------


@dataclass(frozen=True)
class FractionalBound:
    """
    A certified fractional cover.

    ``primal_value`` is the cost of ``x`` and ``lower_bound`` the value of an
    exactly verified dual packing, both in nanos, with
    ``primal_value <= (1 + eps) * lower_bound``.
    """

    x: DeltaSolution
    primal_value: Fraction
    lower_bound: Fraction
    eps: Fraction
    iterations: int = 0


def _certify(l_norm, y, arcs, weights, rows, eps):
    """Exact primal cover from lengths and exact dual packing from flows."""
    lengths = [Fraction(float(v)) for v in l_norm]
    alpha = min(sum(lengths[a] for a in row) for row in rows)
    x = [min(Fraction(1), length / alpha) for length in lengths]
    primal = sum(weights[a] * x[a] for a in range(len(arcs)))

    flows = [Fraction(float(v)) for v in y]
    load = [Fraction(0)] * len(arcs)
    for flow, row in zip(flows, rows):
        if flow:
            for a in row:
                load[a] += flow
    overload = max(load[a] / weights[a] for a in range(len(arcs)))
    lower = sum(flows) / overload if overload else Fraction(0)
    return x, primal, lower, primal <= (1 + eps) * lower


def mwu_fractional_cover(
    inst: Instance, eps: Fraction = None, *, settings: Settings = DEFAULT_SETTINGS
) -> FractionalBound:
    """
    Certified (1 + eps)-approximate fractional cover by multiplicative weights.

    Runs the packing-side length updates on the dual (max sum of constraint
    flows subject to arc weights); the lengths give a primal cover, the
    flows an exact lower bound. Zero-weight arcs are fixed to 1 up front and
    their constraints dropped; x <= 1 is not part of the program.
    """
    eps = settings.mwu_eps if eps is None else Fraction(eps)
    if not 0 < eps < 1:
        raise ValidationFailed(f"eps must lie in (0, 1), got {eps}")
    w = inst.w
    constraints = enumerate_constraints(inst, settings=settings)

    free_zero = {arc for c in constraints for arc in c.arcs if w[arc[0]][arc[1]] == 0}
    live = [c for c in constraints if not any(arc in free_zero for arc in c.arcs)]
    zero_values = {arc: Fraction(1) for arc in free_zero}
    if not live:
        return FractionalBound(DeltaSolution(inst.poset, zero_values), Fraction(0), Fraction(0), eps)

    arcs = sorted({arc for c in live for arc in c.arcs})
    position = {arc: p for p, arc in enumerate(arcs)}
    rows = [tuple(position[arc] for arc in c.arcs) for c in live]
    weights = [w[i][j] for i, j in arcs]
    m = len(rows)
    matrix = np.zeros((m, len(arcs)))
    for r, row in enumerate(rows):
        matrix[r, list(row)] = 1.0
    wv = np.array(weights, dtype=float)

    budget = int(settings.mwu_budget_factor * m * math.log(m + 2) / float(eps) ** 2) + 1000
    iterations = 0
    step = float(eps) / 3
    while True:
        ok = False
        # lengths are kept normalized; log_scale carries the common factor
        l_norm = 1.0 / wv
        log_scale = math.log1p(step) - math.log((1 + step) * len(arcs)) / step
        y = np.zeros(m)
        load = np.zeros(len(arcs))
        best_primal, best_lengths = math.inf, l_norm.copy()
        best_lower, best_flows = 0.0, y.copy()
        while True:
            iterations += 1
            if iterations > budget:
                raise BudgetExhausted(
                    f"multiplicative weights did not certify eps={eps} within {budget} iterations"
                )
            row_lengths = matrix @ l_norm
            c = int(np.argmin(row_lengths))
            primal_estimate = float(wv @ l_norm) / row_lengths[c]
            if primal_estimate < best_primal:
                best_primal, best_lengths = primal_estimate, l_norm.copy()

            members = list(rows[c])
            g = wv[members].min()
            y[c] += g
            load[members] += g
            l_norm[members] *= 1.0 + step * g / wv[members]
            top = l_norm.max()
            if top > 1e100:
                l_norm /= top
                log_scale += math.log(top)

            if iterations % max(1, m // 4) == 0:
                lower_estimate = y.sum() / (load / wv).max()
                if lower_estimate > best_lower:
                    best_lower, best_flows = lower_estimate, y.copy()
                if best_primal <= (1 + float(eps)) * best_lower * (1 - 1e-9):
                    x, primal, lower, ok = _certify(best_lengths, best_flows, arcs, weights, rows, eps)
                    if ok:
                        break
            if math.log(float(wv @ l_norm)) + log_scale >= 0:
                lower_estimate = y.sum() / (load / wv).max()
                if lower_estimate > best_lower:
                    best_lower, best_flows = lower_estimate, y.copy()
                x, primal, lower, ok = _certify(best_lengths, best_flows, arcs, weights, rows, eps)
                if ok:
                    break
                step /= 2
                logger.info("multiplicative weights restarting with step %.5f", step)
                break
        if ok:
            break

    values = dict(zero_values)
    values.update({arc: x[p] for arc, p in position.items()})
    logger.info(
        "fractional cover certified after %d iterations: primal=%s lower=%s", iterations, primal, lower
    )
    return FractionalBound(DeltaSolution(inst.poset, values), primal, lower, eps, iterations)
