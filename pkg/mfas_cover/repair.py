"""
Cost-preserving repair of a covering solution into a linear extension.

Each round minimalizes the current cover, then removes contradicting pairs
(both orientations set) through synchronized drop-and-reverse steps built
from basic triples. Costs never increase and the number of contradicting
pairs strictly decreases from round to round, so the loop ends after at
most ``n**2`` accepted rounds on hemimetric instances.
"""

import logging
from collections.abc import Iterable
from dataclasses import dataclass, field
from typing import Optional

from mfas_cover import engine
from mfas_cover.constants import AFTER_REPAIR, AFTER_ROUND, BEFORE_REPAIR, CANDIDATE_STALLED
from mfas_cover.covering import ConstraintIndex, constraint_index, minimalize_support
from mfas_cover.enums import ReverseSide
from mfas_cover.exceptions import LemmaViolated, NonTermination, NotFeasibleInput, NotHemimetric
from mfas_cover.instance import Amount, Instance, format_amount, validate_hemimetric
from mfas_cover.poset import Arc, Poset
from mfas_cover.settings import DEFAULT_SETTINGS, Settings
from mfas_cover.solution import DeltaSolution, _check_dimensions, serialize_solution

logger = logging.getLogger(__name__)

Pair = tuple[int, int]


@dataclass(frozen=True, order=True)
class BasicTriple:
    """(a, c, b) with a->c, c->b and both a<->b set, c->a and b->c unset."""

    a: int
    c: int
    b: int


@dataclass(frozen=True)
class SMESets:
    v: int
    S: frozenset[Arc] = frozenset()
    M: frozenset[Arc] = frozenset()
    E: frozenset[Arc] = frozenset()

    def __post_init__(self):
        if self.S & self.M or self.S & self.E or self.M & self.E:
            raise LemmaViolated(
                f"arc sets of vertex {self.v} overlap",
                dump=f"S={sorted(self.S)}\nM={sorted(self.M)}\nE={sorted(self.E)}",
            )

    @property
    def empty(self) -> bool:
        return not (self.S or self.M or self.E)

    def reversed_side(self, side: ReverseSide) -> frozenset[Arc]:
        return self.S if side is ReverseSide.S else self.E


@dataclass(frozen=True)
class RepairRound:
    """
    One round of the repair loop that changed the solution.

    ``chosen_v``/``chosen_x`` are ``None`` when minimalization alone removed
    every contradicting pair.
    """

    cost_before: Amount
    cost_after: Amount
    contradicting_before: int
    contradicting_after: int
    chosen_v: Optional[int]
    chosen_x: Optional[ReverseSide]
    triples: int


@dataclass(frozen=True)
class StalledCandidate:
    """A raw candidate whose contradicting count did not drop before minimalization."""

    v: int
    side: ReverseSide
    contradicting_before: int
    contradicting_raw: int
    contradicting_refined: int


@dataclass
class RepairTrace:
    iterations: list[RepairRound] = field(default_factory=list)

    @property
    def accepted(self) -> list[RepairRound]:
        return [r for r in self.iterations if r.chosen_v is not None]

    def __len__(self):
        return len(self.iterations)


# --- support-level helpers -----------------------------------------------------


def _contradicting(support) -> set[Pair]:
    return {(i, j) for i, j in support if i < j and (j, i) in support}


def _set(support, poset: Poset, x: int, y: int) -> bool:
    return (x, y) in support or (x, y) in poset.strict_pairs


def _basic_triples(support, poset: Poset, n: int) -> set[BasicTriple]:
    triples = set()
    for i, j in _contradicting(support):
        for a, b in ((i, j), (j, i)):
            for c in range(n):
                if c == a or c == b:
                    continue
                if (
                    _set(support, poset, a, c)
                    and _set(support, poset, c, b)
                    and not _set(support, poset, c, a)
                    and not _set(support, poset, b, c)
                ):
                    triples.add(BasicTriple(a, c, b))
    return triples


def _sme(v: int, triples: Iterable[BasicTriple]) -> SMESets:
    S, M, E = set(), set(), set()
    for t in triples:
        if t.a == v:
            S.add((t.c, t.b))
        if t.c == v:
            M.add((t.b, t.a))
        if t.b == v:
            E.add((t.a, t.c))
    return SMESets(v, frozenset(S), frozenset(M), frozenset(E))


def _apply(support, sets: SMESets, side: ReverseSide) -> set[Arc]:
    out = set(support)
    out.difference_update(sets.M)
    for i, j in sets.reversed_side(side):
        out.discard((i, j))
        out.add((j, i))
    return out


def _weight(support, inst: Instance) -> int:
    w = inst.w
    return sum(w[i][j] for i, j in support)


def _dump(support, inst: Instance, **extra) -> str:
    lines = [f"{key}={value}" for key, value in extra.items()]
    lines.append(serialize_solution(DeltaSolution.from_arcs(inst.poset, support)).rstrip("\n"))
    return "\n".join(lines)


def _require_candidate_feasible(candidate, support, sets: SMESets, side: ReverseSide, inst: Instance, index: ConstraintIndex):
    comparable = [arc for arc in sets.reversed_side(side) if inst.poset.comparable(*arc)]
    if comparable:
        logger.error("reversal set of vertex %d contains poset arcs %s", sets.v, comparable)
        raise LemmaViolated(
            f"candidate for v={sets.v} X={side.value} reverses poset arcs",
            dump=_dump(support, inst, v=sets.v, X=side.value, arcs=sorted(comparable)),
        )
    if index.is_covered(candidate):
        return
    violated = [c for c in index.constraints if not any(arc in candidate for arc in c.arcs)]
    logger.error("candidate for v=%d X=%s violates %d constraints", sets.v, side.value, len(violated))
    details = "\n".join(
        f"violated {c.kind.value} arcs={list(c.arcs)} witnesses={list(c.witnesses)}" for c in violated[:20]
    )
    raise LemmaViolated(
        f"candidate for v={sets.v} X={side.value} is not cover-feasible",
        dump=_dump(support, inst, v=sets.v, X=side.value) + "\n" + details,
    )


# --- public operations -----------------------------------------------------------


def contradicting_pairs(delta: DeltaSolution) -> set[Pair]:
    """Unordered pairs, as (i, j) with i < j, whose arcs are both set."""
    delta.require_integral()
    return _contradicting(delta.support)


def basic_triples(delta: DeltaSolution) -> set[BasicTriple]:
    delta.require_integral()
    return _basic_triples(delta.support, delta.poset, delta.n)


def sme_sets(delta: DeltaSolution, v: int, triples: Iterable[BasicTriple] = None) -> SMESets:
    if triples is None:
        triples = basic_triples(delta)
    else:
        delta.require_integral()
    return _sme(v, triples)


def build_candidate(
    delta: DeltaSolution,
    inst: Instance,
    v: int,
    side: ReverseSide,
    *,
    sets: SMESets = None,
    settings: Settings = DEFAULT_SETTINGS,
) -> DeltaSolution:
    """
    Drop the M arcs of ``v`` and reverse the arcs of the chosen side.

    The result is asserted cover-feasible; a violation raises
    ``LemmaViolated`` with a dump of the solution and the violated rows.
    """
    _check_dimensions(delta, inst)
    if sets is None:
        sets = sme_sets(delta, v)
    side = ReverseSide(side)
    candidate = _apply(delta.support, sets, side)
    _require_candidate_feasible(candidate, delta.support, sets, side, inst, constraint_index(inst, settings=settings))
    return DeltaSolution.from_arcs(inst.poset, candidate)


def check_lemma1(delta: DeltaSolution, inst: Instance) -> list[tuple[int, int, int, int]]:
    """
    Quadruples (i, j, k, l) where j->k is set one way only, i <= j and
    k <= l in the poset, yet i->l is not set one way only.
    """
    _check_dimensions(delta, inst)
    delta.require_integral()
    poset = inst.poset
    support = delta.support
    n = inst.n

    def one_way(x, y):
        return _set(support, poset, x, y) and not _set(support, poset, y, x)

    found = []
    for j in range(n):
        for k in range(n):
            if j == k or not one_way(j, k):
                continue
            for i in sorted(poset.down(j)):
                for l in sorted(poset.up(k)):
                    if i != l and not one_way(i, l):
                        found.append((i, j, k, l))
    return found


def repair(
    delta: DeltaSolution,
    inst: Instance,
    *,
    ctx=None,
    settings: Settings = DEFAULT_SETTINGS,
) -> tuple[DeltaSolution, RepairTrace]:
    """
    Turn a cover-feasible integral solution into a linear extension of no
    greater cost.

    Rounds: minimalize; stop when no pair is contradicting; otherwise build
    the drop-and-reverse candidate of every vertex with a non-empty S, M or
    E set for both reversal sides, keep those not costlier than the current
    solution, minimalize them and take the best by (contradicting pairs,
    cost, vertex, S before E). The winner must have strictly fewer
    contradicting pairs.
    """
    _check_dimensions(delta, inst)
    delta.require_integral()
    hemimetric = validate_hemimetric(inst)
    if not hemimetric.holds:
        first = hemimetric.violations[0]
        raise NotHemimetric(
            f"repair needs triangle inequalities; {len(hemimetric.violations)} violated, first {first}"
        )
    index = constraint_index(inst, settings=settings)
    if not index.is_covered(delta.support):
        raise NotFeasibleInput("repair input is not cover-feasible")

    n = inst.n
    poset = inst.poset
    cap = settings.repair_iteration_factor * n * n
    trace = RepairTrace()
    engine.run(BEFORE_REPAIR, [delta], ctx=ctx)

    support = set(delta.support)
    accepted = 0
    previous = None
    while True:
        cost_before = _weight(support, inst)
        contradicting_before = len(_contradicting(support))
        current = minimalize_support(support, inst, index)
        current_cost = _weight(current, inst)
        contradicting = _contradicting(current)

        if not contradicting:
            if current != support:
                record = RepairRound(cost_before, current_cost, contradicting_before, 0, None, None, 0)
                trace.iterations.append(record)
                engine.run(AFTER_ROUND, [record], [previous], ctx=ctx)
            support = current
            break

        accepted += 1
        if accepted > cap:
            logger.error("repair exceeded %d rounds on n=%d", cap, n)
            tail = "\n".join(format_trace(RepairTrace(trace.iterations[-5:])))
            raise NonTermination(
                f"repair did not finish within {cap} rounds",
                dump=_dump(current, inst, contradicting=len(contradicting)) + "\n" + tail,
            )

        triples = _basic_triples(current, poset, n)
        if not triples:
            logger.error("contradicting pairs %s without a basic triple", sorted(contradicting))
            raise LemmaViolated(
                "minimal cover with contradicting pairs has no basic triple",
                dump=_dump(current, inst, contradicting=sorted(contradicting)),
            )

        best = None
        for v in range(n):
            sets = _sme(v, triples)
            if sets.empty:
                continue
            for rank, side in enumerate((ReverseSide.S, ReverseSide.E)):
                raw = _apply(current, sets, side)
                _require_candidate_feasible(raw, current, sets, side, inst, index)
                if _weight(raw, inst) > current_cost:
                    continue
                refined = minimalize_support(raw, inst, index)
                key = (len(_contradicting(refined)), _weight(refined, inst), v, rank)
                logger.debug("candidate v=%d X=%s: contradicting=%d cost=%d", v, side.value, key[0], key[1])
                raw_count = len(_contradicting(raw))
                if raw_count >= len(contradicting):
                    logger.warning(
                        "raw candidate v=%d X=%s keeps %d contradicting pairs (%d after minimalization)",
                        v, side.value, raw_count, key[0],
                    )
                    stalled = StalledCandidate(v, side, len(contradicting), raw_count, key[0])
                    engine.run(CANDIDATE_STALLED, [stalled], ctx=ctx)
                if best is None or key < best[0]:
                    best = (key, refined, v, side)

        if best is None:
            logger.error("no candidate is at most as costly as the current cover")
            raise LemmaViolated(
                "no drop-and-reverse candidate keeps the cost",
                dump=_dump(current, inst, cost=format_amount(current_cost)),
            )
        (count, best_cost, _, _), refined, v, side = best
        if count >= len(contradicting):
            logger.error("best candidate v=%d X=%s does not reduce %d contradicting pairs", v, side.value, count)
            raise LemmaViolated(
                f"best candidate keeps {count} of {len(contradicting)} contradicting pairs",
                dump=_dump(current, inst, v=v, X=side.value),
            )

        record = RepairRound(cost_before, best_cost, contradicting_before, count, v, side, len(triples))
        trace.iterations.append(record)
        engine.run(AFTER_ROUND, [record], [previous], ctx=ctx)
        previous = record
        support = refined

    result = DeltaSolution.from_arcs(poset, support)
    logger.info(
        "repair finished after %d rounds: cost %s -> %s",
        len(trace),
        format_amount(_weight(delta.support, inst)),
        format_amount(_weight(support, inst)),
    )
    engine.run(AFTER_REPAIR, [result], [delta], ctx=ctx)
    return result, trace


def format_trace_line(record: RepairRound) -> str:
    chosen_v = "none" if record.chosen_v is None else str(record.chosen_v)
    chosen_x = "none" if record.chosen_x is None else record.chosen_x.value
    return (
        f"cost_before={format_amount(record.cost_before)} "
        f"cost_after={format_amount(record.cost_after)} "
        f"contradicting_before={record.contradicting_before} "
        f"contradicting_after={record.contradicting_after} "
        f"chosen_v={chosen_v} chosen_x={chosen_x} triples={record.triples}"
    )


def format_trace(trace: RepairTrace) -> list[str]:
    return [format_trace_line(record) for record in trace.iterations]
