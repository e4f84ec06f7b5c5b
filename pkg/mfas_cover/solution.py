import logging
from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import TextIO, Union

import networkx as nx

from mfas_cover.constants import SCALE, SOLUTION_HEADER
from mfas_cover.enums import ViolationKind
from mfas_cover.exceptions import (
    CapExceeded,
    DimensionMismatch,
    FormatError,
    NotFeasible,
    NotIntegral,
    PosetViolated,
    ValidationFailed,
)
from mfas_cover.instance import Amount, Instance, format_amount
from mfas_cover.poset import Arc, Poset, incomparable_pairs
from mfas_cover.settings import DEFAULT_SETTINGS, Settings

logger = logging.getLogger(__name__)

ONE = Fraction(1)


class DeltaSolution:
    """
    Arc variables over the incomparable pairs of a poset.

    Only positive values are stored. Pairs of the poset are implicitly fixed
    to 1, their reverses to 0.
    """

    def __init__(self, poset: Poset, values: Mapping[Arc, Fraction] = None):
        self.poset = poset
        cleaned = {}
        for arc, value in (values or {}).items():
            value = Fraction(value)
            if value == 0:
                continue
            i, j = arc
            if not (0 <= i < poset.n and 0 <= j < poset.n) or i == j:
                raise DimensionMismatch(f"arc {arc} is not a pair of distinct vertices of 0..{poset.n - 1}")
            if poset.comparable(i, j):
                raise PosetViolated(f"arc {arc} lies on a comparable pair")
            if not 0 < value <= 1:
                raise ValidationFailed(f"value {value} of arc {arc} outside [0, 1]")
            cleaned[(i, j)] = value
        self._values = cleaned

    @classmethod
    def from_arcs(cls, poset: Poset, arcs: Iterable[Arc]) -> "DeltaSolution":
        return cls(poset, {tuple(arc): ONE for arc in arcs})

    @property
    def n(self) -> int:
        return self.poset.n

    @property
    def values(self) -> Mapping[Arc, Fraction]:
        return dict(self._values)

    @cached_property
    def support(self) -> frozenset[Arc]:
        return frozenset(self._values)

    @cached_property
    def integral(self) -> bool:
        return all(value == 1 for value in self._values.values())

    def value(self, i: int, j: int) -> Fraction:
        if (i, j) in self.poset.strict_pairs:
            return ONE
        return self._values.get((i, j), Fraction(0))

    def require_integral(self):
        if not self.integral:
            raise NotIntegral("operation needs an integral solution")

    def __eq__(self, other):
        if not isinstance(other, DeltaSolution):
            return NotImplemented
        return self.poset == other.poset and self._values == other._values

    def __hash__(self):
        return hash((self.poset, frozenset(self._values.items())))

    def __repr__(self):
        arcs = ", ".join(f"{i}->{j}" if v == 1 else f"{i}->{j}:{v}" for (i, j), v in sorted(self._values.items()))
        return f"DeltaSolution(n={self.n}, {{{arcs}}})"


@dataclass(frozen=True)
class Permutation:
    order: tuple[int, ...]

    def __post_init__(self):
        if sorted(self.order) != list(range(len(self.order))):
            raise ValidationFailed(f"{self.order} is not a permutation of 0..{len(self.order) - 1}")

    @classmethod
    def of(cls, order: Sequence[int]) -> "Permutation":
        return cls(tuple(int(v) for v in order))

    @property
    def n(self) -> int:
        return len(self.order)

    def __iter__(self):
        return iter(self.order)

    def __str__(self):
        return " ".join(map(str, self.order))


@dataclass(frozen=True)
class CostBreakdown:
    """Costs in nanos; ``int`` for integral solutions, ``Fraction`` otherwise."""

    variable_cost: Amount
    fixed_cost: Amount
    total_cost: Amount

    def __post_init__(self):
        if self.total_cost != self.variable_cost + self.fixed_cost:
            raise ValidationFailed("total cost must equal variable plus fixed cost")

    def lines(self, prefix: str = "") -> list[str]:
        return [
            f"{prefix}total_cost={format_amount(self.total_cost)}",
            f"{prefix}variable_cost={format_amount(self.variable_cost)}",
            f"{prefix}fixed_cost={format_amount(self.fixed_cost)}",
        ]


@dataclass(frozen=True)
class Violation:
    """
    A violated constraint with the poset pairs certifying it.

    Two violations are equal when they constrain the same set of arcs.
    """

    kind: ViolationKind = field(compare=False)
    arcs: tuple[Arc, ...] = field(compare=False)
    witnesses: tuple[Arc, ...] = field(compare=False, default=())
    key: frozenset = field(init=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "key", frozenset(self.arcs))

    def describe(self) -> str:
        arcs = " ".join(f"{i},{j}" for i, j in self.arcs)
        witnesses = " ".join(f"{i},{j}" for i, j in self.witnesses)
        return f"{self.kind.value} arcs=[{arcs}] witnesses=[{witnesses}]"


def _check_dimensions(delta: DeltaSolution, inst: Instance):
    if delta.n != inst.n:
        raise DimensionMismatch(f"solution has n={delta.n}, instance has n={inst.n}")
    if delta.poset != inst.poset:
        raise DimensionMismatch("solution and instance use different posets")


def canonical_cycle(arcs: Sequence[Arc]) -> tuple[Arc, ...]:
    """Smallest rotation of a cyclic arc sequence; pairs are simply sorted."""
    if len(arcs) == 2:
        return tuple(sorted(arcs))
    start = min(range(len(arcs)), key=lambda i: arcs[i])
    return tuple(arcs[start:]) + tuple(arcs[:start])


def cost(delta: DeltaSolution, inst: Instance) -> CostBreakdown:
    _check_dimensions(delta, inst)
    w = inst.w
    if delta.integral:
        variable = sum(w[i][j] for i, j in delta.support)
    else:
        variable = sum((value * w[i][j] for (i, j), value in delta.values.items()), Fraction(0))
        if variable.denominator == 1:
            variable = variable.numerator
    fixed = inst.fixed_cost
    return CostBreakdown(variable, fixed, variable + fixed)


def check_fas_feasible(delta: DeltaSolution, inst: Instance) -> list[Violation]:
    """Violations of the linear-ordering constraints; empty iff δ is a linear extension."""
    _check_dimensions(delta, inst)
    delta.require_integral()
    n = inst.n
    poset = inst.poset
    value = delta.value
    violations = []
    for i in range(n):
        for j in range(i + 1, n):
            if not poset.comparable(i, j) and value(i, j) + value(j, i) != 1:
                violations.append(Violation(ViolationKind.PAIR, ((i, j), (j, i)), ((j, j), (i, i))))
    for i in range(n):
        for j in range(i + 1, n):
            for k in range(i + 1, n):
                if k == j:
                    continue
                cycle = ((i, j), (j, k), (k, i))
                if any(value(a, b) for a, b in cycle):
                    continue
                free = tuple(arc for arc in cycle if not poset.comparable(*arc))
                fixed = tuple((b, a) for a, b in cycle if poset.comparable(a, b))
                kind = ViolationKind.TRIPLE if not fixed else ViolationKind.POSET_PAIR
                violations.append(Violation(kind, free, fixed))
    return violations


def _violations_of(constraints, delta: DeltaSolution) -> list[Violation]:
    value = delta.value
    violations = []
    for constraint in constraints:
        if sum(value(i, j) for i, j in constraint.arcs) < 1:
            violations.append(Violation(constraint.kind, constraint.arcs, constraint.witnesses))
    return violations


def check_cover_feasible(delta: DeltaSolution, inst: Instance, *, settings: Settings = DEFAULT_SETTINGS) -> list[Violation]:
    """Violated pair and triple covering constraints (works for fractional δ)."""
    from mfas_cover.covering import enumerate_constraints

    _check_dimensions(delta, inst)
    return _violations_of(enumerate_constraints(inst, settings=settings), delta)


def check_triangle_feasible(delta: DeltaSolution, inst: Instance) -> list[Violation]:
    """
    Violated pair and triangle constraints of the poset-free relaxation,
    evaluated with poset arcs fixed.
    """
    from mfas_cover.covering import enumerate_triangle_constraints

    _check_dimensions(delta, inst)
    return _violations_of(enumerate_triangle_constraints(inst), delta)


def alternating_arc_graph(inst: Instance, arcs: Iterable[Arc]) -> nx.DiGraph:
    """Arc (x, y) points to arc (x', y') when (x, y') is in the reflexive poset."""
    poset = inst.poset
    arcs = sorted(arcs)
    by_head: dict[int, list[Arc]] = {}
    for arc in arcs:
        by_head.setdefault(arc[1], []).append(arc)
    graph = nx.DiGraph()
    graph.add_nodes_from(arcs)
    for arc in arcs:
        for head in poset.up(arc[0]):
            for nxt in by_head.get(head, ()):
                if nxt != arc:
                    graph.add_edge(arc, nxt)
    return graph


def check_alternating_cycles(
    delta: DeltaSolution, inst: Instance, max_c: int, *, settings: Settings = DEFAULT_SETTINGS
) -> list[Violation]:
    """
    Violated alternating-cycle constraints of size 2..max_c.

    Only arcs with value below 1 can sit on a violated cycle, so the search
    runs on that subgraph.
    """
    _check_dimensions(delta, inst)
    if max_c < 2:
        raise ValidationFailed(f"cycle size must be at least 2, got {max_c}")
    if max_c > settings.max_cycle_cap:
        raise CapExceeded(f"alternating cycles limited to size {settings.max_cycle_cap}, got {max_c}")

    value = delta.value
    light = [arc for arc in incomparable_pairs(inst.poset) if value(*arc) < 1]
    graph = alternating_arc_graph(inst, light)

    seen = set()
    violations = []
    for cycle in nx.simple_cycles(graph, length_bound=max_c):
        key = frozenset(cycle)
        if key in seen:
            continue
        seen.add(key)
        if sum(value(*arc) for arc in cycle) >= 1:
            continue
        c = len(cycle)
        witnesses = tuple((cycle[i][0], cycle[(i + 1) % c][1]) for i in range(c))
        strict = any(x != y for x, y in witnesses)
        if c == 2:
            kind = ViolationKind.POSET_PAIR if strict else ViolationKind.PAIR
        elif c == 3:
            kind = ViolationKind.POSET_TRIPLE if strict else ViolationKind.TRIPLE
        else:
            kind = ViolationKind.ALTERNATING_CYCLE
        violations.append(Violation(kind, canonical_cycle(cycle), witnesses))
    violations.sort(key=lambda v: (len(v.arcs), v.arcs))
    logger.debug("alternating cycles up to %d: %d violated", max_c, len(violations))
    return violations


def permutation_from_delta(delta: DeltaSolution, inst: Instance) -> Permutation:
    if check_fas_feasible(delta, inst):
        raise NotFeasible("solution does not encode a linear extension")
    n = inst.n
    out_count = [sum(1 for j in range(n) if j != i and delta.value(i, j) == 1) for i in range(n)]
    return Permutation(tuple(sorted(range(n), key=lambda i: -out_count[i])))


def delta_from_permutation(perm: Permutation, inst: Instance) -> DeltaSolution:
    if perm.n != inst.n:
        raise DimensionMismatch(f"permutation has {perm.n} vertices, instance has {inst.n}")
    if not inst.poset.respects(perm.order):
        raise PosetViolated(f"order {perm} does not respect the poset")
    order = perm.order
    arcs = [
        (order[p], order[q])
        for p in range(len(order))
        for q in range(p + 1, len(order))
        if not inst.poset.comparable(order[p], order[q])
    ]
    return DeltaSolution.from_arcs(inst.poset, arcs)


# --- solution file format ----------------------------------------------------


def _parse_value(token: str, line: int) -> Fraction:
    try:
        value = Fraction(token)
    except (ValueError, ZeroDivisionError):
        raise FormatError(f"malformed arc value {token!r}", line=line) from None
    if not 0 <= value <= 1:
        raise FormatError(f"arc value {token} outside [0, 1]", line=line)
    return value


def parse_solution(source: Union[str, TextIO], inst: Instance) -> DeltaSolution:
    text = source if isinstance(source, str) else source.read()
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    if not lines or lines[0].strip() != SOLUTION_HEADER:
        raise FormatError(f"expected header {SOLUTION_HEADER!r}", line=1)
    values = {}
    for index, line in enumerate(lines[1:], start=2):
        tokens = line.split()
        if tokens == ["end"]:
            if any(rest.strip() for rest in lines[index:]):
                raise FormatError("trailing content after 'end'", line=index + 1)
            break
        if len(tokens) not in (2, 3) or not tokens[0].isdigit() or not tokens[1].isdigit():
            raise FormatError("expected '<i> <j>' or '<i> <j> <value>'", line=index)
        i, j = int(tokens[0]), int(tokens[1])
        if i >= inst.n or j >= inst.n or i == j:
            raise FormatError(f"arc ({i},{j}) is not a pair of distinct vertices", line=index)
        if inst.poset.comparable(i, j):
            raise FormatError(f"arc ({i},{j}) lies on a comparable pair", line=index)
        if (i, j) in values:
            raise FormatError(f"arc ({i},{j}) listed twice", line=index)
        values[(i, j)] = _parse_value(tokens[2], index) if len(tokens) == 3 else ONE
    else:
        raise FormatError("missing 'end'", line=len(lines) + 1)
    return DeltaSolution(inst.poset, values)


def serialize_solution(delta: DeltaSolution) -> str:
    out = [SOLUTION_HEADER]
    for (i, j), value in sorted(delta.values.items()):
        out.append(f"{i} {j}" if value == 1 else f"{i} {j} {format_amount(value * SCALE)}")
    out.append("end")
    return "\n".join(out) + "\n"
