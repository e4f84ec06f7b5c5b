import logging
from collections.abc import Iterable, Sequence
from dataclasses import dataclass
from functools import cached_property

import networkx as nx

from mfas_cover.exceptions import PosetError

logger = logging.getLogger(__name__)

Arc = tuple[int, int]


@dataclass(frozen=True)
class Poset:
    """
    Strict partial order on ``range(n)``.

    ``strict_pairs`` is always the strict transitive closure. Reflexive pairs
    are members of the order for every witness check, see ``in_p``.
    """

    n: int
    strict_pairs: frozenset[Arc] = frozenset()

    def __post_init__(self):
        if self.n < 0:
            raise PosetError(f"vertex count must be non-negative, got {self.n}")
        for a, b in self.strict_pairs:
            if not (0 <= a < self.n and 0 <= b < self.n):
                raise PosetError(f"pair ({a},{b}) out of range for n={self.n}")
            if a == b:
                raise PosetError(f"reflexive pair ({a},{a}) stored as strict")
            if (b, a) in self.strict_pairs:
                raise PosetError(f"pairs ({a},{b}) and ({b},{a}) violate antisymmetry")
        for a, b in self.strict_pairs:
            for c in self.successors(b):
                if (a, c) not in self.strict_pairs:
                    raise PosetError(f"pairs not transitively closed: missing ({a},{c})")

    @classmethod
    def from_pairs(cls, n: int, pairs: Iterable[Arc]) -> "Poset":
        """Build the closure of the stated strict relations."""
        graph = nx.DiGraph()
        graph.add_nodes_from(range(n))
        for a, b in pairs:
            if not (0 <= a < n and 0 <= b < n):
                raise PosetError(f"pair ({a},{b}) out of range for n={n}")
            if a == b:
                raise PosetError(f"pair ({a},{b}) is reflexive")
            graph.add_edge(a, b)
        if not nx.is_directed_acyclic_graph(graph):
            cycle = nx.find_cycle(graph)
            raise PosetError(f"stated relations contain the cycle {cycle}")
        closure = nx.transitive_closure_dag(graph)
        logger.debug("poset closure: %d stated, %d closed pairs", graph.number_of_edges(), closure.number_of_edges())
        return cls(n, frozenset(closure.edges()))

    @classmethod
    def total_order(cls, order: Sequence[int]) -> "Poset":
        return cls.from_pairs(len(order), zip(order, order[1:]))

    def in_p(self, x: int, y: int) -> bool:
        return x == y or (x, y) in self.strict_pairs

    def comparable(self, x: int, y: int) -> bool:
        return (x, y) in self.strict_pairs or (y, x) in self.strict_pairs

    @cached_property
    def _successors(self) -> tuple[frozenset[int], ...]:
        succ = [set() for _ in range(self.n)]
        for a, b in self.strict_pairs:
            succ[a].add(b)
        return tuple(frozenset(s) for s in succ)

    @cached_property
    def _predecessors(self) -> tuple[frozenset[int], ...]:
        pred = [set() for _ in range(self.n)]
        for a, b in self.strict_pairs:
            pred[b].add(a)
        return tuple(frozenset(p) for p in pred)

    def successors(self, x: int) -> frozenset[int]:
        return self._successors[x]

    def predecessors(self, x: int) -> frozenset[int]:
        return self._predecessors[x]

    def down(self, y: int) -> frozenset[int]:
        """All x with in_p(x, y), y itself included."""
        return self._predecessors[y] | {y}

    def up(self, x: int) -> frozenset[int]:
        """All y with in_p(x, y), x itself included."""
        return self._successors[x] | {x}

    @cached_property
    def predecessor_masks(self) -> tuple[int, ...]:
        return tuple(sum(1 << p for p in self._predecessors[v]) for v in range(self.n))

    def graph(self) -> nx.DiGraph:
        graph = nx.DiGraph()
        graph.add_nodes_from(range(self.n))
        graph.add_edges_from(self.strict_pairs)
        return graph

    def reduction(self) -> list[Arc]:
        """Cover relations in lexicographic order."""
        return sorted(nx.transitive_reduction(self.graph()).edges())

    def respects(self, order: Sequence[int]) -> bool:
        position = {v: i for i, v in enumerate(order)}
        return all(position[a] < position[b] for a, b in self.strict_pairs)

    @property
    def is_total(self) -> bool:
        return len(self.strict_pairs) == self.n * (self.n - 1) // 2


def incomparable_pairs(poset: Poset) -> frozenset[Arc]:
    """Ordered pairs (x, y), x != y, related in neither direction."""
    return frozenset(
        (x, y)
        for x in range(poset.n)
        for y in range(poset.n)
        if x != y and not poset.comparable(x, y)
    )
