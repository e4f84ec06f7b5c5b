from enum import Enum


class ViolationKind(str, Enum):
    """
    Kind of a violated covering constraint.

    The poset_* kinds are constraints certified by at least one strict
    poset witness; the plain kinds only use reflexive witnesses.
    """

    PAIR = "pair"
    TRIPLE = "triple"
    POSET_PAIR = "poset_pair"
    POSET_TRIPLE = "poset_triple"
    ALTERNATING_CYCLE = "alternating_cycle"


class ReverseSide(str, Enum):
    """Which arc set of a vertex a repair candidate reverses."""

    S = "S"
    E = "E"


class GenMode(str, Enum):
    HEMIMETRIC_CLOSURE = "hemimetric_closure"
    INTERVAL_KGONAL = "interval_kgonal"
    PROBABILITY_LIKE = "probability_like"


class Formulation(str, Enum):
    FAS = "fas"
    COVER = "cover"
    CYCLES = "cycles"
    TRIANGLE = "triangle"
