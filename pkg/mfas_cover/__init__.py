from mfas_cover import observers
from mfas_cover.constants import (
    AFTER_BOUND,
    AFTER_COVER,
    AFTER_REPAIR,
    AFTER_ROUND,
    BEFORE_COVER,
    BEFORE_REPAIR,
    CANDIDATE_STALLED,
)
from mfas_cover.context import SolveContext
from mfas_cover.covering import (
    enumerate_constraints,
    minimalize,
    mwu_fractional_cover,
    primal_dual_cover,
)
from mfas_cover.decorators import hook
from mfas_cover.handler import Hook
from mfas_cover.instance import Instance, parse_instance, serialize_instance
from mfas_cover.oracle import exact_min_cover, exact_min_extension
from mfas_cover.pipeline import SolveReport, solve_pipeline
from mfas_cover.poset import Poset
from mfas_cover.priority import Priority
from mfas_cover.repair import repair
from mfas_cover.solution import DeltaSolution, Permutation, cost

__all__ = [
    "AFTER_BOUND",
    "AFTER_COVER",
    "AFTER_REPAIR",
    "AFTER_ROUND",
    "BEFORE_COVER",
    "BEFORE_REPAIR",
    "CANDIDATE_STALLED",
    "DeltaSolution",
    "Hook",
    "Instance",
    "Permutation",
    "Poset",
    "Priority",
    "SolveContext",
    "SolveReport",
    "cost",
    "enumerate_constraints",
    "exact_min_cover",
    "exact_min_extension",
    "hook",
    "minimalize",
    "mwu_fractional_cover",
    "observers",
    "parse_instance",
    "primal_dual_cover",
    "repair",
    "serialize_instance",
    "solve_pipeline",
]
