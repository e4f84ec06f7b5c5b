"""
Seeded instance generators, bundled instances and the cycle-witness search.

Every generator is a pure function of its ``GenSpec``: the poset and the
weights draw from separate streams of one ``numpy`` seed sequence, so the
same spec always serializes to the same bytes.
"""

import logging
from dataclasses import dataclass
from fractions import Fraction
from importlib import resources
from typing import Optional

import numpy as np

from mfas_cover.constants import SCALE
from mfas_cover.covering import enumerate_triangle_constraints
from mfas_cover.enums import GenMode
from mfas_cover.exceptions import GuardExceeded, UnknownName, ValidationFailed
from mfas_cover.instance import Instance, parse_instance
from mfas_cover.oracle import exact_min_cover, exact_min_extension
from mfas_cover.poset import Poset, incomparable_pairs
from mfas_cover.settings import DEFAULT_SETTINGS, Settings
from mfas_cover.solution import (
    DeltaSolution,
    check_fas_feasible,
    check_triangle_feasible,
    cost,
    parse_solution,
)

logger = logging.getLogger(__name__)

_POSET_STREAM = 0
_WEIGHT_STREAM = 1

BUNDLED_INSTANCES = ("appendix_a", "appendix_b", "k3_demo")
BUNDLED_SOLUTIONS = {"appendix_a_cover": "appendix_a", "appendix_b_cycle": "appendix_b"}


@dataclass(frozen=True)
class GenSpec:
    n: int
    seed: int = 0
    poset_density: Fraction = Fraction(0)
    weight_range: tuple[int, int] = (0, 10 * SCALE)
    mode: GenMode = GenMode.HEMIMETRIC_CLOSURE

    def __post_init__(self):
        object.__setattr__(self, "poset_density", Fraction(self.poset_density))
        object.__setattr__(self, "mode", GenMode(self.mode))
        lo, hi = self.weight_range
        if self.n < 1:
            raise ValidationFailed(f"n must be positive, got {self.n}")
        if not 0 <= lo <= hi <= 2**61:
            raise ValidationFailed(f"weight range must satisfy 0 <= lo <= hi <= 2**61, got {self.weight_range}")
        if not 0 <= self.poset_density <= 1:
            raise ValidationFailed(f"poset density must lie in [0, 1], got {self.poset_density}")
        if not 0 <= self.seed < 2**64:
            raise ValidationFailed(f"seed must be a 64-bit unsigned integer, got {self.seed}")

    def rng(self, stream: int) -> np.random.Generator:
        return np.random.default_rng([self.seed, stream])


def gen_poset(spec: GenSpec) -> Poset:
    rng = spec.rng(_POSET_STREAM)
    labels = [int(v) for v in rng.permutation(spec.n)]
    density = float(spec.poset_density)
    pairs = [
        (labels[i], labels[j])
        for i in range(spec.n)
        for j in range(i + 1, spec.n)
        if rng.random() < density
    ]
    return Poset.from_pairs(spec.n, pairs)


def _weight_matrix(spec: GenSpec, lo: int, hi: int) -> np.ndarray:
    rng = spec.rng(_WEIGHT_STREAM)
    w = rng.integers(lo, hi, size=(spec.n, spec.n), endpoint=True, dtype=np.int64)
    np.fill_diagonal(w, 0)
    return w


def _instance(w: np.ndarray, poset: Poset) -> Instance:
    return Instance.from_nanos(w.tolist(), poset)


def gen_hemimetric(spec: GenSpec) -> Instance:
    """Uniform weights replaced by their min-plus closure."""
    lo, hi = spec.weight_range
    w = _weight_matrix(spec, lo, hi)
    for k in range(spec.n):
        np.minimum(w, w[:, k : k + 1] + w[k : k + 1, :], out=w)
    return _instance(w, gen_poset(spec))


def gen_interval_kgonal(spec: GenSpec, k: int) -> Instance:
    """Weights uniform in [1, k - 1]; any k-1 steps then outweigh a single arc."""
    if k < 3:
        raise ValidationFailed(f"k must be at least 3, got {k}")
    w = _weight_matrix(spec, SCALE, (k - 1) * SCALE)
    return _instance(w, gen_poset(spec))


def gen_probability_like(spec: GenSpec) -> Instance:
    """w(i,j) uniform in [0, 1] and w(j,i) = 1 - w(i,j)."""
    w = _weight_matrix(spec, 0, SCALE)
    upper = np.triu(w, 1)
    w = upper + (SCALE - upper.T) * np.tri(spec.n, k=-1, dtype=np.int64)
    return _instance(w, gen_poset(spec))


def generate(spec: GenSpec, k: int = None) -> Instance:
    if spec.mode is GenMode.HEMIMETRIC_CLOSURE:
        return gen_hemimetric(spec)
    if spec.mode is GenMode.INTERVAL_KGONAL:
        return gen_interval_kgonal(spec, 3 if k is None else k)
    return gen_probability_like(spec)


# --- bundled data --------------------------------------------------------------


def _data(filename: str) -> str:
    return resources.files("mfas_cover.data").joinpath(filename).read_text(encoding="utf-8")


def bundled_instance(name: str) -> Instance:
    if name not in BUNDLED_INSTANCES:
        raise UnknownName(f"unknown bundled instance {name!r}; known: {', '.join(BUNDLED_INSTANCES)}")
    return parse_instance(_data(f"{name}.mfas"))


def bundled_solution(name: str) -> DeltaSolution:
    if name not in BUNDLED_SOLUTIONS:
        raise UnknownName(f"unknown bundled solution {name!r}; known: {', '.join(BUNDLED_SOLUTIONS)}")
    return parse_solution(_data(f"{name}.sol"), bundled_instance(BUNDLED_SOLUTIONS[name]))


def random_cover_perturbation(
    delta: DeltaSolution, inst: Instance, rng: np.random.Generator, extra: int
) -> DeltaSolution:
    """Add up to ``extra`` random unset incomparable arcs; covers stay covers."""
    unset = sorted(incomparable_pairs(inst.poset) - delta.support)
    if not unset or extra <= 0:
        return delta
    picks = rng.choice(len(unset), size=min(extra, len(unset)), replace=False)
    return DeltaSolution.from_arcs(inst.poset, delta.support | {unset[int(p)] for p in picks})


# --- witness search ------------------------------------------------------------


def _is_cycle_witness(inst: Instance, delta: DeltaSolution, *, settings: Settings) -> bool:
    if not check_fas_feasible(delta, inst):
        return False
    if check_triangle_feasible(delta, inst):
        return False
    return cost(delta, inst).total_cost < exact_min_extension(inst, settings=settings).best_total_cost


def search_cycle_witness(
    spec: GenSpec,
    budget: int,
    *,
    use_template: bool = True,
    settings: Settings = DEFAULT_SETTINGS,
) -> Optional[tuple[Instance, DeltaSolution]]:
    """
    Look for an instance and a solution that satisfies every pair and
    triangle row of the poset-free relaxation yet costs less than the best
    linear extension.

    Unless ``use_template`` is off, the poset 4-cycle template is tried
    first. Every other attempt draws a hemimetric instance from a spec
    derived from ``spec.seed`` and takes the cheapest triangle-feasible
    cover. Each attempt, the template included, uses one unit of budget.
    """
    if spec.n > settings.witness_max_n:
        raise GuardExceeded(f"witness search limited to n <= {settings.witness_max_n}, got n={spec.n}")
    if budget <= 0:
        return None

    attempts = 0
    if use_template:
        attempts += 1
        template = bundled_instance("appendix_b")
        delta = bundled_solution("appendix_b_cycle")
        if _is_cycle_witness(template, delta, settings=settings):
            logger.info("cycle witness found from the poset 4-cycle template")
            return template, delta

    rng = spec.rng(_WEIGHT_STREAM + 1)
    density = spec.poset_density or Fraction(1, 2)
    while attempts < budget:
        attempts += 1
        seed = int(rng.integers(0, 2**63))
        candidate_spec = GenSpec(spec.n, seed, density, spec.weight_range, GenMode.HEMIMETRIC_CLOSURE)
        inst = gen_hemimetric(candidate_spec)
        delta, _ = exact_min_cover(inst, constraints=enumerate_triangle_constraints(inst), settings=settings)
        if _is_cycle_witness(inst, delta, settings=settings):
            logger.info("cycle witness found after %d attempts (seed %d)", attempts, seed)
            return inst, delta
    logger.info("no cycle witness within a budget of %d", budget)
    return None
