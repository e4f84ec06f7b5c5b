import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from mfas_cover import engine
from mfas_cover.constants import AFTER_BOUND, AFTER_COVER, ALPHA_GUARANTEE, BEFORE_COVER, ENGINE_VERSION
from mfas_cover.covering import FractionalBound, mwu_fractional_cover, primal_dual_cover
from mfas_cover.instance import Amount, Instance, format_amount, format_ratio
from mfas_cover.repair import RepairTrace, contradicting_pairs, repair
from mfas_cover.settings import DEFAULT_SETTINGS, Settings
from mfas_cover.solution import Permutation, cost, permutation_from_delta

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class SolveReport:
    """
    Outcome of the cover, repair and order pipeline. Amounts are in nanos.

    ``ratio_vs_bound`` is variable cost over the certified lower bound and
    is only set when a positive bound was computed. Ratios print as decimals
    rounded to nine places, the lower bound rounded down to the nanounit.
    """

    instance_digest: str
    order: Permutation
    total_cost: Amount
    variable_cost: Amount
    fixed_cost: Amount
    iterations: int
    contradicting_initial: int
    lower_bound: Optional[Fraction] = None
    ratio_vs_bound: Optional[Fraction] = None
    eps: Optional[Fraction] = None
    alpha_guarantee: int = ALPHA_GUARANTEE
    engine: str = ENGINE_VERSION

    @property
    def within_guarantee(self) -> Optional[bool]:
        """variable_cost <= alpha * (1 + eps) * lower_bound, when a bound exists."""
        if self.lower_bound is None:
            return None
        return self.variable_cost <= self.alpha_guarantee * (1 + self.eps) * self.lower_bound

    def lines(self) -> list[str]:
        out = [
            f"engine={self.engine}",
            f"instance_digest={self.instance_digest}",
            f"order={self.order}",
            f"total_cost={format_amount(self.total_cost)}",
            f"variable_cost={format_amount(self.variable_cost)}",
            f"fixed_cost={format_amount(self.fixed_cost)}",
        ]
        if self.lower_bound is not None:
            out.append(f"lower_bound={format_amount(math.floor(self.lower_bound))}")
            if self.ratio_vs_bound is not None:
                out.append(f"ratio_vs_bound={format_ratio(self.ratio_vs_bound)}")
            out.append(f"eps={format_ratio(self.eps)}")
            out.append(f"within_guarantee={str(self.within_guarantee).lower()}")
        out.extend(
            [
                f"iterations={self.iterations}",
                f"contradicting_initial={self.contradicting_initial}",
                f"alpha_guarantee={self.alpha_guarantee}",
            ]
        )
        return out


def solve_pipeline(
    inst: Instance,
    *,
    bound: bool = False,
    eps: Fraction = None,
    ctx=None,
    settings: Settings = DEFAULT_SETTINGS,
) -> tuple[Permutation, SolveReport]:
    engine.run(BEFORE_COVER, [inst], ctx=ctx)
    cover = primal_dual_cover(inst, settings=settings)
    engine.run(AFTER_COVER, [cover], ctx=ctx)
    logger.info("primal-dual cover: %d arcs, cost %s", len(cover.support), format_amount(cost(cover, inst).variable_cost))

    contradicting_initial = len(contradicting_pairs(cover))
    repaired, trace = repair(cover, inst, ctx=ctx, settings=settings)
    order = permutation_from_delta(repaired, inst)
    costs = cost(repaired, inst)

    fractional: Optional[FractionalBound] = None
    if bound:
        fractional = mwu_fractional_cover(inst, eps, settings=settings)
        engine.run(AFTER_BOUND, [fractional], ctx=ctx)

    report = _report(inst, order, costs, trace, contradicting_initial, fractional)
    logger.info("pipeline finished: order %s, total %s", order, format_amount(report.total_cost))
    return order, report


def _report(inst, order, costs, trace: RepairTrace, contradicting_initial, fractional) -> SolveReport:
    lower = ratio = eps = None
    if fractional is not None:
        lower, eps = fractional.lower_bound, fractional.eps
        if lower > 0:
            ratio = Fraction(costs.variable_cost) / lower
    return SolveReport(
        instance_digest=inst.digest,
        order=order,
        total_cost=costs.total_cost,
        variable_cost=costs.variable_cost,
        fixed_cost=costs.fixed_cost,
        iterations=len(trace),
        contradicting_initial=contradicting_initial,
        lower_bound=lower,
        ratio_vs_bound=ratio,
        eps=eps,
    )
