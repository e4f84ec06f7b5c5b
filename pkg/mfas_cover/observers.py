"""Built-in pipeline observers."""

import logging

from mfas_cover.conditions import HasChanged, HasContradictingPairs, IsHemimetric
from mfas_cover.constants import AFTER_COVER, AFTER_REPAIR, AFTER_ROUND, BEFORE_COVER, CANDIDATE_STALLED
from mfas_cover.decorators import hook
from mfas_cover.handler import Hook
from mfas_cover.priority import Priority
from mfas_cover.repair import contradicting_pairs, format_trace_line

logger = logging.getLogger(__name__)
class TraceWriter(Hook):
    """Streams one line per repair round to ``ctx.trace_stream``."""

    @hook(AFTER_ROUND, priority=Priority.LOWEST)
    def write_round(self, new_records, old_records=None, ctx=None):
        stream = getattr(ctx, "trace_stream", None)
        if stream is None:
            return
        for record in new_records:
            stream.write(format_trace_line(record) + "\n")


class StalledCandidateCounter(Hook):
    @hook(CANDIDATE_STALLED)
    def count(self, new_records, old_records=None, ctx=None):
        if ctx is not None:
            ctx.stalled += len(new_records)
        for record in new_records:
            logger.debug(
                "stalled candidate v=%d X=%s: %d -> %d (refined %d)",
                record.v,
                record.side.value,
                record.contradicting_before,
                record.contradicting_raw,
                record.contradicting_refined,
            )


class RepairAudit(Hook):
    """Logs what the cover and the repair did to the arc set."""

    @hook(BEFORE_COVER, priority=Priority.HIGHEST, condition=~IsHemimetric())
    def warn_not_hemimetric(self, new_records, old_records=None, ctx=None):
        for inst in new_records:
            logger.warning("n=%d instance violates the triangle inequalities; repair will refuse it", inst.n)

    @hook(AFTER_COVER, condition=HasContradictingPairs())
    def report_contradictions(self, new_records, old_records=None, ctx=None):
        for delta in new_records:
            logger.debug("cover has %d contradicting pairs", len(contradicting_pairs(delta)))

    @hook(AFTER_REPAIR, condition=HasChanged("support"))
    def report_arc_changes(self, new_records, old_records=None, ctx=None):
        for repaired, cover in zip(new_records, old_records):
            logger.info(
                "repair dropped %d arcs and added %d",
                len(cover.support - repaired.support),
                len(repaired.support - cover.support),
            )
