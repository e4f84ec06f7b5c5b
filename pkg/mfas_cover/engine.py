import logging

from mfas_cover.context import get_bypass_hooks
from mfas_cover.handler import hook_vars
from mfas_cover.registry import get_hooks

logger = logging.getLogger(__name__)


def run(event, new_records, old_records=None, ctx=None):
    """
    Run hooks for an event over records.

    Each hook sees only the records its condition accepts; ``old_records``
    pairs positionally with ``new_records``.
    """
    if not new_records:
        return

    hooks = get_hooks(event)
    if not hooks:
        return

    if ctx is not None and ctx.bypass_hooks or ctx is None and get_bypass_hooks():
        logger.debug("engine.run %s bypassed", event)
        return

    logger.debug("engine.run %s %d records", event, len(new_records))
    old_records = old_records or [None] * len(new_records)

    previous = (hook_vars.event, hook_vars.new, hook_vars.old)
    hook_vars.depth += 1
    hook_vars.event = event
    try:
        for handler_cls, method_name, condition, priority in hooks:
            to_process_new = []
            to_process_old = []
            for new, original in zip(new_records, old_records, strict=True):
                if condition is None or condition.check(new, original):
                    to_process_new.append(new)
                    to_process_old.append(original)

            if not to_process_new:
                continue
            hook_vars.new = to_process_new
            hook_vars.old = to_process_old
            logger.debug("Executing %s.%s for %d records", handler_cls.__name__, method_name, len(to_process_new))
            func = getattr(handler_cls(), method_name)
            func(
                new_records=to_process_new,
                old_records=to_process_old if any(r is not None for r in to_process_old) else None,
                ctx=ctx,
            )
    finally:
        hook_vars.event, hook_vars.new, hook_vars.old = previous
        hook_vars.depth -= 1
