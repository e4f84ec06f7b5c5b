import threading
from typing import Optional, TextIO

from mfas_cover.handler import hook_vars

_hook_context = threading.local()


def set_bypass_hooks(bypass_hooks):
    """Set the current bypass_hooks state for the current thread."""
    _hook_context.bypass_hooks = bypass_hooks


def get_bypass_hooks():
    """Get the current bypass_hooks state for the current thread."""
    return getattr(_hook_context, "bypass_hooks", False)


class SolveContext:
    """
    Per-run state handed to every hook.

    ``trace_stream`` receives the repair trace lines when set; ``bypass_hooks``
    silences dispatch for runs given this context. Used as a context manager
    it also silences runs without a context until the block exits.
    """

    def __init__(self, trace_stream: Optional[TextIO] = None, bypass_hooks=False):
        self.trace_stream = trace_stream
        self.bypass_hooks = bypass_hooks
        self.stalled = 0
        self._saved_bypass = []

    def __enter__(self):
        self._saved_bypass.append(get_bypass_hooks())
        set_bypass_hooks(self.bypass_hooks)
        return self

    def __exit__(self, exc_type, exc, tb):
        set_bypass_hooks(self._saved_bypass.pop())
        return False

    @property
    def is_executing(self):
        """True while a hook is running; guards against re-entrant dispatch."""
        return hook_vars.event is not None

    @property
    def current_event(self):
        return hook_vars.event

    @property
    def execution_depth(self):
        return hook_vars.depth
