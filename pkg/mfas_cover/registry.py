import logging
from collections.abc import Callable
from typing import Union

from mfas_cover.priority import Priority

logger = logging.getLogger(__name__)

_hooks: dict[str, list[tuple[type, str, Callable, int]]] = {}


def register_hook(event, handler_cls, method_name, condition, priority: Union[int, Priority]):
    hooks = _hooks.setdefault(event, [])
    hooks.append((handler_cls, method_name, condition, priority))
    # keep sorted by priority
    hooks.sort(key=lambda x: x[3])
    logger.debug("Registered %s.%s for %s", handler_cls.__name__, method_name, event)


def get_hooks(event):
    hooks = _hooks.get(event, [])
    if hooks:
        logger.debug("get_hooks %s found %d hooks", event, len(hooks))
    return hooks


def unregister_handler(handler_cls):
    """Drop every registration of ``handler_cls``; returns how many were removed."""
    removed = 0
    for event, hooks in _hooks.items():
        kept = [h for h in hooks if h[0] is not handler_cls]
        removed += len(hooks) - len(kept)
        _hooks[event] = kept
    return removed


def list_all_hooks():
    """Debug function to list all registered hooks"""
    return _hooks
