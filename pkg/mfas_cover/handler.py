import logging
import threading

from mfas_cover.registry import register_hook, unregister_handler

logger = logging.getLogger(__name__)


# Thread-local dispatch state
class HookVars(threading.local):
    def __init__(self):
        self.new = None
        self.old = None
        self.event = None
        self.depth = 0


hook_vars = HookVars()


class HookMeta(type):
    _registered = set()

    def __new__(mcs, name, bases, namespace):
        cls = super().__new__(mcs, name, bases, namespace)
        for method_name, method in namespace.items():
            if hasattr(method, "hooks_hooks"):
                for event, condition, priority in method.hooks_hooks:
                    key = (event, cls, method_name)
                    if key not in HookMeta._registered:
                        register_hook(
                            event=event,
                            handler_cls=cls,
                            method_name=method_name,
                            condition=condition,
                            priority=priority,
                        )
                        HookMeta._registered.add(key)
        return cls


class Hook(metaclass=HookMeta):
    """
    Base class for pipeline observers.

    Methods decorated with ``@hook(event, ...)`` are registered when the
    subclass is created and called by ``engine.run`` with keyword
    arguments ``new_records``, ``old_records`` and ``ctx``.
    """

    @classmethod
    def detach(cls) -> int:
        HookMeta._registered = {key for key in HookMeta._registered if key[1] is not cls}
        return unregister_handler(cls)
