from mfas_cover.priority import DEFAULT_PRIORITY


def hook(event, *, condition=None, priority=DEFAULT_PRIORITY):
    """
    Mark a ``Hook`` method as a handler for a pipeline event.
    Stackable; if no priority is provided, uses Priority.NORMAL (50).
    """

    def decorator(fn):
        if not hasattr(fn, "hooks_hooks"):
            fn.hooks_hooks = []
        fn.hooks_hooks.append((event, condition, priority))
        return fn

    return decorator
