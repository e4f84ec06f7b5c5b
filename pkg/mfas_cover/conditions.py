"""
Hook conditions over pipeline records.

Records are the payloads of pipeline events: instances, solutions, repair
rounds, stalled candidates and bounds. ``original_record`` is the matching
entry of ``old_records``: the previous round for ``after_round`` and the
input solution for ``after_repair``.
"""

import logging

from mfas_cover.instance import validate_hemimetric, validate_kgonal, validate_probability

logger = logging.getLogger(__name__)


def resolve_dotted_attr(record, dotted_path):
    """
    Resolve a dotted attribute path, e.g. "chosen_x.value".
    An empty path returns the record itself.
    """
    if not dotted_path:
        return record
    for attr in dotted_path.split("."):
        if record is None:
            return None
        record = getattr(record, attr, None)
    return record


class HookCondition:
    def check(self, record, original_record=None):
        raise NotImplementedError

    def __call__(self, record, original_record=None):
        return self.check(record, original_record)

    def __and__(self, other):
        return AndCondition(self, other)

    def __or__(self, other):
        return OrCondition(self, other)

    def __invert__(self):
        return NotCondition(self)


class IsEqual(HookCondition):
    """
    ``field == value``. With ``only_on_change`` the previous record must
    have held a different value, so a round that merely keeps the value
    does not match.
    """

    def __init__(self, field, value, only_on_change=False):
        self.field = field
        self.value = value
        self.only_on_change = only_on_change

    def check(self, record, original_record=None):
        current = resolve_dotted_attr(record, self.field)
        if self.only_on_change:
            if original_record is None:
                return False
            previous = resolve_dotted_attr(original_record, self.field)
            return previous != self.value and current == self.value
        return current == self.value


class HasChanged(HookCondition):
    def __init__(self, field, has_changed=True):
        self.field = field
        self.has_changed = has_changed

    def check(self, record, original_record=None):
        if original_record is None:
            return False
        current = resolve_dotted_attr(record, self.field)
        previous = resolve_dotted_attr(original_record, self.field)
        return (current != previous) == self.has_changed


class IsGreaterThan(HookCondition):
    def __init__(self, field, value):
        self.field = field
        self.value = value

    def check(self, record, original_record=None):
        current = resolve_dotted_attr(record, self.field)
        return current is not None and current > self.value


class IsLessThan(HookCondition):
    def __init__(self, field, value):
        self.field = field
        self.value = value

    def check(self, record, original_record=None):
        current = resolve_dotted_attr(record, self.field)
        return current is not None and current < self.value


# Instance predicates. ``field`` points at the Instance inside the record;
# by default the record is the Instance.


class IsHemimetric(HookCondition):
    def __init__(self, field=None):
        self.field = field

    def check(self, record, original_record=None):
        inst = resolve_dotted_attr(record, self.field)
        return inst is not None and validate_hemimetric(inst).holds


class SatisfiesKGonal(HookCondition):
    def __init__(self, k, field=None):
        self.k = k
        self.field = field

    def check(self, record, original_record=None):
        inst = resolve_dotted_attr(record, self.field)
        return inst is not None and validate_kgonal(inst, self.k).holds


class IsProbabilityLike(HookCondition):
    def __init__(self, field=None):
        self.field = field

    def check(self, record, original_record=None):
        inst = resolve_dotted_attr(record, self.field)
        return inst is not None and validate_probability(inst).holds


# Solution predicates over a DeltaSolution record.


class IsIntegral(HookCondition):
    def __init__(self, field=None):
        self.field = field

    def check(self, record, original_record=None):
        delta = resolve_dotted_attr(record, self.field)
        return delta is not None and delta.integral


class HasContradictingPairs(HookCondition):
    """Both arcs of some pair are set; only meaningful for integral solutions."""

    def __init__(self, field=None):
        self.field = field

    def check(self, record, original_record=None):
        delta = resolve_dotted_attr(record, self.field)
        if delta is None or not delta.integral:
            return False
        support = delta.support
        return any((j, i) in support for i, j in support)


class AndCondition(HookCondition):
    def __init__(self, cond1, cond2):
        self.cond1 = cond1
        self.cond2 = cond2

    def check(self, record, original_record=None):
        return self.cond1.check(record, original_record) and self.cond2.check(record, original_record)


class OrCondition(HookCondition):
    def __init__(self, cond1, cond2):
        self.cond1 = cond1
        self.cond2 = cond2

    def check(self, record, original_record=None):
        return self.cond1.check(record, original_record) or self.cond2.check(record, original_record)


class NotCondition(HookCondition):
    def __init__(self, cond):
        self.cond = cond

    def check(self, record, original_record=None):
        return not self.cond.check(record, original_record)
