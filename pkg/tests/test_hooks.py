"""
Tests for pipeline hooks: registration order, conditions, dispatch and the
built-in observers.
"""

import io
import logging
from dataclasses import dataclass
from fractions import Fraction
from unittest import TestCase

from mfas_cover import engine
from mfas_cover.conditions import (
    HasChanged,
    IsEqual,
    IsGreaterThan,
    HasContradictingPairs,
    IsHemimetric,
    IsIntegral,
    IsLessThan,
    IsProbabilityLike,
    SatisfiesKGonal,
    resolve_dotted_attr,
)
from mfas_cover.constants import AFTER_COVER, AFTER_REPAIR, AFTER_ROUND, BEFORE_COVER
from mfas_cover.context import SolveContext, get_bypass_hooks, set_bypass_hooks
from mfas_cover.covering import primal_dual_cover
from mfas_cover.decorators import hook
from mfas_cover.exceptions import NotHemimetric
from mfas_cover.gen import bundled_instance
from mfas_cover.handler import Hook, hook_vars
from mfas_cover.pipeline import solve_pipeline
from mfas_cover.priority import Priority
from mfas_cover.registry import get_hooks
from mfas_cover.repair import repair
from mfas_cover.solution import DeltaSolution
from tests.helpers import k3


DISPATCH = "test_dispatch"


@dataclass
class Record:
    name: str
    value: int
    parent: "Record" = None


class ConditionTestCase(TestCase):
    def test_dotted_paths(self):
        record = Record("child", 1, Record("root", 7))
        self.assertEqual(resolve_dotted_attr(record, "parent.value"), 7)
        self.assertIsNone(resolve_dotted_attr(Record("x", 1), "parent.value"))
        self.assertIs(resolve_dotted_attr(record, ""), record)

    def test_field_conditions(self):
        record = Record("a", 5)
        self.assertTrue(IsEqual("value", 5).check(record))
        self.assertFalse(IsEqual("name", "b").check(record))
        self.assertTrue(IsGreaterThan("value", 4).check(record))
        self.assertFalse(IsLessThan("value", 5).check(record))
        self.assertTrue(IsLessThan("value", 6).check(record))
        self.assertFalse(IsGreaterThan("missing", 0).check(record))

    def test_change_conditions(self):
        old, new = Record("a", 1), Record("a", 2)
        self.assertTrue(HasChanged("value").check(new, old))
        self.assertFalse(HasChanged("name").check(new, old))
        self.assertTrue(IsEqual("value", 2, only_on_change=True).check(new, old))
        self.assertFalse(IsEqual("value", 2, only_on_change=True).check(new, new))
        self.assertFalse(IsEqual("value", 2, only_on_change=True).check(new))

    def test_composition(self):
        record = Record("a", 5)
        self.assertTrue((IsEqual("name", "a") & IsGreaterThan("value", 1)).check(record))
        self.assertTrue((IsEqual("name", "b") | IsGreaterThan("value", 1)).check(record))
        self.assertFalse((~IsEqual("name", "a")).check(record))

    def test_instance_conditions(self):
        self.assertTrue(IsHemimetric().check(k3()))
        self.assertFalse(IsHemimetric().check(bundled_instance("appendix_a")))
        self.assertTrue(IsProbabilityLike().check(bundled_instance("appendix_a")))
        self.assertTrue(SatisfiesKGonal(4).check(k3()))

    def test_solution_conditions(self):
        inst = k3()
        cover = primal_dual_cover(inst)
        self.assertTrue(IsIntegral().check(cover))
        self.assertTrue(HasContradictingPairs().check(cover))
        repaired, _ = repair(cover, inst)
        self.assertFalse(HasContradictingPairs().check(repaired))
        half = DeltaSolution(inst.poset, {(0, 1): Fraction(1, 2), (1, 0): Fraction(1, 2)})
        self.assertFalse(IsIntegral().check(half))
        self.assertFalse(HasContradictingPairs().check(half))


class DispatchTestCase(TestCase):
    def setUp(self):
        calls = []
        self.calls = calls

        class Recorder(Hook):
            @hook(DISPATCH, priority=Priority.LOW)
            def late(self, new_records, old_records=None, ctx=None):
                calls.append(("late", [r.name for r in new_records]))

            @hook(DISPATCH, priority=Priority.HIGH, condition=IsGreaterThan("value", 2))
            def early(self, new_records, old_records=None, ctx=None):
                calls.append(("early", [r.name for r in new_records]))
                calls.append(("depth", ctx.execution_depth, ctx.current_event))

        self.handler = Recorder

    def tearDown(self):
        self.handler.detach()
        set_bypass_hooks(False)

    def test_priority_order_and_filtering(self):
        records = [Record("a", 1), Record("b", 3)]
        engine.run(DISPATCH, records, ctx=SolveContext())
        self.assertEqual(
            self.calls,
            [("early", ["b"]), ("depth", 1, DISPATCH), ("late", ["a", "b"])],
        )
        self.assertIsNone(hook_vars.event)
        self.assertEqual(hook_vars.depth, 0)

    def test_registry_is_sorted(self):
        priorities = [entry[3] for entry in get_hooks(DISPATCH)]
        self.assertEqual(priorities, sorted(priorities))

    def test_bypass(self):
        engine.run(DISPATCH, [Record("a", 5)], ctx=SolveContext(bypass_hooks=True))
        self.assertEqual(self.calls, [])
        self.assertFalse(get_bypass_hooks())

    def test_bypass_does_not_leak_into_later_runs(self):
        SolveContext(bypass_hooks=True)
        engine.run(DISPATCH, [Record("a", 1)])
        self.assertEqual(self.calls, [("late", ["a"])])

    def test_bypass_block_is_restored_on_exit(self):
        with SolveContext(bypass_hooks=True) as ctx:
            self.assertTrue(get_bypass_hooks())
            engine.run(DISPATCH, [Record("a", 1)])
            engine.run(DISPATCH, [Record("a", 1)], ctx=ctx)
            with SolveContext():
                self.assertFalse(get_bypass_hooks())
            self.assertTrue(get_bypass_hooks())
        self.assertEqual(self.calls, [])
        self.assertFalse(get_bypass_hooks())
        engine.run(DISPATCH, [Record("a", 1)])
        self.assertEqual(self.calls, [("late", ["a"])])

    def test_empty_records(self):
        engine.run(DISPATCH, [], ctx=SolveContext())
        self.assertEqual(self.calls, [])

    def test_detach(self):
        self.assertEqual(self.handler.detach(), 2)
        engine.run(DISPATCH, [Record("a", 5)], ctx=SolveContext())
        self.assertEqual(self.calls, [])


class PipelineEventTestCase(TestCase):
    def setUp(self):
        seen = []
        rounds = []
        self.seen = seen
        self.rounds = rounds

        class Watcher(Hook):
            @hook(AFTER_COVER)
            def cover(self, new_records, old_records=None, ctx=None):
                seen.append(("cover", len(new_records[0].support)))

            @hook(AFTER_ROUND, condition=IsEqual("chosen_v", None))
            def minimalized(self, new_records, old_records=None, ctx=None):
                seen.append(("round", new_records[0].contradicting_after))

            @hook(AFTER_ROUND)
            def paired(self, new_records, old_records=None, ctx=None):
                rounds.append((new_records[0], None if old_records is None else old_records[0]))

            @hook(AFTER_REPAIR, condition=HasChanged("support"))
            def done(self, new_records, old_records=None, ctx=None):
                repaired, cover = new_records[0], old_records[0]
                seen.append(("repair", len(cover.support), repaired.support < cover.support))

        self.handler = Watcher

    def tearDown(self):
        self.handler.detach()
        set_bypass_hooks(False)

    def test_events_of_a_solve(self):
        trace = io.StringIO()
        solve_pipeline(k3(), ctx=SolveContext(trace_stream=trace))
        self.assertEqual(self.seen, [("cover", 6), ("round", 0), ("repair", 6, True)])
        self.assertEqual(
            trace.getvalue(),
            "cost_before=9 cost_after=4 contradicting_before=3 contradicting_after=0 "
            "chosen_v=none chosen_x=none triples=0\n",
        )

    def test_bypass_silences_the_trace(self):
        trace = io.StringIO()
        solve_pipeline(k3(), ctx=SolveContext(trace_stream=trace, bypass_hooks=True))
        self.assertEqual(self.seen, [])
        self.assertEqual(trace.getvalue(), "")

    def test_rounds_carry_the_previous_round(self):
        for inst in (k3(), bundled_instance("appendix_b")):
            del self.rounds[:]
            _, report = solve_pipeline(inst, ctx=SolveContext())
            self.assertEqual(len(self.rounds), report.iterations)
            self.assertTrue(all(old is None for _, old in self.rounds[:1]))
            for (_, old), (new, _) in zip(self.rounds[1:], self.rounds):
                self.assertIs(old, new)

    def test_unchanged_repair_is_filtered(self):
        inst = k3()
        repaired, _ = repair(primal_dual_cover(inst), inst)
        del self.seen[:]
        repair(repaired, inst, ctx=SolveContext())
        self.assertEqual(self.seen, [])


class RepairAuditTestCase(TestCase):
    def test_logs_of_a_solve(self):
        with self.assertLogs("mfas_cover.observers", level=logging.DEBUG) as logs:
            solve_pipeline(k3(), ctx=SolveContext())
        self.assertIn("DEBUG:mfas_cover.observers:cover has 3 contradicting pairs", logs.output)
        self.assertIn("INFO:mfas_cover.observers:repair dropped 3 arcs and added 0", logs.output)

    def test_warns_before_refusing_a_non_hemimetric_instance(self):
        with self.assertLogs("mfas_cover.observers", level=logging.WARNING) as logs:
            with self.assertRaises(NotHemimetric):
                solve_pipeline(bundled_instance("appendix_a"), ctx=SolveContext())
        self.assertTrue(any("violates the triangle inequalities" in line for line in logs.output))
