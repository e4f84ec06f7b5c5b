"""
Tests for the cost-preserving repair loop and its building blocks.
"""

from unittest import TestCase

from mfas_cover.covering import minimalize, primal_dual_cover
from mfas_cover.enums import ReverseSide
from mfas_cover.exceptions import LemmaViolated, NotFeasibleInput, NotHemimetric
from mfas_cover.gen import bundled_instance
from mfas_cover.oracle import exact_min_extension
from mfas_cover.pipeline import solve_pipeline
from mfas_cover.repair import (
    BasicTriple,
    RepairRound,
    SMESets,
    basic_triples,
    build_candidate,
    check_lemma1,
    contradicting_pairs,
    format_trace_line,
    repair,
    sme_sets,
)
from mfas_cover.solution import (
    DeltaSolution,
    check_cover_feasible,
    check_fas_feasible,
    cost,
    permutation_from_delta,
)
from tests.helpers import hemimetric_corpus, k3, units


def _all_ones(inst):
    n = inst.n
    return DeltaSolution.from_arcs(
        inst.poset, [(i, j) for i in range(n) for j in range(n) if i != j and not inst.poset.comparable(i, j)]
    )


class TripleTestCase(TestCase):
    def setUp(self):
        self.inst = k3()
        # 0 and 2 contradict; 0->1->2 closes a basic triple
        self.delta = DeltaSolution.from_arcs(self.inst.poset, [(0, 1), (1, 2), (0, 2), (2, 0)])

    def test_contradicting_pairs(self):
        self.assertEqual(contradicting_pairs(self.delta), {(0, 2)})
        self.assertEqual(contradicting_pairs(_all_ones(self.inst)), {(0, 1), (0, 2), (1, 2)})

    def test_basic_triples(self):
        self.assertEqual(basic_triples(self.delta), {BasicTriple(0, 1, 2)})

    def test_sme_sets(self):
        self.assertEqual(sme_sets(self.delta, 0).S, {(1, 2)})
        self.assertEqual(sme_sets(self.delta, 1).M, {(2, 0)})
        self.assertEqual(sme_sets(self.delta, 2).E, {(0, 1)})
        self.assertTrue(sme_sets(self.delta, 1).S == sme_sets(self.delta, 1).E == frozenset())

    def test_overlapping_sets_are_rejected(self):
        with self.assertRaises(LemmaViolated):
            SMESets(0, S=frozenset({(1, 2)}), M=frozenset({(1, 2)}))

    def test_candidate_reversing_s(self):
        candidate = build_candidate(self.delta, self.inst, 0, ReverseSide.S)
        self.assertEqual(candidate.support, {(0, 1), (2, 1), (0, 2), (2, 0)})

    def test_candidate_reversing_e(self):
        candidate = build_candidate(self.delta, self.inst, 2, "E")
        self.assertEqual(candidate.support, {(1, 0), (1, 2), (0, 2), (2, 0)})

    def test_candidate_dropping_m(self):
        candidate = build_candidate(self.delta, self.inst, 1, ReverseSide.S)
        self.assertEqual(candidate.support, {(0, 1), (1, 2), (0, 2)})


class RepairTestCase(TestCase):
    def test_minimalization_finishes_the_job(self):
        inst = k3()
        delta = DeltaSolution.from_arcs(inst.poset, [(0, 1), (1, 2), (0, 2), (2, 0)])
        repaired, trace = repair(delta, inst)
        self.assertEqual(repaired.support, {(0, 1), (1, 2), (0, 2)})
        self.assertEqual(str(permutation_from_delta(repaired, inst)), "0 1 2")
        self.assertEqual(len(trace), 1)
        record = trace.iterations[0]
        self.assertEqual((record.cost_before, record.cost_after), (units(5), units(4)))
        self.assertIsNone(record.chosen_v)
        self.assertEqual(trace.accepted, [])

    def test_all_ones(self):
        inst = k3()
        repaired, trace = repair(_all_ones(inst), inst)
        self.assertEqual(str(permutation_from_delta(repaired, inst)), "2 0 1")
        self.assertEqual(cost(repaired, inst).variable_cost, units(4))
        self.assertEqual(trace.iterations[0].contradicting_before, 3)
        self.assertEqual(trace.iterations[-1].contradicting_after, 0)

    def test_linear_extension_is_left_alone(self):
        inst = k3()
        delta = DeltaSolution.from_arcs(inst.poset, [(0, 1), (1, 2), (0, 2)])
        repaired, trace = repair(delta, inst)
        self.assertEqual(repaired, delta)
        self.assertEqual(len(trace), 0)

    def test_rejects_non_hemimetric(self):
        inst = bundled_instance("appendix_a")
        with self.assertRaises(NotHemimetric):
            repair(_all_ones(inst), inst)

    def test_pipeline_refuses_the_non_hemimetric_example(self):
        inst = bundled_instance("appendix_a")
        with self.assertRaises(NotHemimetric):
            solve_pipeline(inst)
        self.assertEqual(exact_min_extension(inst).best_total_cost, units("7.5"))

    def test_rejects_infeasible(self):
        inst = k3()
        with self.assertRaises(NotFeasibleInput):
            repair(DeltaSolution.from_arcs(inst.poset, [(0, 1)]), inst)

    def test_corpus(self):
        """Repaired covers are linear extensions no costlier than the input."""
        for inst in hemimetric_corpus(15, sizes=(4, 5, 6, 7)):
            for start in (primal_dual_cover(inst), _all_ones(inst)):
                with self.subTest(digest=inst.digest[:8], size=len(start.support)):
                    repaired, trace = repair(start, inst)
                    self.assertEqual(check_fas_feasible(repaired, inst), [])
                    self.assertLessEqual(cost(repaired, inst).total_cost, cost(start, inst).total_cost)
                    self.assertTrue(inst.poset.respects(permutation_from_delta(repaired, inst).order))
                    for record in trace.iterations:
                        self.assertLessEqual(record.cost_after, record.cost_before)
                        self.assertLess(record.contradicting_after, max(record.contradicting_before, 1))

    def test_minimal_covers_keep_one_way_arcs_along_the_poset(self):
        for inst in hemimetric_corpus(10, sizes=(4, 5, 6)):
            delta = minimalize(primal_dual_cover(inst), inst)
            with self.subTest(digest=inst.digest[:8]):
                self.assertEqual(check_cover_feasible(delta, inst), [])
                self.assertEqual(check_lemma1(delta, inst), [])


class TraceFormatTestCase(TestCase):
    def test_accepted_round(self):
        record = RepairRound(units(5), units("4.5"), 2, 1, 3, ReverseSide.E, 4)
        self.assertEqual(
            format_trace_line(record),
            "cost_before=5 cost_after=4.5 contradicting_before=2 contradicting_after=1 "
            "chosen_v=3 chosen_x=E triples=4",
        )

    def test_minimalization_round(self):
        record = RepairRound(units(9), units(4), 3, 0, None, None, 0)
        self.assertIn("chosen_v=none chosen_x=none", format_trace_line(record))
