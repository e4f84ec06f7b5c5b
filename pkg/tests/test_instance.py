"""
Tests for weights, the instance text format and the weight-class validators.
"""

from fractions import Fraction
from unittest import TestCase

from mfas_cover.constants import SCALE
from mfas_cover.exceptions import CapExceeded, FormatError, PosetError, ValidationFailed, WeightError
from mfas_cover.gen import bundled_instance
from mfas_cover.instance import (
    Instance,
    format_amount,
    format_ratio,
    parse_instance,
    parse_weight,
    serialize_instance,
    to_nanos,
    validate_hemimetric,
    validate_kgonal,
    validate_probability,
)
from mfas_cover.settings import DEFAULT_SETTINGS
from tests.helpers import K3_ROWS, k3

K3_TEXT = "mfas 1\nn 3\nweights\n0 1 2\n2 0 1\n1 2 0\nend\n"


class WeightTestCase(TestCase):
    """Exact decimal <-> fixed point conversion."""

    def test_parse_weight(self):
        self.assertEqual(parse_weight("0.5"), SCALE // 2)
        self.assertEqual(parse_weight("3"), 3 * SCALE)
        self.assertEqual(parse_weight("0.000000001"), 1)

    def test_parse_weight_rejects_too_many_digits(self):
        with self.assertRaises(WeightError):
            parse_weight("1.0000000001")

    def test_parse_weight_rejects_negative(self):
        with self.assertRaises(WeightError):
            parse_weight("-1")

    def test_parse_weight_rejects_garbage(self):
        with self.assertRaises(FormatError):
            parse_weight("1e3")

    def test_to_nanos(self):
        self.assertEqual(to_nanos(2), 2 * SCALE)
        self.assertEqual(to_nanos(Fraction(1, 4)), SCALE // 4)
        with self.assertRaises(WeightError):
            to_nanos(Fraction(1, 3))

    def test_format_amount(self):
        self.assertEqual(format_amount(15 * SCALE // 2), "7.5")
        self.assertEqual(format_amount(4 * SCALE), "4")
        self.assertEqual(format_amount(0), "0")
        self.assertEqual(format_amount(Fraction(SCALE, 3)), "1/3")
        self.assertEqual(format_amount(1), "0.000000001")

    def test_format_ratio(self):
        self.assertEqual(format_ratio(Fraction(1, 3)), "0.333333333")
        self.assertEqual(format_ratio(Fraction(2, 3)), "0.666666667")
        self.assertEqual(format_ratio(Fraction(41, 12)), "3.416666667")
        self.assertEqual(format_ratio(Fraction(1, 20)), "0.05")
        self.assertEqual(format_ratio(Fraction(3)), "3")
        self.assertEqual(format_ratio(Fraction(1, 3), digits=2), "0.33")
        self.assertEqual(format_ratio(Fraction(1, 10**12)), "0")


class InstanceFormatTestCase(TestCase):
    def test_parse_k3(self):
        inst = parse_instance(K3_TEXT)
        self.assertEqual(inst, k3())
        self.assertEqual(inst.weight(1, 0), 2 * SCALE)

    def test_serialize_matches_bundled_files(self):
        self.assertEqual(serialize_instance(bundled_instance("k3_demo")), K3_TEXT)
        text = serialize_instance(bundled_instance("appendix_b"))
        self.assertIn("prec 0 3\nprec 2 1\n", text)

    def test_serialize_writes_the_reduction(self):
        inst = Instance.from_weights(K3_ROWS, [(0, 1), (1, 2)])
        text = serialize_instance(inst)
        self.assertIn("prec 0 1\nprec 1 2\nweights", text)
        self.assertEqual(parse_instance(text), inst)

    def test_missing_end(self):
        with self.assertRaises(FormatError):
            parse_instance(K3_TEXT.replace("end\n", ""))

    def test_trailing_content(self):
        with self.assertRaises(FormatError):
            parse_instance(K3_TEXT + "extra\n")

    def test_bad_header(self):
        with self.assertRaises(FormatError) as ctx:
            parse_instance(K3_TEXT.replace("mfas 1", "mfas 2"))
        self.assertEqual(ctx.exception.line, 1)
        self.assertEqual(ctx.exception.exit_code, 2)

    def test_short_row(self):
        with self.assertRaises(FormatError):
            parse_instance(K3_TEXT.replace("2 0 1", "2 0"))

    def test_nonzero_diagonal(self):
        with self.assertRaises(WeightError):
            parse_instance(K3_TEXT.replace("2 0 1", "2 1 1"))

    def test_cyclic_precedences(self):
        text = K3_TEXT.replace("weights", "prec 0 1\nprec 1 0\nweights")
        with self.assertRaises(PosetError):
            parse_instance(text)

    def test_fixed_cost_and_digest(self):
        inst = k3(pairs=[(0, 1)])
        self.assertEqual(inst.fixed_cost, SCALE)
        self.assertEqual(inst.digest, k3(pairs=[(0, 1)]).digest)
        self.assertNotEqual(inst.digest, k3().digest)


class HemimetricTestCase(TestCase):
    def test_k3_is_hemimetric(self):
        report = validate_hemimetric(k3())
        self.assertTrue(report.holds)
        self.assertTrue(report.is_hemimetric)

    def test_shortcut_violation(self):
        inst = Instance.from_weights([[0, 1, 5], [1, 0, 1], [1, 1, 0]])
        report = validate_hemimetric(inst)
        self.assertFalse(report.holds)
        self.assertIn((0, 1, 2), report.violations)

    def test_appendix_a_is_not_hemimetric(self):
        self.assertFalse(validate_hemimetric(bundled_instance("appendix_a")).holds)


class KGonalTestCase(TestCase):
    def test_k_below_three(self):
        with self.assertRaises(ValidationFailed):
            validate_kgonal(k3(), 2)

    def test_constant_twos_are_three_gonal(self):
        inst = Instance.from_weights([[0 if i == j else 2 for j in range(5)] for i in range(5)])
        report = validate_kgonal(inst, 3)
        self.assertTrue(report.holds)
        self.assertFalse(report.sampled)

    def test_four_gonal_violation(self):
        rows = [[0 if i == j else 1 for j in range(4)] for i in range(4)]
        rows[0][3] = 4
        report = validate_kgonal(Instance.from_weights(rows), 4)
        self.assertIn((0, 1, 2, 3), report.violations)

    def test_large_instances_are_sampled(self):
        n = DEFAULT_SETTINGS.kgonal_exhaustive_cap + 1
        inst = Instance.from_weights([[0 if i == j else 1 for j in range(n)] for i in range(n)])
        report = validate_kgonal(inst, 5, samples=500, seed=7)
        self.assertTrue(report.sampled)
        self.assertEqual(report.seed, 7)
        self.assertTrue(report.holds)
        with self.assertRaises(CapExceeded):
            validate_kgonal(inst, 5, exhaustive=True)


class ProbabilityTestCase(TestCase):
    def test_appendix_a_sums_to_one(self):
        report = validate_probability(bundled_instance("appendix_a"))
        self.assertTrue(report.holds)

    def test_k3_does_not(self):
        report = validate_probability(k3())
        self.assertEqual(set(report.violations), {(0, 1), (0, 2), (1, 2)})
