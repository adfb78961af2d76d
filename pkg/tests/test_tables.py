import io
import unittest

from bentcodebook.construction import ConstructionKind
from bentcodebook.tables import (
    PUBLISHED_ROWS,
    TABLE_COLUMNS,
    Provenance,
    compare_with_published,
    format_sig,
    format_text,
    parse_printed,
    published_q_list,
    round_sig,
    table_rows,
    write_csv,
)


class TestRounding(unittest.TestCase):

    def test_ties_to_even(self):
        self.assertEqual(round_sig(0.123445), 0.12344)
        self.assertEqual(round_sig(0.123455), 0.12346)

    def test_small_values(self):
        self.assertEqual(round_sig(1 / 493), 0.0020284)
        self.assertEqual(round_sig(0.0), 0.0)

    def test_fixed_point_text(self):
        self.assertEqual(format_sig(0.4264014327112209), "0.42640")
        self.assertEqual(format_sig(0.8528028654224417), "0.85280")
        self.assertEqual(format_sig(1 / 10961), "0.000091233")
        self.assertEqual(format_sig(0.123445), "0.12344")
        self.assertEqual(format_sig(123456.0), "123460")
        self.assertEqual(format_sig(0.5), "0.5")
        self.assertEqual(format_sig(2.0), "2")
        self.assertEqual(format_sig(0.0), "0")
        self.assertEqual(format_sig(None), "")

    def test_printed_entries(self):
        self.assertAlmostEqual(parse_printed("0.45249×10⁻²"), 0.0045249, places=12)
        self.assertAlmostEqual(parse_printed("0.91230×10⁻⁴"), 9.1230e-5, places=14)
        self.assertEqual(parse_printed("0.91293"), 0.91293)
        with self.assertRaises(ValueError):
            parse_printed("n/a")


class TestRows(unittest.TestCase):

    def test_construction_one(self):
        (row,) = table_rows(1, [493])
        self.assertEqual((row.p_min, row.Q, row.N, row.K), (17, 493, 4374882, 243049))
        self.assertEqual((row.I_max, row.I_W, row.ratio), (0.0020284, 0.0019712, 0.97183))
        self.assertEqual(row.provenance, Provenance.ANALYTIC)

    def test_smallest_row(self):
        (row,) = table_rows(1, [2])
        self.assertEqual((row.p_min, row.N, row.K), (2, 12, 4))
        self.assertEqual((row.I_max, row.I_W, row.ratio), (0.5, 0.4264, 0.8528))

    def test_construction_two_carries_variant(self):
        (row,) = table_rows(2, [437])
        self.assertEqual(row.I_max, 0.0022936)
        self.assertEqual(row.I_W, 0.0022331)
        self.assertEqual(row.variant_I_max, 0.002291)
        self.assertEqual(row.variant_ratio, 0.97474)
        self.assertEqual(row.to_dict()["construction"], 2)

    def test_ratios_increase(self):
        rows = table_rows(1, published_q_list(1))
        ratios = [row.ratio for row in rows]
        self.assertEqual(ratios, sorted(ratios))
        self.assertGreater(ratios[-1], 0.994)

    def test_sweep(self):
        rows = table_rows(1, [2, 3, 35], sweep=True, sweep_guard=200, threads=1)
        self.assertEqual([r.provenance for r in rows], [Provenance.SWEPT, Provenance.SWEPT, Provenance.ANALYTIC])
        self.assertEqual(rows[0].swept_I_max, 0.5)
        self.assertIsNone(rows[2].swept_I_max)

    def test_sweep_construction_two(self):
        (row,) = table_rows(2, [4], sweep=True, ell=1, threads=1)
        self.assertEqual(row.provenance, Provenance.SWEPT)
        self.assertEqual(row.swept_I_max, round_sig(1 / 3))


class TestPublished(unittest.TestCase):

    def test_against_printed_tables(self):
        for kind in ConstructionKind:
            rows = table_rows(kind, published_q_list(kind))
            for row, published in zip(rows, PUBLISHED_ROWS[kind]):
                diffs = compare_with_published(row, published)
                self.assertLess(diffs["I_max"], 5e-5, (kind, row.Q))
                self.assertLess(diffs["I_W"], 5e-5, (kind, row.Q))
                self.assertLess(diffs["ratio"], 5e-4, (kind, row.Q))
                self.assertEqual(row.p_min, published.p_min)
                if (row.N, row.K) != (published.N, published.K):
                    self.assertTrue(any(n[:1] in "NK" and "printed as" in n for n in published.notes),
                                    (kind, row.Q))

    def test_first_rows(self):
        (row,) = table_rows(1, [35])
        self.assertEqual(compare_with_published(row, PUBLISHED_ROWS[ConstructionKind.ONE][0])["I_max"],
                         abs(0.028571 - 0.02857))

    def test_construction_two_uses_stated_value(self):
        (row,) = table_rows(2, [77])
        printed = PUBLISHED_ROWS[ConstructionKind.TWO][0].values["I_max"]
        self.assertGreater(abs(row.I_max - printed), 5e-5)
        self.assertLess(abs(row.variant_I_max - printed), 5e-6)


class TestOutput(unittest.TestCase):

    def test_csv(self):
        buffer = io.StringIO()
        write_csv(table_rows(1, [35]), buffer)
        lines = buffer.getvalue().splitlines()
        self.assertEqual(lines[0], ",".join(TABLE_COLUMNS))
        self.assertEqual(lines[1], "5,35,7350,1225,0.028571,0.026084,0.91293")

    def test_csv_keeps_trailing_zeros(self):
        buffer = io.StringIO()
        write_csv(table_rows(1, [2, 10961]), buffer)
        self.assertEqual(buffer.getvalue().splitlines()[1:], [
            "2,2,12,4,0.5,0.42640,0.85280",
            "97,10961,11774065058,120143521,0.000091233,0.000090766,0.99488",
        ])
        self.assertNotIn("e-", buffer.getvalue())

    def test_text_marks_variant(self):
        text = format_text(table_rows(2, [77]))
        self.assertIn("I_max*", text.splitlines()[0])
        self.assertIn("1/sqrt(Q(Q-1))", text)

    def test_text_uses_fixed_point(self):
        text = format_text(table_rows(1, [2]))
        self.assertIn("2 | 2 | 12 | 4 | 0.5 | 0.42640 | 0.85280 | analytic", text)


if __name__ == '__main__':
    unittest.main()
