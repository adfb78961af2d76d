import io
import json
import logging
import os
import tempfile
import unittest
from contextlib import redirect_stderr, redirect_stdout

from bentcodebook.cli import main


def run_cli(*argv):
    out, err = io.StringIO(), io.StringIO()
    with redirect_stdout(out), redirect_stderr(err):
        status = main(list(argv))
    return status, out.getvalue(), err.getvalue()


class CliTestCase(unittest.TestCase):

    @classmethod
    def setUpClass(cls):
        logging.disable(logging.CRITICAL)

    @classmethod
    def tearDownClass(cls):
        logging.disable(logging.NOTSET)


class TestTable(CliTestCase):

    def test_csv_rows(self):
        status, out, _ = run_cli("table", "--construction", "1", "--q", "35,221,493", "--output", "csv")
        self.assertEqual(status, 0)
        self.assertEqual(out.splitlines(), [
            "p_min,Q,N,K,I_max,I_W,ratio",
            "5,35,7350,1225,0.028571,0.026084,0.91293",
            "13,221,683774,48841,0.0045249,0.0043603,0.96362",
            "17,493,4374882,243049,0.0020284,0.0019712,0.97183",
        ])

    def test_json_rows(self):
        status, out, _ = run_cli("table", "--construction", "2", "--q", "77")
        payload = json.loads(out)
        self.assertEqual(status, 0)
        self.assertEqual(payload["construction"], 2)
        self.assertEqual(payload["rows"][0]["variant_ratio"], 0.93618)


class TestImax(CliTestCase):

    def test_smallest_codebook(self):
        status, out, _ = run_cli("imax", "--construction", "1", "--q", "2", "--pi", "identity", "--sigma", "identity")
        payload = json.loads(out)
        self.assertEqual(status, 0)
        self.assertEqual([r["method"] for r in payload["reports"]], ["brute_force", "symmetry_reduced"])
        for report in payload["reports"]:
            self.assertEqual(report["imax"], 0.5)
            self.assertEqual(report["imax_sq"], {"numerator": "1", "denominator": "4"})
            self.assertEqual(report["pair_count"], 66)

    def test_both_modes_and_erratum(self):
        status, out, _ = run_cli("imax", "--construction", "2", "--q", "5", "--ell", "3", "--mode", "both")
        payload = json.loads(out)
        self.assertEqual(status, 0)
        self.assertEqual(len(payload["reports"]), 4)
        self.assertTrue(all(r["imax_sq"]["denominator"] == "16" for r in payload["reports"]))
        self.assertEqual(len(payload["reports"][0]["notes"]), 1)

    def test_seeded_runs_are_identical(self):
        args = ("imax", "--q", "6", "--pi", "random", "--sigma", "random", "--seed", "7", "--output", "csv")
        first = run_cli(*args)
        second = run_cli(*args)
        self.assertEqual(first, second)
        self.assertEqual(first[0], 0)

    def test_invalid_q(self):
        status, out, err = run_cli("imax", "--construction", "1", "--q", "1")
        self.assertEqual(status, 2)
        self.assertEqual(out, "")
        error = json.loads(err)
        self.assertFalse(error["ok"])
        self.assertEqual(error["error_type"], "invalid_spec")
        status, _, _ = run_cli("imax", "--construction", "2", "--q", "2")
        self.assertEqual(status, 2)

    def test_unparseable_q(self):
        with self.assertRaises(SystemExit) as ctx:
            run_cli("imax", "--q", "six")
        self.assertEqual(ctx.exception.code, 2)


class TestWelch(CliTestCase):

    def test_explicit_sizes(self):
        status, out, _ = run_cli("welch", "--N", "5", "--K", "4")
        payload = json.loads(out)
        self.assertEqual(status, 0)
        self.assertEqual(payload["welch_sq"], {"numerator": "1", "denominator": "16"})
        self.assertEqual(payload["welch_bound"], 0.25)

    def test_rejects_square(self):
        status, _, err = run_cli("welch", "--N", "4", "--K", "4")
        self.assertEqual(status, 2)
        self.assertEqual(json.loads(err)["error_type"], "invalid_parameter")

    def test_construction_two_ratio(self):
        status, out, _ = run_cli("welch", "--construction", "2", "--q", "77")
        payload = json.loads(out)
        self.assertEqual(status, 0)
        self.assertEqual((payload["N"], payload["K"]), (47355, 5852))
        self.assertAlmostEqual(payload["variant_iw_over_imax"], 0.9361844, delta=5e-7)

    def test_csv_row_is_fixed_point(self):
        status, out, _ = run_cli("welch", "--construction", "1", "--q", "2", "--output", "csv")
        self.assertEqual(status, 0)
        self.assertEqual(out.splitlines(), ["p_min,Q,N,K,I_max,I_W,ratio", "2,2,12,4,0.5,0.42640,0.85280"])
        _, out, _ = run_cli("welch", "--N", "11774065058", "--K", "120143521", "--output", "csv")
        self.assertEqual(out.splitlines()[1], "11774065058,120143521,0.000090766")


class TestVerify(CliTestCase):

    def test_construction_two(self):
        status, out, _ = run_cli("verify", "--construction", "2", "--q", "6", "--ell", "2", "--mode", "both")
        payload = json.loads(out)
        self.assertEqual(status, 0)
        self.assertTrue(payload["ok"])
        self.assertIn("float_exact_agreement", [i["name"] for i in payload["invariants"]])

    def test_spec_file(self):
        with tempfile.TemporaryDirectory() as tmp:
            path = os.path.join(tmp, "codebook.json")
            with open(path, "w") as handle:
                json.dump({"construction": 2, "q": 5, "ell": 1, "pi": "random", "sigma": "affine:2,1",
                           "seed": 3}, handle)
            status, out, _ = run_cli("verify", "--spec", path, "--output", "csv")
        self.assertEqual(status, 0)
        self.assertEqual(out.splitlines()[0], "invariant,status,detail")

    def test_missing_spec_file(self):
        status, _, err = run_cli("verify", "--spec", "/nonexistent/codebook.json")
        self.assertEqual(status, 2)
        self.assertEqual(json.loads(err)["error_type"], "invalid_spec")


class TestGbfCheck(CliTestCase):

    def test_kumar_function(self):
        status, out, _ = run_cli("gbf-check", "--kumar", "--q", "6", "--omega", "random:3", "--theta", "random:4")
        payload = json.loads(out)
        self.assertEqual(status, 0)
        self.assertTrue(payload["is_bent"])
        self.assertEqual(payload["parseval_total"], 6 ** 4)

    def test_value_tables(self):
        _, out, _ = run_cli("gbf-check", "--q", "2", "--m", "2", "--function", "[0, 0, 0, 1]")
        self.assertTrue(json.loads(out)["is_bent"])
        status, out, _ = run_cli("gbf-check", "--q", "2", "--m", "2", "--function", "[0, 0, 0, 0]")
        payload = json.loads(out)
        self.assertEqual(status, 0)
        self.assertFalse(payload["is_bent"])
        self.assertEqual(len(payload["failing_points"]), 4)


class TestBuild(CliTestCase):

    def test_export(self):
        with tempfile.TemporaryDirectory() as tmp:
            target = os.path.join(tmp, "book.npz")
            status, out, _ = run_cli("build", "--construction", "2", "--q", "4", "--ell", "1", "--export", target)
            payload = json.loads(out)
            self.assertEqual(status, 0)
            self.assertTrue(os.path.isfile(target))
        self.assertEqual(payload["export"], target)
        self.assertEqual((payload["metadata"]["N"], payload["metadata"]["K"]), (44, 12))

    def test_report_file(self):
        with tempfile.TemporaryDirectory() as tmp:
            target = os.path.join(tmp, "report.txt")
            status, out, _ = run_cli("build", "--q", "3", "--output", "text", "--out", target)
            with open(target) as handle:
                text = handle.read()
        self.assertEqual(status, 0)
        self.assertEqual(out, "")
        self.assertIn("N: 36", text)


if __name__ == '__main__':
    unittest.main()
