import os
import tempfile
import unittest
from fractions import Fraction

import numpy as np

from bentcodebook.construction import (
    ConstructionKind,
    PhaseWord,
    StandardBasisWord,
    build_codebook,
    build_construction_one,
    build_construction_two,
    codeword_entry,
    codeword_norm_sq,
    codeword_vector,
    construction_parameters,
    export_codebook,
    load_codebook_dump,
    phase_words_distinct,
)
from bentcodebook.errors import (
    CodebookError,
    ErrorType,
    GuardExceededError,
    ModulusMismatchError,
    ParameterError,
    PermutationError,
    SpecError,
)
from bentcodebook.gbf import PermutationZQ, affine_permutation, identity_permutation, random_permutation
from bentcodebook.ntheory import Modulus


class TestParameters(unittest.TestCase):

    def test_published_sizes(self):
        self.assertEqual(construction_parameters(1, 35), (5, 7350, 1225))
        self.assertEqual(construction_parameters(2, 77), (7, 47355, 5852))
        self.assertEqual(construction_parameters("two", 437), (19, 3818943, 190532))

    def test_prime_modulus(self):
        for q in (2, 3, 5, 7, 11, 13):
            self.assertEqual(construction_parameters(1, q), (q, (q + 1) * q * q, q * q))

    def test_rejects_small_q(self):
        with self.assertRaises(ParameterError):
            construction_parameters(1, 1)
        with self.assertRaises(ParameterError):
            construction_parameters(2, 2)

    def test_unknown_construction(self):
        with self.assertRaises(ParameterError):
            ConstructionKind.parse(3)


class TestConstructionOne(unittest.TestCase):

    def test_smallest_codebook(self):
        cb = build_construction_one(2)
        self.assertEqual((cb.N, cb.K, cb.p_min), (12, 4, 2))
        first = cb.codeword(0)
        self.assertEqual(first.label, (0, 0, 0))
        np.testing.assert_allclose(codeword_vector(first), 0.5 * np.ones(4))

    def test_unit_norm_q6(self):
        cb = build_construction_one(6)
        self.assertEqual((cb.N, cb.K), (108, 36))
        for word in cb.codewords:
            self.assertEqual(codeword_norm_sq(word), 1)

    def test_exponent_formula(self):
        q = 5
        pi, sigma = random_permutation(q, 1), random_permutation(q, 2)
        cb = build_construction_one(q, pi, sigma)
        for a, b, u in [(0, 1, 2), (4, 3, 0), (2, 2, 4)]:
            exps = cb.codeword(cb.phase_index(a, b, u)).exponents
            for i in range(q):
                for j in range(q):
                    self.assertEqual(exps[i * q + j], (j * (a * pi(i) + b) + u * sigma(i)) % q)

    def test_phase_words_distinct(self):
        for q in range(2, 13):
            self.assertTrue(phase_words_distinct(build_construction_one(q)), q)
            pi, sigma = random_permutation(q, q), random_permutation(q, 3 * q)
            self.assertTrue(phase_words_distinct(build_construction_one(q, pi, sigma)), q)

    def test_exponent_table_is_read_only(self):
        cb = build_construction_one(3)
        with self.assertRaises(ValueError):
            cb.phase_exponents[0, 0] = 1

    def test_bad_maps(self):
        with self.assertRaises(PermutationError):
            build_construction_one(4, PermutationZQ(Modulus(4), (0, 0, 1, 2)))
        with self.assertRaises(ModulusMismatchError):
            build_construction_one(4, identity_permutation(5))

    def test_build_guard(self):
        with self.assertRaises(GuardExceededError) as ctx:
            build_construction_one(12, build_guard=1000)
        self.assertEqual(ctx.exception.exit_code, 2)


class TestConstructionTwo(unittest.TestCase):

    def test_smallest_codebook(self):
        cb = build_construction_two(3, ell=0)
        self.assertEqual((cb.N, cb.K, cb.p_min), (33, 6, 3))
        self.assertEqual(cb.rows, [1, 2])

    def test_unit_norm_q6(self):
        cb = build_construction_two(6, ell=2)
        self.assertEqual((cb.N, cb.K), (102, 30))
        self.assertEqual(cb.N, cb.p_min * 36 + 36 - 6)
        self.assertTrue(all(codeword_norm_sq(w) == 1 for w in cb.codewords))

    def test_deleted_row(self):
        q, ell = 5, 3
        full = build_construction_one(q)
        cut = build_construction_two(q, ell=ell)
        keep = [i * q + j for i in range(q) for j in range(q) if i != ell]
        np.testing.assert_array_equal(full.phase_exponents[:, keep], cut.phase_exponents)

    def test_rejects_q2_and_bad_ell(self):
        with self.assertRaises(ParameterError):
            build_construction_two(2)
        with self.assertRaises(CodebookError) as ctx:
            build_construction_two(5, ell=5)
        self.assertEqual(ctx.exception.error_type, ErrorType.INDEX_OUT_OF_RANGE)


class TestCodewordEntry(unittest.TestCase):

    def test_standard_basis(self):
        word = StandardBasisWord(3, 9)
        self.assertEqual(codeword_entry(word, 3).exact.rational_value(), 1)
        self.assertEqual(codeword_entry(word, 5).exact.rational_value(), 0)

    def test_phase_entry(self):
        cb = build_construction_one(4)
        word = cb.codeword(cb.phase_index(1, 0, 0))
        entry = codeword_entry(word, 3 * 4 + 2)
        self.assertEqual(int(word.exponents[14]), 2)
        self.assertEqual(entry.scale_sq, Fraction(1, 16))
        self.assertEqual(entry.exact.rational_value(), -1)
        self.assertAlmostEqual(abs(entry.value - (-0.25)), 0.0, delta=1e-12)

    def test_out_of_range(self):
        with self.assertRaises(CodebookError) as ctx:
            codeword_entry(StandardBasisWord(0, 4), 4)
        self.assertEqual(ctx.exception.error_type, ErrorType.INDEX_OUT_OF_RANGE)

    def test_phase_scale(self):
        with self.assertRaises(CodebookError):
            PhaseWord(Modulus(3), np.zeros(4, dtype=np.int64), Fraction(1, 3))


class TestDumps(unittest.TestCase):

    def test_csv_and_npz(self):
        q = 5
        cb = build_codebook(2, q, affine_permutation(q, 2, 1), random_permutation(q, 9), ell=4)
        with tempfile.TemporaryDirectory() as tmp:
            for name in ("book.csv", "book.npz"):
                path = export_codebook(cb, os.path.join(tmp, name))
                loaded = load_codebook_dump(path)
                self.assertEqual(loaded.metadata(), cb.metadata())
                np.testing.assert_array_equal(loaded.phase_exponents, cb.phase_exponents)

    def test_tampered_dump(self):
        cb = build_construction_one(3)
        with tempfile.TemporaryDirectory() as tmp:
            path = export_codebook(cb, os.path.join(tmp, "book.csv"))
            lines = path.read_text().splitlines()
            lines[1] = ",".join("1" for _ in lines[1].split(","))
            path.write_text("\n".join(lines) + "\n")
            with self.assertRaises(SpecError):
                load_codebook_dump(path)


if __name__ == '__main__':
    unittest.main()
