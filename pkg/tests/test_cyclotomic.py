import cmath
import unittest

import numpy as np

from bentcodebook.cyclotomic import (
    CyclotomicInt,
    add,
    conj,
    from_exponents,
    from_integer,
    is_zero,
    mul,
    one,
    phi_cache,
    rational_norm_sq,
    rational_value,
    root_power,
    sub,
    zero,
)
from bentcodebook.errors import ConsistencyError, ErrorType, ModulusMismatchError
from bentcodebook.ntheory import Modulus


def random_element(rng, q):
    return CyclotomicInt(Modulus(q), tuple(int(c) for c in rng.integers(-5, 6, q)))


class TestRootPower(unittest.TestCase):

    def test_reduction(self):
        x = root_power(4, 6)
        self.assertEqual(x.coeffs, (0, 0, 1, 0))

    def test_zero_exponent_is_one(self):
        self.assertTrue(root_power(3, 0) == one(3))

    def test_exponents_add(self):
        self.assertTrue(mul(root_power(5, 2), root_power(5, 4)) == root_power(5, 1))


class TestRing(unittest.TestCase):

    def test_additive_identity(self):
        x = CyclotomicInt(Modulus(5), (1, -2, 0, 3, 4))
        self.assertTrue(add(x, zero(5)) == x)

    def test_full_geometric_sum(self):
        self.assertTrue(is_zero(from_exponents(6, range(6))))

    def test_difference_of_squares(self):
        xi = root_power(4, 1)
        product = (one(4) + xi) * (one(4) - xi)
        self.assertEqual(rational_value(product), 2)

    def test_scalar_coercion(self):
        xi = root_power(6, 1)
        self.assertTrue(xi * 3 - 2 * xi == xi)
        self.assertTrue(xi + 0 == xi)

    def test_axioms(self):
        rng = np.random.default_rng(7)
        for q in range(2, 31):
            x, y, z = (random_element(rng, q) for _ in range(3))
            self.assertTrue((x * y) * z == x * (y * z))
            self.assertTrue(x * (y + z) == x * y + x * z)
            self.assertTrue(x * y == y * x)
            self.assertTrue(is_zero(sub(add(x, y), add(y, x))))

    def test_modulus_mismatch(self):
        with self.assertRaises(ModulusMismatchError) as ctx:
            add(one(4), one(6))
        self.assertEqual(ctx.exception.error_type, ErrorType.MODULUS_MISMATCH)


class TestConjugation(unittest.TestCase):

    def test_root_inverse(self):
        for k in range(7):
            self.assertTrue(conj(root_power(7, k)) == root_power(7, 7 - k))

    def test_rationals_fixed(self):
        self.assertTrue(conj(from_integer(5, -3)) == from_integer(5, -3))

    def test_involution(self):
        rng = np.random.default_rng(11)
        for q in (3, 8, 12):
            x = random_element(rng, q)
            self.assertTrue(conj(conj(x)) == x)


class TestDecisions(unittest.TestCase):

    def test_zero(self):
        self.assertTrue(is_zero(zero(9)))

    def test_prime_minimal_relation(self):
        self.assertTrue(is_zero(from_exponents(7, range(7))))
        self.assertFalse(is_zero(from_exponents(7, range(6))))

    def test_alternating_sum_matches_float(self):
        x = CyclotomicInt(Modulus(6), (1, -1, 1, -1, 1, -1))
        self.assertEqual(is_zero(x), abs(x.embed()) < 1e-9)
        self.assertTrue(is_zero(x))

    def test_rational_value(self):
        self.assertEqual(rational_value(from_integer(4, 5)), 5)
        self.assertIsNone(rational_value(root_power(4, 1)))

    def test_norm_of_geometric_sum(self):
        for ell in range(1, 6):
            s = from_exponents(6, [(j * ell) % 6 for j in range(6)])
            if ell % 6:
                self.assertEqual(rational_value(s * conj(s)), 0)

    def test_float_consistency(self):
        rng = np.random.default_rng(3)
        for q in (5, 12, 30, 77, 100):
            coeffs = tuple(int(c) for c in rng.integers(-1000, 1001, q))
            x = CyclotomicInt(Modulus(q), coeffs)
            direct = sum(c * cmath.exp(2j * cmath.pi * k / q) for k, c in enumerate(coeffs))
            self.assertAlmostEqual(abs(x.embed() - direct), 0.0, delta=1e-9)
            y = random_element(rng, q)
            self.assertAlmostEqual(abs((x * y).embed() - x.embed() * y.embed()), 0.0, delta=1e-6)

    def test_hash_respects_equality(self):
        a = from_exponents(3, [0, 1])
        b = from_integer(3, -1) * root_power(3, 2)
        self.assertTrue(a == b)
        self.assertEqual(hash(a), hash(b))


class TestRationalNormSq(unittest.TestCase):

    def test_rational_sums(self):
        self.assertEqual(rational_norm_sq(4, [1, 1, 0, 0]), 2)
        self.assertEqual(rational_norm_sq(6, [6, 0, 0, 0, 0, 0]), 36)

    def test_irrational_sum_raises(self):
        with self.assertRaises(ConsistencyError):
            rational_norm_sq(5, [1, 1, 0, 0, 0])

    def test_polynomial_cache(self):
        self.assertEqual(phi_cache.degree(12), 4)
        self.assertEqual(phi_cache.get(6), (1, -1, 1))

    def test_canonical_remainders(self):
        self.assertEqual(root_power(4, 3).canonical(), (0, -1))
        self.assertEqual(root_power(6, 3).canonical(), (-1, 0))
        self.assertEqual(CyclotomicInt(Modulus(5), (1, 1, 1, 1, 1)).canonical(), (0, 0, 0, 0))
        self.assertEqual(CyclotomicInt(Modulus(12), (0,) * 12).canonical(), (0, 0, 0, 0))
        self.assertEqual(CyclotomicInt(Modulus(12), (3,) + (0,) * 11).canonical(), (3, 0, 0, 0))


if __name__ == '__main__':
    unittest.main()
