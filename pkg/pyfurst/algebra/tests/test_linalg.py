import unittest
import numpy as np
from pyfurst import setting
from pyfurst.algebra.linalg import wedge_basis, minors, exterior_power, cartan_decompose, \
    CartanVector, ScaledMatrix
from pyfurst.algebra.grassmann import random_orthogonal
from pyfurst.errors import RankError, DecompositionError, InstabilityError


def random_sl(d, rng):
    a = rng.standard_normal((d, d))
    if np.linalg.det(a) < 0:
        a[0] = -a[0]
    return a / abs(np.linalg.det(a)) ** (1.0 / d)


class TestWedge(unittest.TestCase):
    def test_basis(self):
        assert wedge_basis(3, 2).tolist() == [[0, 1], [0, 2], [1, 2]]
        assert wedge_basis(4, 1).shape == (4, 1)
        with self.assertRaises(RankError):
            wedge_basis(3, 4)

    def test_minors_full(self):
        rng = np.random.default_rng(3)
        a = rng.standard_normal((4, 4))
        self.assertAlmostEqual(float(minors(a, 4)[0, 0]), float(np.linalg.det(a)), 10)

    def test_exterior_power_multiplicative(self):
        rng = np.random.default_rng(7)
        for d in [3, 4]:
            for i in range(1, d):
                a, b = rng.standard_normal((2, d, d))
                lhs = exterior_power(a @ b, i)
                rhs = exterior_power(a, i) @ exterior_power(b, i)
                assert np.allclose(lhs, rhs, atol=1E-10)

    def test_exterior_power_stack(self):
        rng = np.random.default_rng(8)
        a = rng.standard_normal((5, 3, 3))
        st = exterior_power(a, 2)
        assert st.shape == (5, 3, 3)
        assert np.allclose(st[2], exterior_power(a[2], 2))

    def test_exterior_power_diagonal(self):
        g = np.diag([2.0, 3.0, 1.0 / 6.0])
        assert np.allclose(np.diag(exterior_power(g, 2)), [6.0, 1.0 / 3.0, 0.5])
        with self.assertRaises(RankError):
            exterior_power(g, 3)
        with self.assertRaises(RankError):
            exterior_power(g, 0)


class TestCartan(unittest.TestCase):
    def test_reconstruct(self):
        rng = np.random.default_rng(11)
        for d in [2, 3, 4]:
            g = random_sl(d, rng)
            k1, a, k2 = cartan_decompose(g)
            assert np.allclose(k1 @ np.diag(np.exp(a.logs)) @ k2, g, atol=1E-10)
            self.assertAlmostEqual(np.linalg.det(k1), 1.0, 10)
            self.assertAlmostEqual(np.linalg.det(k2), 1.0, 10)
            assert np.all(np.diff(a.logs) <= 0)
            self.assertAlmostEqual(float(a.logs.sum()), 0.0, 9)

    def test_diagonal(self):
        e = np.e
        _, a, _ = cartan_decompose(np.diag([1 / e, e]))
        assert np.allclose(a.logs, [1.0, -1.0])
        assert np.allclose(a.reversed_negated().logs, [1.0, -1.0])

    def test_reversed_negated(self):
        c = CartanVector([2.0, 0.5, -2.5])
        assert np.allclose(c.reversed_negated().logs, [2.5, -0.5, -2.0])
        assert c.d == 3

    def test_inverse_reverses(self):
        rng = np.random.default_rng(12)
        for d in [2, 3, 4]:
            for _ in range(20):
                g = random_sl(d, rng)
                _, a, _ = cartan_decompose(g)
                _, b, _ = cartan_decompose(np.linalg.inv(g))
                assert np.allclose(b.logs, a.reversed_negated().logs, atol=1E-9)

    def test_orthogonal_invariance(self):
        rng = np.random.default_rng(13)
        for d in [2, 3, 4]:
            for _ in range(20):
                g = random_sl(d, rng)
                k1, k2 = random_orthogonal(d, rng), random_orthogonal(d, rng)
                _, a, _ = cartan_decompose(g)
                _, b, _ = cartan_decompose(k1 @ g @ k2)
                assert np.allclose(b.logs, a.logs, atol=1E-9)

    def test_errors(self):
        with self.assertRaises(DecompositionError):
            cartan_decompose(np.array([[1.0, 2.0], [2.0, 4.0]]))
        with self.assertRaises(DecompositionError):
            cartan_decompose(np.diag([-1.0, 1.0]))
        with self.assertRaises(DecompositionError):
            cartan_decompose(np.array([[np.inf, 0.0], [0.0, 1.0]]))


class TestScaledMatrix(unittest.TestCase):
    def test_identity(self):
        sm = ScaledMatrix.identity(3)
        assert np.allclose(sm.to_matrix(), np.identity(3))
        self.assertAlmostEqual(sm.log_norm(), 0.0, 12)

    def test_long_product(self):
        e = np.e
        g = np.diag([e, 1 / e])
        sm = ScaledMatrix.identity(2)
        for _ in range(200):
            sm = sm @ g
        self.assertAlmostEqual(sm.log_norm(), 200.0, 8)
        ls = sm.log_singular_values()
        self.assertAlmostEqual(ls[0], 200.0, 8)
        self.assertAlmostEqual(ls[1], -200.0, 6)
        self.assertAlmostEqual(np.linalg.norm(sm.unit), 1.0, 12)

    def test_scaled_product(self):
        rng = np.random.default_rng(5)
        a, b = random_sl(3, rng), random_sl(3, rng)
        p = ScaledMatrix.from_matrix(a) @ ScaledMatrix.from_matrix(b)
        assert np.allclose(p.to_matrix(), a @ b, atol=1E-10)

    def test_instability(self):
        with self.assertRaises(InstabilityError):
            ScaledMatrix.from_matrix(np.zeros((2, 2)))
        old = setting.MAX_LOG_SCALE
        try:
            setting.set_options(max_log_scale=10.0)
            with self.assertRaises(InstabilityError):
                ScaledMatrix(np.identity(2), 20.0).renormalize()
        finally:
            setting.set_options(max_log_scale=old)


if __name__ == "__main__":
    unittest.main()
