import unittest
import math
import numpy as np
from fractions import Fraction
from pyfurst.algebra.group import GroupElement, FiniteMeasure, bareiss_det, convolve, reflect, \
    shannon_entropy, first_moment, is_r_regular, build_mu_k, free_group_entropy, free_group_drift_entropy
from pyfurst.errors import PreconditionError, SupportCapError, EmptyMeasureError


def sanov():
    a = GroupElement.generator([[1, 2], [0, 1]], 0)
    b = GroupElement.generator([[1, 0], [2, 1]], 1)
    return a, b, FiniteMeasure.uniform([a, a.inverse(), b, b.inverse()])


class TestGroupElement(unittest.TestCase):
    def test_determinant(self):
        assert bareiss_det([[2, 1], [1, 1]]) == 1
        assert bareiss_det([[0, 1, 0], [0, 0, 1], [1, 0, 0]]) == 1
        assert bareiss_det([[1, 2], [2, 4]]) == 0
        with self.assertRaises(PreconditionError):
            GroupElement([[2, 0], [0, 1]])
        with self.assertRaises(PreconditionError):
            GroupElement([[1]])
        with self.assertRaises(PreconditionError):
            GroupElement([[2.0, 0.0], [0.0, 1.0]], exact=False)

    def test_rational_inverse(self):
        g = GroupElement([["1/2", 0], [0, 2]])
        assert g.inverse() == GroupElement([[2, 0], [0, Fraction(1, 2)]])
        assert (g @ g.inverse()).is_identity()
        h = GroupElement([[2, 1, 0], [1, 1, 0], [0, 0, 1]])
        assert (h.inverse() @ h).is_identity()
        assert h.inverse().entries == [[1, -1, 0], [-1, 2, 0], [0, 0, 1]]

    def test_power(self):
        a, b, _ = sanov()
        assert a.power(3) == GroupElement([[1, 6], [0, 1]])
        assert a.power(-2) == GroupElement([[1, -4], [0, 1]])
        assert a.power(0).is_identity()
        assert (a @ b).power(2) == (a @ b) @ (a @ b)

    def test_words(self):
        a, b, _ = sanov()
        assert (a @ a.inverse()).word == ()
        assert (a @ b @ b).word == ((0, 1), (1, 2))
        assert (a @ b).inverse().word == ((1, -1), (0, -1))
        assert a.power(3).word == ((0, 3), )

    def test_float_element(self):
        e = math.e
        g = GroupElement([[e, 0.0], [0.0, 1 / e]], exact=False)
        assert not g.exact
        assert np.allclose((g @ g.inverse()).to_array(), np.identity(2))
        self.assertAlmostEqual(g.operator_norm(), e, 12)
        assert np.allclose(g.power(3).to_array(), np.diag([e ** 3, e ** -3]))

    def test_hash_eq(self):
        a, _, _ = sanov()
        c = GroupElement([[1, 2], [0, 1]])
        assert a == c and hash(a) == hash(c)
        assert a != a.inverse()


class TestFiniteMeasure(unittest.TestCase):
    def test_validation(self):
        a, b, _ = sanov()
        with self.assertRaises(PreconditionError):
            FiniteMeasure([a, b], [Fraction(1, 2), Fraction(1, 3)])
        with self.assertRaises(PreconditionError):
            FiniteMeasure([a, b], [Fraction(1), Fraction(0)])
        with self.assertRaises(PreconditionError):
            FiniteMeasure([a], [Fraction(1, 2), Fraction(1, 2)])
        with self.assertRaises(EmptyMeasureError):
            FiniteMeasure([], [])
        with self.assertRaises(PreconditionError):
            FiniteMeasure([a, GroupElement.identity(3)], [Fraction(1, 2), Fraction(1, 2)])

    def test_merge(self):
        a, _, _ = sanov()
        mu = FiniteMeasure([a, GroupElement([[1, 2], [0, 1]])], [Fraction(1, 2), Fraction(1, 2)])
        assert mu.size == 1
        assert mu.weight_of(a) == 1
        self.assertAlmostEqual(shannon_entropy(mu), 0.0, 14)

    def test_float_weights(self):
        a, b, _ = sanov()
        mu = FiniteMeasure([a, b], [0.3, 0.7])
        assert not mu.rational
        assert mu.cdf()[-1] == 1.0
        self.assertAlmostEqual(float(mu.cdf()[0]), 0.3, 14)

    def test_symmetry(self):
        a, b, mu = sanov()
        assert mu.is_symmetric()
        assert reflect(mu) == mu
        asym = FiniteMeasure([a, a.inverse(), b, b.inverse()],
                             [Fraction(2, 5), Fraction(1, 10), Fraction(2, 5), Fraction(1, 10)])
        assert not asym.is_symmetric()
        assert reflect(asym).weight_of(a.inverse()) == Fraction(2, 5)

    def test_support_hash(self):
        a, b, mu = sanov()
        nu = FiniteMeasure.uniform([b.inverse(), b, a.inverse(), a])
        assert mu.support_hash() == nu.support_hash()
        assert mu == nu
        assert mu.support_hash() != FiniteMeasure.uniform([a, a.inverse()]).support_hash()

    def test_entropy_and_moment(self):
        _, _, mu = sanov()
        self.assertAlmostEqual(shannon_entropy(mu), math.log(4), 14)
        e = math.e
        diag = FiniteMeasure.delta(GroupElement([[e, 0.0], [0.0, 1 / e]], exact=False))
        self.assertAlmostEqual(first_moment(diag), 1.0, 12)


class TestConvolution(unittest.TestCase):
    def test_sanov_square(self):
        _, _, mu = sanov()
        mu2 = convolve(mu, mu)
        assert mu2.size == 13
        assert mu2.weight_of(GroupElement.identity(2)) == Fraction(1, 4)
        assert sum(mu2.weights) == 1
        self.assertAlmostEqual(shannon_entropy(mu2), free_group_entropy(2, 2), 12)

    def test_free_group_oracle(self):
        _, _, mu = sanov()
        cur = mu
        for n in range(2, 6):
            cur = convolve(cur, mu)
            self.assertAlmostEqual(shannon_entropy(cur), free_group_entropy(2, n), 10)
        self.assertAlmostEqual(free_group_entropy(2, 1), math.log(4), 14)
        self.assertAlmostEqual(free_group_drift_entropy(2), 0.5 * math.log(3), 14)

    def test_words_kept(self):
        a, _, mu = sanov()
        mu2 = convolve(mu, mu)
        g = a.power(2)
        idx = [j for j, x in enumerate(mu2.atoms) if x == g]
        assert len(idx) == 1
        assert mu2.atoms[idx[0]].word == ((0, 2), )

    def test_associative(self):
        a, b, mu = sanov()
        nu = FiniteMeasure([a, b.inverse(), a @ b], [Fraction(1, 2), Fraction(1, 3), Fraction(1, 6)])
        rho = FiniteMeasure([b, a.inverse()], [Fraction(3, 4), Fraction(1, 4)])
        assert convolve(convolve(mu, nu), rho) == convolve(mu, convolve(nu, rho))
        assert convolve(convolve(nu, rho), nu) == convolve(nu, convolve(rho, nu))

    def test_reflect_reverses(self):
        a, b, mu = sanov()
        nu = FiniteMeasure([a, b.inverse(), a @ b], [Fraction(1, 2), Fraction(1, 3), Fraction(1, 6)])
        rho = FiniteMeasure([b, a.inverse()], [Fraction(3, 4), Fraction(1, 4)])
        assert reflect(convolve(nu, rho)) == convolve(reflect(rho), reflect(nu))
        assert reflect(convolve(nu, rho)) != convolve(reflect(nu), reflect(rho))
        assert reflect(reflect(nu)) == nu
        assert convolve(mu, mu).is_symmetric()

    def test_cap(self):
        _, _, mu = sanov()
        with self.assertRaises(SupportCapError) as ctx:
            convolve(mu, mu, cap=5)
        assert ctx.exception.cap == 5
        assert ctx.exception.achieved == 1
        assert ctx.exception.size == 13
        assert convolve(mu, mu, cap=13).size == 13

    def test_float_refused(self):
        e = math.e
        fm = FiniteMeasure.delta(GroupElement([[e, 0.0], [0.0, 1 / e]], exact=False))
        with self.assertRaises(PreconditionError):
            convolve(fm, fm)


class TestRegularity(unittest.TestCase):
    def test_regular(self):
        a, b, _ = sanov()
        regular, eigs, diag = is_r_regular(a @ b)
        assert regular
        assert abs(eigs[0]) > abs(eigs[1])
        self.assertAlmostEqual(abs(eigs[0]), 3 + 2 * math.sqrt(2), 10)
        g = (a @ b).to_array()
        assert np.allclose(diag.h_inv @ np.diag(diag.deltas) @ diag.h, g)

    def test_not_regular(self):
        a, _, _ = sanov()
        assert not is_r_regular(a)[0]
        assert not is_r_regular(GroupElement([[0, -1], [1, 0]]))[0]
        g = GroupElement([[2, 0, 0], [0, 2, 0], [0, 0, "1/4"]])
        assert not is_r_regular(g)[0]
        assert is_r_regular(g, weak=True)[0]

    def test_build_mu_k(self):
        a, b, mu = sanov()
        gamma = a @ b
        for k in [1, 2, 4]:
            mk = build_mu_k(mu, gamma, k)
            assert mk.size == 6
            assert mk.weight_of(gamma.power(k)) == Fraction(1, 4)
            assert mk.weight_of(gamma.power(-k)) == Fraction(1, 4)
            assert mk.weight_of(a) == Fraction(1, 8)
            self.assertAlmostEqual(shannon_entropy(mk), 2.5 * math.log(2), 12)
            assert shannon_entropy(mk) <= 0.5 * shannon_entropy(mu) + 1.5 * math.log(2) + 1E-9
        with self.assertRaises(PreconditionError):
            build_mu_k(mu, gamma, 0)
        with self.assertRaises(PreconditionError):
            build_mu_k(mu, a, 1)

    def test_build_mu_k_merge(self):
        a, b, _ = sanov()
        gamma = a @ b
        mu = FiniteMeasure.uniform([gamma, gamma.inverse(), a, a.inverse()])
        mk = build_mu_k(mu, gamma, 1)
        assert mk.size == 4
        assert mk.weight_of(gamma) == Fraction(3, 8)
        assert mk.weight_of(gamma.inverse()) == Fraction(3, 8)
        assert mk.weight_of(a) == Fraction(1, 8)
        assert sum(mk.weights) == 1
        assert build_mu_k(mu, gamma, 2).size == 6

    def test_build_mu_k_symmetric(self):
        a, b, mu = sanov()
        gamma = a @ b
        for k in [1, 3]:
            assert build_mu_k(mu, gamma, k).is_symmetric()
        asym = FiniteMeasure([a, a.inverse(), b, b.inverse()],
                             [Fraction(2, 5), Fraction(1, 10), Fraction(2, 5), Fraction(1, 10)])
        assert not asym.is_symmetric()
        assert not build_mu_k(asym, gamma, 1).is_symmetric()


if __name__ == "__main__":
    unittest.main()
