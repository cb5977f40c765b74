import unittest
import math
import numpy as np
from fractions import Fraction
from pyfurst.algebra.group import GroupElement, FiniteMeasure, free_group_entropy, shannon_entropy
from pyfurst.algebra.grassmann import GrassmannPoint
from pyfurst.algorithms.core import EntropyMethods, RatioMethods
from pyfurst.algorithms.entropy import asymptotic_entropy, differential_entropy, translated_mass_decay, \
    entropy_chain_check, AsymptoticEntropyEstimate, DifferentialEntropyEstimate
from pyfurst.algorithms.harmonic import circle_measure, atom_measure, sample_harmonic_measure
from pyfurst.errors import SupportCapError, PreconditionError, EmptyMeasureError


def sanov():
    a = GroupElement([[1, 2], [0, 1]])
    b = GroupElement([[1, 0], [2, 1]])
    return FiniteMeasure.uniform([a, a.inverse(), b, b.inverse()])


class TestAsymptoticEntropy(unittest.TestCase):
    def test_free_group_oracle(self):
        h = asymptotic_entropy(sanov(), 7)
        oracle = [free_group_entropy(2, n) for n in range(1, 8)]
        assert np.max(np.abs(np.array(h.entropies) - oracle)) <= 1E-10
        assert h.supports[:2] == [4, 13]
        mono = h.check_monotonicity()
        assert mono["passed"]
        assert h.h_estimate <= h.h_diffs[-1]
        assert h.h_estimate >= 0
        assert h.h_estimate <= shannon_entropy(sanov())

    def test_methods(self):
        hd = asymptotic_entropy(sanov(), 5, method=EntropyMethods.Difference)
        assert hd.h_estimate == hd.h_diffs[-1]
        assert hd.to_dict()["method"] == "Difference"
        hl = asymptotic_entropy(sanov(), 5)
        assert hl.method == EntropyMethods.LogCorrected
        assert hl.h_log_corrected is not None
        # fewer than three points: the difference is used
        h2 = asymptotic_entropy(sanov(), 2)
        assert h2.h_estimate == h2.h_diffs[-1]

    def test_finite_group(self):
        # the order-4 rotation generates a finite group: H(mu^n) stays bounded
        r = GroupElement([[0, -1], [1, 0]])
        mu = FiniteMeasure.uniform([r, r.inverse()])
        h = asymptotic_entropy(mu, 8)
        assert max(h.supports) <= 4
        assert h.h_values[-1] <= math.log(4) / 8 + 1E-12

    def test_cap(self):
        with self.assertRaises(SupportCapError) as ctx:
            asymptotic_entropy(sanov(), 4, cap=20)
        assert ctx.exception.achieved == 2

    def test_float_refused(self):
        e = math.e
        mu = FiniteMeasure.delta(GroupElement([[e, 0.0], [0.0, 1 / e]], exact=False))
        with self.assertRaises(PreconditionError):
            asymptotic_entropy(mu, 3)

    def test_monotonicity_violation(self):
        h = AsymptoticEntropyEstimate([1.0, 3.0, 4.0], [1, 2, 3], method=EntropyMethods.Difference)
        assert not h.check_monotonicity()["passed"]


class TestDifferentialEntropy(unittest.TestCase):
    def test_fixed_cloud(self):
        mu = FiniteMeasure.delta(GroupElement.identity(2))
        e = differential_entropy(mu, 1, circle_measure(300, d=2))
        assert e.value == 0.0 and e.stderr == 0.0
        assert e.per_atom == [0.0]

    def test_sanov(self):
        mu = sanov()
        nu = sample_harmonic_measure(mu, 1, 60, 1000, 2)
        for method in [RatioMethods.Count, RatioMethods.Distance]:
            e = differential_entropy(mu, 1, nu, method=method, bootstrap=50, seed=2)
            assert np.isfinite(e.value) and e.stderr >= 0
            assert e.k_neighbors == 10
            assert len(e.per_atom) == 4
            assert e.to_dict()["method"] == method.name

    def test_default_method(self):
        mu = FiniteMeasure.delta(GroupElement.identity(2))
        e = differential_entropy(mu, 1, circle_measure(100, d=2))
        assert e.method == RatioMethods.Distance

    def test_errors(self):
        mu = sanov()
        nu = circle_measure(50, d=2)
        with self.assertRaises(ValueError):
            differential_entropy(mu, 2, nu)
        with self.assertRaises(ValueError):
            differential_entropy(mu, 1, nu, k_neighbors=50)
        with self.assertRaises(EmptyMeasureError):
            differential_entropy(mu, 1, nu.subset([0]))


class TestChainAndDecay(unittest.TestCase):
    def test_chain(self):
        h = AsymptoticEntropyEstimate([1.0, 1.9, 2.7], [1, 1, 1], method=EntropyMethods.Difference)
        good = DifferentialEntropyEstimate(1, 0.5, 0.01, 5, 100, RatioMethods.Count, [0.5])
        bad = DifferentialEntropyEstimate(1, 1.5, 0.01, 5, 100, RatioMethods.Count, [1.5])
        assert entropy_chain_check(h, good, 1.5)["passed"]
        assert not entropy_chain_check(h, bad, 1.5)["passed"]
        neg = DifferentialEntropyEstimate(1, -0.5, 0.01, 5, 100, RatioMethods.Count, [-0.5])
        assert not entropy_chain_check(h, neg, 1.5)["passed"]

    def test_decay_identity(self):
        mu = FiniteMeasure.uniform([GroupElement.identity(2)])
        nu = circle_measure(400, d=2)
        center = GrassmannPoint.coordinate(2, [0])
        rep = translated_mass_decay(mu, 1, nu, center, 0.3, 10, 3, 0)
        mass0 = rep["ball_mass"]
        assert np.allclose(rep["rates"], -math.log(mass0) / 10)
        assert np.allclose(rep["relative_rates"], 0.0)
        assert rep["censored_fraction"] == 0.0
        assert "passed" not in rep

    def test_decay_fixed_point(self):
        e = math.e
        mu = FiniteMeasure.delta(GroupElement([[e, 0], [0, 1 / e]], exact=False))
        center = GrassmannPoint.coordinate(2, [0])
        rep = translated_mass_decay(mu, 1, atom_measure(30, center), center, 0.2, 8, 2, 0)
        assert rep["ball_mass"] == 1.0
        assert np.allclose(rep["median_by_n"], 0.0)

    def test_decay_absolute_rate(self):
        e = math.e
        mu = FiniteMeasure.delta(GroupElement([[e, 0], [0, 1 / e]], exact=False))
        nu = circle_measure(2000, d=2)
        center = GrassmannPoint.coordinate(2, [0])
        rep = translated_mass_decay(mu, 1, nu, center, 0.3, 5, 1, 0)
        mass0 = rep["ball_mass"]
        expected = nu.act(np.diag([e ** -5, e ** 5])).ball_mass(center, 0.3)
        assert 0 < expected < mass0 < 1
        assert abs(math.exp(-5 * rep["rates"][0]) - expected) <= 1.0 / 2000 + 1E-12
        assert abs(rep["rates"][0] - rep["relative_rates"][0] + math.log(mass0) / 5) <= 1E-12

    def test_decay_grid(self):
        mu = sanov()
        nu = sample_harmonic_measure(mu, 1, 40, 300, 4)
        one = translated_mass_decay(mu, 1, nu, nu.point(0), 0.3, 12, 6, 4, n_grid=[5])
        two = translated_mass_decay(mu, 1, nu, nu.point(0), 0.3, 12, 6, 4, n_grid=[12, 5, 5])
        assert one["n_grid"] == two["n_grid"] == [5, 12]
        assert one["median_by_n"] == two["median_by_n"]
        for grid in [[0, 5], [5, 13], [-1]]:
            with self.assertRaises(PreconditionError):
                translated_mass_decay(mu, 1, nu, nu.point(0), 0.3, 12, 6, 4, n_grid=grid)

    def test_decay_sanov(self):
        mu = sanov()
        nu = sample_harmonic_measure(mu, 1, 60, 1000, 4)
        e = DifferentialEntropyEstimate(1, 10.0, 0.0, 10, 1000, RatioMethods.Count, [])
        rep = translated_mass_decay(mu, 1, nu, nu.point(0), 0.3, 20, 20, 4, n_grid=[5, 10], entropy=e)
        assert rep["n_grid"] == [5, 10, 20]
        assert len(rep["median_by_n"]) == 3
        assert rep["passed"]

    def test_decay_empty_ball(self):
        nu = atom_measure(20, GrassmannPoint.coordinate(2, [0]))
        with self.assertRaises(PreconditionError):
            translated_mass_decay(sanov(), 1, nu, GrassmannPoint.coordinate(2, [1]), 0.1, 5, 2, 0)


if __name__ == "__main__":
    unittest.main()
