import unittest
import math
import numpy as np
from pyfurst.algebra.grassmann import GrassmannPoint
from pyfurst.algorithms.core import RatioMethods
from pyfurst.algorithms.entropy import DifferentialEntropyEstimate
from pyfurst.algorithms.harmonic import circle_measure, cantor_measure, atom_measure
from pyfurst.algorithms.dimension import resolution_floor, reliable_radii, pointwise_dims, \
    mean_dimension_interval, covering_number, core_set, ledrappier_box_summary, dimension_bound, hausdorff_proxy, \
    DimensionReport, PointwiseCurves
from pyfurst.errors import BoundUndefinedError


class TestPointwise(unittest.TestCase):
    def test_window(self):
        nu = circle_measure(400)
        self.assertAlmostEqual(resolution_floor(nu), 2.0 / 20.0, 12)
        r = reliable_radii(nu, [0.05, 0.5, 0.2, 1.2, 0.1])
        assert r.tolist() == [0.5, 0.2]

    def test_circle(self):
        nu = circle_measure(2000)
        curves = pointwise_dims(nu, np.geomspace(0.3, 0.05, 8))
        assert abs(curves.median() - 1.0) <= 0.1
        assert curves.truncated == 0
        lo, hi = mean_dimension_interval(nu, np.geomspace(0.3, 0.05, 8), curves=curves)
        assert lo <= 1.0 + 0.1 and hi >= 1.0 - 0.1
        rows = list(curves.csv_rows())
        assert len(rows) == 2000 * len(curves.radii)

    def test_cantor(self):
        nu = cantor_measure(12)
        curves = pointwise_dims(nu, np.geomspace(0.0556, 6.9E-4, 10))
        assert abs(curves.median() - math.log(2) / math.log(3)) <= 0.08

    def test_atom(self):
        nu = atom_measure(300, GrassmannPoint.coordinate(3, [0]))
        curves = pointwise_dims(nu, np.geomspace(0.3, 0.05, 6))
        assert np.allclose(curves.finite_slopes, 0.0)
        assert mean_dimension_interval(nu, np.geomspace(0.3, 0.05, 6)) == (0.0, 0.0)
        with self.assertRaises(ValueError):
            mean_dimension_interval(nu, [0.3], q=0.7)


class TestHausdorffProxy(unittest.TestCase):
    def test_kinked_curve(self):
        radii = np.geomspace(0.4, 0.01, 7)
        knee = radii[3]
        curve = np.where(radii >= knee, radii ** 2, knee ** 2 * (radii / knee) ** 0.5)
        curves = PointwiseCurves(radii, np.tile(curve, (5, 1)))
        assert np.allclose(curves.lower_slopes, 0.5)
        assert np.all(curves.slopes > 0.6)
        self.assertAlmostEqual(hausdorff_proxy(curves), 0.5, 9)
        lo, hi = mean_dimension_interval(None, radii, curves=curves)
        assert hi > hausdorff_proxy(curves) + 0.1

    def test_circle(self):
        nu = circle_measure(2000)
        rep = DimensionReport(nu, np.geomspace(0.3, 0.05, 8))
        assert 0.8 <= rep.hausdorff <= 1.15
        assert rep.chain_ok(0.1)
        assert rep.to_dict()["hausdorff_proxy"] == rep.hausdorff

    def test_short_window(self):
        nu = circle_measure(500)
        curves = pointwise_dims(nu, [0.3, 0.2])
        assert np.array_equal(curves.lower_slopes, curves.slopes, equal_nan=True)


class TestCovering(unittest.TestCase):
    def test_atom_cover(self):
        nu = atom_measure(100, GrassmannPoint.coordinate(2, [0]))
        assert covering_number(nu, 0.01, 0.05) == 1

    def test_circle_cover(self):
        nu = circle_measure(1000, d=2)
        n = covering_number(nu, 0.1, 0.05)
        # one ball covers an arc of length 2 asin(0.1) of the pi-periodic circle
        assert 0.95 * math.pi / (2 * math.asin(0.1)) - 1 <= n <= math.pi / (2 * math.asin(0.1)) + 2
        with self.assertRaises(ValueError):
            covering_number(nu, 0.1, 1.5)

    def test_core_set(self):
        nu = circle_measure(200, d=2)
        keep = core_set(nu, 0.1, 0.2)
        assert keep.sum() == 180

    def test_summary_chain(self):
        nu = circle_measure(2000)
        radii = np.geomspace(0.3, 0.05, 6)
        summ = ledrappier_box_summary(nu, radii, [0.05, 0.1])
        assert summ.ledrappier_counts.shape == (2, 6)
        assert np.all(summ.box_counts >= 1)
        assert np.all(np.diff(summ.ledrappier_counts, axis=1) >= 0)
        d = DimensionReport(nu, radii, [0.05, 0.1]).to_dict()
        assert len(d["ledrappier"]) == 2 and "bound" not in d
        assert np.array(d["box_estimates"]).shape == (2, 6)
        atom = DimensionReport(atom_measure(200, GrassmannPoint.coordinate(3, [2])), radii, [0.05, 0.1])
        assert atom.chain_ok(0.1)
        assert atom.covering.ledrappier_upper == 0.0
        with self.assertRaises(ValueError):
            ledrappier_box_summary(nu, [0.001], [0.1])


class TestBound(unittest.TestCase):
    def test_bound(self):
        e = DifferentialEntropyEstimate(1, 0.4, 0.02, 10, 1000, RatioMethods.Count, [])
        value, err = dimension_bound(e, (2.0, 0.1))
        self.assertAlmostEqual(value, 0.2, 12)
        self.assertAlmostEqual(err, math.sqrt(0.01 ** 2 + (0.4 * 0.1 / 4.0) ** 2), 12)
        with self.assertRaises(BoundUndefinedError):
            dimension_bound(e, (0.2, 0.1))
        with self.assertRaises(BoundUndefinedError):
            dimension_bound(e, (-1.0, 0.0))

    def test_report_bound(self):
        nu = circle_measure(500)
        rep = DimensionReport(nu, np.geomspace(0.3, 0.1, 4), bound=(0.5, 0.1))
        assert rep.to_dict()["bound"] == [0.5, 0.1]
        assert rep.covering is None
        assert rep.window[1] == rep.radii[0]


if __name__ == "__main__":
    unittest.main()
