import unittest
import math
import numpy as np
from pyfurst.algebra.group import GroupElement, FiniteMeasure, shannon_entropy
from pyfurst.algorithms.core import RatioMethods
from pyfurst.algorithms.sweep import SweepParams, SweepReport, singularity_sweep, sweep_acceptance
from pyfurst.errors import PreconditionError


def sanov():
    a = GroupElement.generator([[1, 2], [0, 1]], 0)
    b = GroupElement.generator([[1, 0], [2, 1]], 1)
    return a @ b, FiniteMeasure.uniform([a, a.inverse(), b, b.inverse()])


def small_params(**kwargs):
    pars = dict(n=1500, replicas=2, N=200, flag_n=40, radii=np.geomspace(0.3, 0.05, 5), bootstrap=10)
    pars.update(kwargs)
    return SweepParams(**pars)


class TestSweep(unittest.TestCase):
    def test_params(self):
        p = SweepParams()
        assert len(p.radii) == 10
        assert p.ratio_method == RatioMethods.Distance
        assert p.to_dict()["ratio_method"] == "Distance"

    def test_small_sweep(self):
        gamma, mu = sanov()
        rep = singularity_sweep(mu, gamma, [4, 1], small_params(), seed=5, threads=1)
        assert [r["k"] for r in rep.rows] == [1, 4]
        assert len(rep.ok_rows()) == 2
        for r in rep.rows:
            self.assertAlmostEqual(r["H_mu_k"], 2.5 * math.log(2), 12)
            self.assertAlmostEqual(r["lambda_1"] + r["lambda_2"], 0.0, 9)
            assert r["gap_1"] > 0
            assert r["n"] == 1500 and r["seed"] == 5 and r["ratio_method"] == "Distance"
        assert rep.row(4)["lambda_1"] > rep.row(1)["lambda_1"]
        table = rep.table()
        assert len(table) == 2 and all(len(t) == len(rep.columns) for t in table)
        assert rep.columns[:4] == ["k", "H_mu_k", "lambda_1", "lambda_2"]
        assert "min_bound" in rep.columns and "upper_dim_1" in rep.columns
        assert rep.meta["measure_hash"] == mu.support_hash()
        with self.assertRaises(KeyError):
            rep.row(2)

    def test_threads_identical(self):
        gamma, mu = sanov()
        p = small_params(n=500, N=100, flag_n=30)
        t1 = singularity_sweep(mu, gamma, [1, 2], p, seed=7, threads=1).table()
        t2 = singularity_sweep(mu, gamma, [1, 2], p, seed=7, threads=2).table()
        assert t1 == t2

    def test_failed_cell(self):
        gamma, mu = sanov()
        rep = singularity_sweep(mu, gamma, [1], small_params(N=1), seed=0)
        row = rep.rows[0]
        assert row["status"] == "failed"
        assert "EmptyMeasureError" in row["error"]
        assert len(rep.ok_rows()) == 0
        assert rep.table()[0][rep.columns.index("lambda_1")] == ""

    def test_preconditions(self):
        gamma, mu = sanov()
        a = mu.atoms[0]
        with self.assertRaises(PreconditionError):
            singularity_sweep(mu, a, [1], small_params())
        with self.assertRaises(PreconditionError):
            singularity_sweep(mu, gamma, [0, 1], small_params())


class TestAcceptance(unittest.TestCase):
    def rows(self, lam, bounds):
        rows = []
        for k, l1, b in zip([1, 16], lam, bounds):
            rows.append({"k": k, "H_mu_k": 2.5 * math.log(2), "lambda_1": l1, "stderr_1": 0.01,
                         "min_bound": b, "status": "ok", "error": ""})
        return rows

    def test_pass(self):
        base = math.log(4)
        rep = SweepReport(2, self.rows([1.0, 5.0], [0.6, 0.1]), {})
        acc = sweep_acceptance(rep, base)
        assert acc["entropy_bounded"] and acc["lambda_growth"] and acc["bound_shrinks"]
        assert acc["passed"]
        self.assertAlmostEqual(acc["entropy_cap"], 0.5 * base + 1.5 * math.log(2) + 1E-9, 12)

    def test_fail(self):
        base = math.log(4)
        acc = sweep_acceptance(SweepReport(2, self.rows([1.0, 1.01], [0.6, 0.5]), {}), base)
        assert not acc["lambda_growth"] and not acc["bound_shrinks"] and not acc["passed"]
        rows = self.rows([1.0, 5.0], [0.6, ""])
        rows.append({"k": 8, "status": "failed", "error": "NumericError: x"})
        acc = sweep_acceptance(SweepReport(2, rows, {}), base)
        assert acc["failed_cells"] == [8]
        assert not acc["bound_shrinks"] and not acc["passed"]


if __name__ == "__main__":
    unittest.main()
