import unittest
import os
import tempfile
from pyfurst.config import ExperimentConfig
from pyfurst.experiment import verify_all

SANOV = {"d": 2, "atoms": [{"matrix": [[1, 2], [0, 1]], "weight": "1/4"},
                           {"matrix": [[1, -2], [0, 1]], "weight": "1/4"},
                           {"matrix": [[1, 0], [2, 1]], "weight": "1/4"},
                           {"matrix": [[1, 0], [-2, 1]], "weight": "1/4"}]}

TINY_STAGES = {
    "spectrum": {"n": 400, "replicas": 2},
    "harmonic": {"n": 30, "N": 200, "anchors": 4, "bootstrap": 10, "contraction_n": 40,
                 "contraction_paths": 4, "boundary_samples": 2},
    "entropy": {"n_max": 4, "bootstrap": 10, "decay_n": 6, "decay_paths": 4},
    "dimension": {"radii": [0.3, 0.2, 0.12, 0.08]},
    "sweep": {"n": 400, "replicas": 2, "N": 150, "flag_n": 30, "radii": [0.3, 0.2, 0.12, 0.08, 0.05],
              "bootstrap": 10},
    "claims": {"k_max": 4, "trials": 200, "N": 100, "n": 20},
}

CHECKS = ["spectrum_diagonal", "spectrum_sanov", "reflection_identity", "oseledets_convergence",
          "furstenberg_formula", "exterior_spectrum", "stationarity", "asymptotic_entropy", "entropy_chain",
          "translated_mass_decay", "contraction_diagonal", "contraction_sanov", "dimension_calibration",
          "dimension_bound", "singularity_sweep", "claims", "reproducibility"]


class TestVerify(unittest.TestCase):
    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()
        self.out = os.path.join(self.tmp.name, "out")

    def tearDown(self):
        self.tmp.cleanup()

    def config(self):
        doc = {"schema_version": 1, "measure": SANOV, "gamma": {"word": [[0, 1], [2, 1]]}, "ks": [1, 2],
               "seed": 3, "threads": 2, "iprint": 0, "output": self.out, "stages": TINY_STAGES}
        return ExperimentConfig(doc, base_dir=self.tmp.name)

    def test_same_seed_reports(self):
        path = os.path.join(self.out, "reports", "verify.json")
        status, results = verify_all(self.config())
        assert status in (0, 1)
        assert [r["name"] for r in results["checks"]] == CHECKS
        assert "timing" not in results
        with open(path, "rb") as f:
            first = f.read()
        assert b"timing" not in first
        rep = results["checks"][-1]
        assert rep["passed"] and rep["details"]["differing"] == []
        status2, _ = verify_all(self.config())
        assert status2 == status
        with open(path, "rb") as f:
            assert f.read() == first
        assert os.path.isdir(os.path.join(self.out, "reproducibility", "run_1"))


if __name__ == "__main__":
    unittest.main()
