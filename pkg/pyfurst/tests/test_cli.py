import unittest
import os
import json
import tempfile
from pyfurst.cli import main, build_parser, config_path
from pyfurst.config import default_config_path
from pyfurst.io import read_json, read_csv

SANOV = {"d": 2, "atoms": [{"matrix": [[1, 2], [0, 1]], "weight": "1/4"},
                           {"matrix": [[1, -2], [0, 1]], "weight": "1/4"},
                           {"matrix": [[1, 0], [2, 1]], "weight": "1/4"},
                           {"matrix": [[1, 0], [-2, 1]], "weight": "1/4"}]}

TINY_STAGES = {
    "spectrum": {"n": 500, "replicas": 2},
    "sweep": {"n": 1000, "replicas": 2, "N": 200, "flag_n": 40, "radii": [0.3, 0.2, 0.12, 0.08, 0.05],
              "bootstrap": 10},
}


class TestCommandLine(unittest.TestCase):
    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()
        self.out = os.path.join(self.tmp.name, "out")

    def tearDown(self):
        self.tmp.cleanup()

    def write_config(self, **kwargs):
        doc = {"schema_version": 1, "measure": SANOV, "gamma": {"word": [[0, 1], [2, 1]]}, "ks": [1],
               "seed": 3, "threads": 1, "iprint": 0, "stages": TINY_STAGES}
        doc.update(kwargs)
        path = os.path.join(self.tmp.name, "run.json")
        with open(path, "w") as f:
            json.dump(doc, f)
        return path

    def test_parser(self):
        args = build_parser().parse_args(["sweep", "--seed", "7", "--threads", "2"])
        assert args.command == "sweep" and args.seed == 7 and args.threads == 2
        assert config_path(args, {}) == default_config_path()
        assert config_path(args, {"PYFURST_CONFIG": "x.json"}) == "x.json"
        with self.assertRaises(SystemExit):
            build_parser().parse_args(["plot"])

    def test_spectrum(self):
        path = self.write_config()
        assert main(["spectrum", "--config", path, "--out", self.out], environ={}) == 0
        rep = read_json(os.path.join(self.out, "reports", "spectrum.json"))
        assert rep["seed"] == 3 and rep["zero_sum_ok"]
        assert rep["estimate"]["lambdas"][0] > 0

    def test_stage_from_environment(self):
        path = self.write_config()
        env = {"PYFURST_CONFIG": path, "PYFURST_STAGE": "spectrum", "PYFURST_OUT": self.out, "PYFURST_SEED": "9"}
        assert main([], environ=env) == 0
        assert read_json(os.path.join(self.out, "reports", "spectrum.json"))["seed"] == 9

    def test_sweep(self):
        path = self.write_config()
        assert main(["sweep", "--config", path, "--out", self.out], environ={}) == 0
        cols, rows = read_csv(os.path.join(self.out, "sweep.csv"))
        assert cols[0] == "k" and len(rows) == 1 and rows[0][0] == "1"
        assert "acceptance" in read_json(os.path.join(self.out, "reports", "sweep.json"))

    def test_config_errors(self):
        assert main(["spectrum", "--config", os.path.join(self.tmp.name, "none.json")], environ={}) == 2
        path = self.write_config(measure={"d": 2, "atoms": [{"matrix": [[2, 0], [0, 1]], "weight": 1}]})
        assert main(["spectrum", "--config", path, "--out", self.out], environ={}) == 2
        path = self.write_config()
        assert main(["--config", path], environ={}) == 2
        assert main(["spectrum", "--config", path], environ={"PYFURST_SEED": "-4"}) == 2
        assert not os.path.exists(self.out)

    def test_stage_failure(self):
        path = self.write_config(gamma={"matrix": [[1, 2], [0, 1]]})
        assert main(["sweep", "--config", path, "--out", self.out], environ={}) == 1


if __name__ == "__main__":
    unittest.main()
