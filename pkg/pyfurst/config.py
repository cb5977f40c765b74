
#  pyfurst: A python laboratory for random walks on SL(d, R)
#  Copyright (C) 2020 The pyfurst developers. All Rights Reserved.
#
#  This program is free software: you can redistribute it and/or modify
#  it under the terms of the GNU General Public License as published by
#  the Free Software Foundation, either version 3 of the License, or
#  (at your option) any later version.
#
#  This program is distributed in the hope that it will be useful,
#  but WITHOUT ANY WARRANTY; without even the implied warranty of
#  MERCHANTABILITY or FITNESS FOR A PARTICULAR PURPOSE.  See the
#  GNU General Public License for more details.
#
#  You should have received a copy of the GNU General Public License
#  along with this program. If not, see <https://www.gnu.org/licenses/>.
#
#

"""
Experiment configuration.

One JSON document with ``schema_version`` 1. A relative measure path is
resolved against the directory of the document, a relative output directory
against the working directory. Command-line flags override the
``PYFURST_*`` environment variables, which override the document.
"""

import os
import copy
import json
from .algebra.group import GroupElement
from .algorithms.core import EntropyMethods, RatioMethods
from .errors import ConfigError, MeasureFileError, PreconditionError
from .io import load_measure, measure_from_dict
from . import setting

SCHEMA_VERSION = 1

ENV_PREFIX = "PYFURST_"

STAGES = ["spectrum", "harmonic", "entropy", "dimension", "sweep", "claims", "verify"]

DEFAULT_STAGES = {
    "spectrum": {"n": 100000, "replicas": 16},
    "harmonic": {"n": 200, "N": 10000, "ranks": None, "anchors": 16, "bootstrap": 200,
                 "contraction_r": 0.5, "contraction_n": 1000, "contraction_paths": 100,
                 "boundary_samples": 8},
    "entropy": {"n_max": 12, "method": "log-corrected", "ratio": "distance", "k_neighbors": None,
                "bootstrap": 200, "decay_n": 50, "decay_paths": 200, "decay_radius": 0.3},
    "dimension": {"radii": None, "epsilons": [0.05, 0.1, 0.2], "q": 0.05},
    "sweep": {"n": 20000, "replicas": 8, "N": 4000, "flag_n": 200, "radii": None,
              "k_neighbors": None, "ratio": "distance", "bootstrap": 200, "q": 0.05},
    "claims": {"k_max": 64, "trials": 100000, "beta": 0.5, "N": 10000, "n": 200, "ks": None},
    "verify": {},
}

_methods = {"difference": EntropyMethods.Difference, "log-corrected": EntropyMethods.LogCorrected}
_ratios = {"count": RatioMethods.Count, "distance": RatioMethods.Distance}


def entropy_method(name):
    if name not in _methods:
        raise ConfigError("unknown entropy method %r (use %s)" % (name, ", ".join(_methods)))
    return _methods[name]


def ratio_method(name):
    if name not in _ratios:
        raise ConfigError("unknown ratio method %r (use %s)" % (name, ", ".join(_ratios)))
    return _ratios[name]


def _merge(base, extra):
    out = copy.deepcopy(base)
    for k, v in extra.items():
        if isinstance(v, dict) and isinstance(out.get(k), dict):
            out[k] = _merge(out[k], v)
        else:
            out[k] = v
    return out


class ExperimentConfig:
    """
    Attributes:
        measure : FiniteMeasure
        gamma : GroupElement
        ks : list of int
        seed : int
        output : str
        threads, iprint : int
        tolerances : dict
        stages : dict
            Stage name -> parameter dict (defaults filled in).
        stage : str or None
            Stage selected by --stage / PYFURST_STAGE.
        source : str or None
            Path of the document.
    """

    def __init__(self, doc, base_dir=".", source=None):
        if not isinstance(doc, dict):
            raise ConfigError("configuration must be a JSON object")
        ver = doc.get("schema_version")
        if ver != SCHEMA_VERSION:
            raise ConfigError("schema_version %r is not supported (expected %d)" % (ver, SCHEMA_VERSION))
        unknown = set(doc) - {"schema_version", "measure", "gamma", "ks", "seed", "output", "threads",
                              "iprint", "tolerances", "stages", "stage", "description"}
        if unknown:
            raise ConfigError("unknown configuration keys: %s" % ", ".join(sorted(unknown)))
        self.doc = doc
        self.base_dir = base_dir
        self.source = source
        if "measure" not in doc:
            raise ConfigError("configuration needs a 'measure'")
        self.measure_spec = doc["measure"]
        self.measure = self._load_measure(doc["measure"])
        self.gamma = self._parse_gamma(doc.get("gamma"))
        self.ks = [int(k) for k in doc.get("ks", [1, 2, 4, 8, 16])]
        if len(self.ks) == 0 or any(k < 1 for k in self.ks):
            raise ConfigError("k values must be positive integers, got %r" % (doc.get("ks"), ))
        self.seed = self._seed(doc.get("seed", 0))
        self.output = os.path.abspath(doc.get("output", "pyfurst_out"))
        self.threads = int(doc.get("threads", 1))
        self.iprint = int(doc.get("iprint", 0))
        self.tolerances = dict(doc.get("tolerances", {}))
        unknown = set(self.tolerances) - set(setting.get_tolerances())
        if unknown:
            raise ConfigError("unknown tolerances: %s" % ", ".join(sorted(unknown)))
        stages = doc.get("stages", {})
        unknown = set(stages) - set(STAGES)
        if unknown:
            raise ConfigError("unknown stages: %s" % ", ".join(sorted(unknown)))
        self.stages = _merge(DEFAULT_STAGES, stages)
        for name, pars in self.stages.items():
            extra = set(pars) - set(DEFAULT_STAGES[name])
            if extra:
                raise ConfigError("unknown parameters for stage %s: %s" % (name, ", ".join(sorted(extra))))
        self.stage = None
        self.select_stage(doc.get("stage"))
        # results shared between stages of one run
        self._nus = None
        self._spectrum = None
        self._entropy = None

    def _path(self, p):
        return p if os.path.isabs(p) else os.path.normpath(os.path.join(self.base_dir, p))

    @staticmethod
    def _seed(x):
        try:
            s = int(x)
        except (TypeError, ValueError):
            raise ConfigError("seed must be an unsigned 64-bit integer, got %r" % (x, ))
        if not 0 <= s < 2 ** 64:
            raise ConfigError("seed must be an unsigned 64-bit integer, got %r" % (x, ))
        return s

    def _load_measure(self, spec):
        try:
            if isinstance(spec, str):
                return load_measure(self._path(spec))
            return measure_from_dict(spec)
        except MeasureFileError as e:
            raise ConfigError("invalid measure: %s" % e)

    def _parse_gamma(self, spec):
        """gamma as {"matrix": [[...]]} or {"word": [[atom index, exponent], ...]}."""
        if spec is None:
            raise ConfigError("configuration needs 'gamma'")
        try:
            if "matrix" in spec:
                return GroupElement(spec["matrix"])
            if "word" in spec:
                g = GroupElement.identity(self.measure.d)
                for idx, e in spec["word"]:
                    g = g @ self.measure.atoms[int(idx)].power(int(e))
                return g
        except (ValueError, IndexError, TypeError, PreconditionError) as e:
            raise ConfigError("invalid gamma: %s" % e)
        raise ConfigError("gamma needs 'matrix' or 'word'")

    def select_stage(self, stage):
        if stage is not None and stage not in STAGES:
            raise ConfigError("unknown stage %r (use %s)" % (stage, ", ".join(STAGES)))
        self.stage = stage

    def params(self, stage):
        return self.stages[stage]

    def apply_overrides(self, seed=None, output=None, threads=None, stage=None, environ=None):
        """
        Environment variables first, then explicit arguments (flags).
        """
        environ = os.environ if environ is None else environ
        env = {k[len(ENV_PREFIX):].lower(): v for k, v in environ.items() if k.startswith(ENV_PREFIX)}
        if "seed" in env:
            self.seed = self._seed(env["seed"])
        if "out" in env:
            self.output = os.path.abspath(env["out"])
        if "threads" in env:
            self.threads = int(env["threads"])
        if "stage" in env:
            self.select_stage(env["stage"])
        if seed is not None:
            self.seed = self._seed(seed)
        if output is not None:
            self.output = os.path.abspath(output)
        if threads is not None:
            self.threads = int(threads)
        if stage is not None:
            self.select_stage(stage)
        return self

    def apply_settings(self):
        setting.set_options(threads=self.threads, iprint=self.iprint, tolerances=self.tolerances)

    def to_dict(self):
        return {"schema_version": SCHEMA_VERSION, "measure_hash": self.measure.support_hash(),
                "gamma": [[str(x) for x in r] for r in self.gamma.entries], "ks": self.ks,
                "seed": self.seed, "output": self.output, "threads": self.threads, "iprint": self.iprint,
                "tolerances": self.tolerances, "stages": self.stages, "stage": self.stage}

    def __repr__(self):
        return "ExperimentConfig(d=%d, ks=%s, seed=%d, output=%s)" % (
            self.measure.d, self.ks, self.seed, self.output)


def load_config(filename):
    try:
        with open(filename, 'r') as f:
            doc = json.load(f)
    except OSError as e:
        raise ConfigError("cannot read configuration %s: %s" % (filename, e))
    except ValueError as e:
        raise ConfigError("configuration %s is not valid JSON: %s" % (filename, e))
    return ExperimentConfig(doc, base_dir=os.path.dirname(os.path.abspath(filename)), source=filename)


def default_config_path():
    return os.path.join(os.path.dirname(os.path.abspath(__file__)), "data", "sanov.json")
