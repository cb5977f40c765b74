
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
Singularity sweep over the family mu^k = 1/2 mu + 1/4 (delta_{gamma^k} + delta_{gamma^-k}).

Each k is one cell: entropy H(mu^k), Lyapunov spectrum, harmonic measures
nu_i^k, differential entropies E_i, bounds E_i / gap_i and upper mean
dimensions. A failing cell is recorded with its error and the sweep goes on.
"""

import time
import numpy as np
from ..algebra.group import build_mu_k, shannon_entropy, is_r_regular
from ..errors import PreconditionError, BoundUndefinedError
from .core import RatioMethods, parallel_map, memory_usage
from .lyapunov import estimate_spectrum_qr
from .harmonic import sample_limit_flags
from .entropy import differential_entropy
from .dimension import dimension_bound, mean_dimension_interval


class SweepParams:
    """
    Estimator settings shared by all cells.

    Attributes:
        n, replicas : int
            Spectrum steps and replicas.
        N, flag_n : int
            Harmonic sample size and walk length per flag.
        radii : list of float
            Dimension radius grid.
        k_neighbors : int or None
        ratio_method : RatioMethods
        bootstrap : int
        q : float
            Mass tail of the mean-dimension interval.
    """

    def __init__(self, n=20000, replicas=8, N=4000, flag_n=200, radii=None, k_neighbors=None,
                 ratio_method=RatioMethods.Distance, bootstrap=200, q=0.05):
        self.n = n
        self.replicas = replicas
        self.N = N
        self.flag_n = flag_n
        self.radii = list(np.geomspace(0.3, 0.02, 10)) if radii is None else list(radii)
        self.k_neighbors = k_neighbors
        self.ratio_method = ratio_method
        self.bootstrap = bootstrap
        self.q = q

    def to_dict(self):
        return {"n": self.n, "replicas": self.replicas, "N": self.N, "flag_n": self.flag_n,
                "radii": [float(r) for r in self.radii], "k_neighbors": self.k_neighbors,
                "ratio_method": self.ratio_method.name, "bootstrap": self.bootstrap, "q": self.q}


class SweepReport:
    """
    Rows of the sweep, ordered by k.

    Attributes:
        d : int
        rows : list of dict
            One per k; failed cells carry ``status = "failed"`` and ``error``.
        meta : dict
    """

    def __init__(self, d, rows, meta):
        self.d = d
        self.rows = sorted(rows, key=lambda r: r["k"])
        self.meta = meta

    @property
    def columns(self):
        d = self.d
        cols = ["k", "H_mu_k"]
        cols += ["lambda_%d" % j for j in range(1, d + 1)]
        cols += ["stderr_%d" % j for j in range(1, d + 1)]
        cols += ["gap_%d" % j for j in range(1, d)]
        cols += ["E_%d" % j for j in range(1, d)]
        cols += ["bound_%d" % j for j in range(1, d)]
        cols += ["min_bound"]
        cols += ["upper_dim_%d" % j for j in range(1, d)]
        cols += ["n", "replicas", "N", "flag_n", "seed", "k_neighbors", "ratio_method", "status", "error"]
        return cols

    def table(self):
        """Rows as lists in column order; missing values are empty strings."""
        return [[r.get(c, "") for c in self.columns] for r in self.rows]

    def ok_rows(self):
        return [r for r in self.rows if r["status"] == "ok"]

    def row(self, k):
        for r in self.rows:
            if r["k"] == k:
                return r
        raise KeyError(k)

    def to_dict(self):
        return {"d": self.d, "meta": self.meta, "columns": self.columns, "rows": self.rows}

    def __repr__(self):
        return "SweepReport(d=%d, ks=%s, failed=%d)" % (
            self.d, [r["k"] for r in self.rows], len(self.rows) - len(self.ok_rows()))


def sweep_cell(mu, gamma, k, params, seed, threads=1, iprint=0):
    """One row of the sweep for a single k."""
    d = mu.d
    tx = time.perf_counter()
    row = {"k": k, "n": params.n, "replicas": params.replicas, "N": params.N, "flag_n": params.flag_n,
           "seed": seed, "k_neighbors": "" if params.k_neighbors is None else params.k_neighbors,
           "ratio_method": params.ratio_method.name}
    mu_k = build_mu_k(mu, gamma, k)
    row["H_mu_k"] = shannon_entropy(mu_k)
    est = estimate_spectrum_qr(mu_k, params.n, params.replicas, seed, threads=threads)
    for j in range(d):
        row["lambda_%d" % (j + 1)] = float(est.lambdas[j])
        row["stderr_%d" % (j + 1)] = float(est.stderr[j])
    bank = sample_limit_flags(mu_k, params.flag_n, params.N, seed, threads=threads)
    bounds = []
    for i in range(1, d):
        gap = est.gap(i)
        row["gap_%d" % i] = gap[0]
        nu = bank.project(i)
        ent = differential_entropy(mu_k, i, nu, k_neighbors=params.k_neighbors, method=params.ratio_method,
                                   bootstrap=params.bootstrap, seed=seed)
        row["E_%d" % i] = ent.value
        try:
            b, _ = dimension_bound(ent, gap)
            row["bound_%d" % i] = b
            bounds.append(b)
        except BoundUndefinedError:
            row["bound_%d" % i] = ""
        row["upper_dim_%d" % i] = mean_dimension_interval(nu, params.radii, params.q)[1]
    row["min_bound"] = min(bounds) if bounds else ""
    row["status"] = "ok"
    row["error"] = ""
    if iprint >= 2:
        print("%10s | k = %4d | H = %10.6f | lambda_1 = %12.6f | min bound = %10s | T = %8.3f | MEM = %7s" % (
            "sweep", k, row["H_mu_k"], row["lambda_1"],
            "%.6f" % row["min_bound"] if bounds else "undefined", time.perf_counter() - tx, memory_usage()))
    return row


def singularity_sweep(mu, gamma, ks, params=None, seed=0, threads=None, iprint=0):
    """
    Run one cell per k in a worker pool; rows come back ordered by k.

    Raises:
        PreconditionError : gamma is not R-regular.
    """
    params = SweepParams() if params is None else params
    regular, eigs, _ = is_r_regular(gamma)
    if not regular:
        raise PreconditionError("gamma is not R-regular (eigenvalue moduli %s)" %
                                ", ".join("%.6g" % abs(x) for x in eigs))
    if any(k < 1 for k in ks):
        raise PreconditionError("k values must be positive")
    tx = time.perf_counter()

    def run(k):
        try:
            return sweep_cell(mu, gamma, k, params, seed, threads=1, iprint=iprint)
        except Exception as e:
            if iprint >= 1:
                print("%10s | k = %4d | FAILED: %s" % ("sweep", k, e))
            return {"k": k, "status": "failed", "error": "%s: %s" % (type(e).__name__, e)}

    rows = parallel_map(run, sorted(set(ks)), threads=threads)
    meta = {"measure_hash": mu.support_hash(), "gamma": [[str(x) for x in r] for r in gamma.entries],
            "ks": sorted(set(ks)), "seed": seed, "params": params.to_dict()}
    rep = SweepReport(mu.d, rows, meta)
    if iprint >= 1:
        print("%10s | cells = %4d | failed = %4d | T = %8.3f | MEM = %7s" % (
            "sweep", len(rep.rows), len(rep.rows) - len(rep.ok_rows()), time.perf_counter() - tx, memory_usage()))
    return rep


def sweep_acceptance(report, base_entropy):
    """
    Trend checks over a finished sweep.

    Returns:
        report : dict
            ``entropy_bounded`` (H(mu^k) <= H(mu)/2 + 1.5 log 2), ``lambda_growth``
            (lambda_1 at the largest k beyond three combined stderr above the
            smallest k) and ``bound_shrinks`` (min bound halves between the
            endpoints).
    """
    rows = report.ok_rows()
    cap = 0.5 * base_entropy + 1.5 * np.log(2.0) + 1E-9
    ent_ok = len(rows) > 0 and all(r["H_mu_k"] <= cap for r in rows)
    grow_ok, shrink_ok = False, False
    if len(rows) >= 2:
        a, b = rows[0], rows[-1]
        grow_ok = b["lambda_1"] - a["lambda_1"] > 3 * (a["stderr_1"] + b["stderr_1"])
        if a["min_bound"] != "" and b["min_bound"] != "":
            shrink_ok = b["min_bound"] < 0.5 * a["min_bound"]
    return {"check": "sweep", "entropy_cap": cap, "entropy_bounded": bool(ent_ok),
            "lambda_growth": bool(grow_ok), "bound_shrinks": bool(shrink_ok),
            "failed_cells": [r["k"] for r in report.rows if r["status"] != "ok"],
            "passed": bool(ent_ok and grow_ok and shrink_ok and len(rows) == len(report.rows))}
