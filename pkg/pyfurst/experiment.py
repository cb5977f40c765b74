
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
Stage runners and the verification suite.

Every runner reads its parameters from an :class:`ExperimentConfig`, writes
JSON reports under ``<output>/reports``, flag banks under ``<output>/banks``
and returns the report dict.
"""

import os
import copy
import math
import time
import numpy as np
from fractions import Fraction
from .algebra.group import GroupElement, FiniteMeasure, build_mu_k, shannon_entropy, \
    free_group_entropy, free_group_drift_entropy
from .algebra.grassmann import GrassmannPoint
from .algorithms.core import StageTimer, format_timing, clear_timing
from .algorithms.lyapunov import estimate_spectrum_qr, check_reflection_identity, \
    furstenberg_partial_sum, exterior_spectrum_check, oseledets_convergence
from .algorithms.harmonic import sample_limit_flags, stationarity_check, contraction_rates, \
    ball_positivity_check, circle_measure, cantor_measure, atom_measure
from .algorithms.entropy import asymptotic_entropy, differential_entropy, translated_mass_decay, \
    entropy_chain_check
from .algorithms.dimension import DimensionReport, dimension_bound
from .algorithms.claims import diagonalize, claim_gk_check, claim_opens_estimate, claim_l1_check
from .algorithms.sweep import SweepParams, singularity_sweep, sweep_acceptance
from .config import entropy_method, ratio_method
from .errors import BoundUndefinedError
from .io import write_json, write_csv, write_flag_bank, read_flag_bank, diff_outputs


def _reports(config, name):
    return os.path.join(config.output, "reports", name + ".json")


def _ranks(config, params):
    d = config.measure.d
    return list(range(1, d)) if params.get("ranks") is None else [int(i) for i in params["ranks"]]


def _bank_path(config, i):
    return os.path.join(config.output, "banks", "nu_%d.flags" % i)


def harmonic_measures(config):
    """
    Empirical nu_i for every rank, reloaded from the bank directory when a
    bank with the same measure hash, n, N and seed is present. Fresh banks
    are written first and served from disk as well.
    """
    if config._nus is not None:
        return config._nus
    mu, p = config.measure, config.params("harmonic")
    nus, missing = {}, []
    for i in range(1, mu.d):
        path = _bank_path(config, i)
        if os.path.exists(path):
            nu = read_flag_bank(path)
            m = nu.meta
            if (m.get("measure_hash"), m.get("n"), m.get("count"), m.get("seed")) == \
                    (mu.support_hash(), p["n"], p["N"], config.seed):
                nus[i] = nu
                continue
        missing.append(i)
    if missing:
        bank = sample_limit_flags(mu, p["n"], p["N"], config.seed, threads=config.threads,
                                  iprint=config.iprint)
        for i in missing:
            write_flag_bank(bank.project(i), _bank_path(config, i))
            nus[i] = read_flag_bank(_bank_path(config, i))
    config._nus = nus
    return nus


def run_spectrum(config):
    mu, p = config.measure, config.params("spectrum")
    with StageTimer("spectrum", config.iprint):
        est = estimate_spectrum_qr(mu, p["n"], p["replicas"], config.seed, threads=config.threads,
                                   iprint=config.iprint)
        refl = check_reflection_identity(mu, p["n"], p["replicas"], config.seed, threads=config.threads)
    rep = {"stage": "spectrum", "estimate": est.to_dict(), "zero_sum_ok": bool(est.zero_sum_ok()),
           "simple": est.is_simple(), "reflection": refl, "measure_hash": mu.support_hash(),
           "seed": config.seed}
    write_json(_reports(config, "spectrum"), rep)
    config._spectrum = est
    return rep


def _spectrum(config):
    if config._spectrum is None:
        run_spectrum(config)
    return config._spectrum


def run_harmonic(config):
    mu, p = config.measure, config.params("harmonic")
    with StageTimer("harmonic", config.iprint):
        nus = harmonic_measures(config)
        rep = {"stage": "harmonic", "n": p["n"], "N": p["N"], "seed": config.seed, "ranks": {}}
        for i in _ranks(config, p):
            nu = nus[i]
            furst = furstenberg_partial_sum(mu, i, nu, seed=config.seed)
            stat = stationarity_check(mu, nu, anchors=p["anchors"], seed=config.seed, bootstrap=p["bootstrap"])
            contr = contraction_rates(mu, i, p["contraction_r"], p["contraction_n"], p["boundary_samples"],
                                      p["contraction_paths"], config.seed, threads=config.threads,
                                      iprint=config.iprint)
            balls = ball_positivity_check(mu, nu, p["contraction_r"], p["n"], min(p["contraction_paths"], 100),
                                          config.seed)
            rep["ranks"][str(i)] = {"furstenberg": list(furst), "stationarity": stat, "contraction": contr,
                                    "ball_positivity": balls, "max_atom_mass": nu.rounded_atom_max_mass(),
                                    "median_convergence_gap": nu.meta.get("median_convergence_gap")}
    write_json(_reports(config, "harmonic"), rep)
    return rep


def run_entropy(config):
    mu, p = config.measure, config.params("entropy")
    with StageTimer("entropy", config.iprint):
        h = asymptotic_entropy(mu, p["n_max"], method=entropy_method(p["method"]), iprint=config.iprint)
        nus = harmonic_measures(config)
        shannon = shannon_entropy(mu)
        rep = {"stage": "entropy", "asymptotic": h.to_dict(), "monotonicity": h.check_monotonicity(),
               "shannon": shannon, "differential": {}, "chain": {}, "decay": {}}
        ents = {}
        for i in range(1, mu.d):
            e = differential_entropy(mu, i, nus[i], k_neighbors=p["k_neighbors"], method=ratio_method(p["ratio"]),
                                     bootstrap=p["bootstrap"], seed=config.seed, iprint=config.iprint)
            ents[i] = e
            rep["differential"][str(i)] = e.to_dict()
            rep["chain"][str(i)] = entropy_chain_check(h, e, shannon)
        nu = nus[1]
        rep["decay"] = translated_mass_decay(mu, 1, nu, nu.point(0), p["decay_radius"], p["decay_n"],
                                             p["decay_paths"], config.seed, entropy=ents[1])
    write_json(_reports(config, "entropy"), rep)
    config._entropy = (h, ents)
    return rep


def _entropies(config):
    if config._entropy is None:
        run_entropy(config)
    return config._entropy


def _radii(radii, default):
    return list(default) if radii is None else [float(r) for r in radii]


def run_dimension(config):
    mu, p = config.measure, config.params("dimension")
    with StageTimer("dimension", config.iprint):
        nus = harmonic_measures(config)
        est = _spectrum(config)
        _, ents = _entropies(config)
        rep = {"stage": "dimension", "ranks": {}}
        for i in range(1, mu.d):
            nu = nus[i]
            try:
                bound = dimension_bound(ents[i], est.gap(i))
            except BoundUndefinedError:
                bound = None
            radii = _radii(p["radii"], np.geomspace(0.3, 0.01, 12))
            dim = DimensionReport(nu, radii, p["epsilons"], p["q"], bound=bound)
            rep["ranks"][str(i)] = dim.to_dict()
            write_csv(os.path.join(config.output, "dimension_%d.csv" % i), ["point", "radius", "mass", "ratio"],
                      dim.curves.csv_rows())
    write_json(_reports(config, "dimension"), rep)
    return rep


def sweep_params(config):
    p = config.params("sweep")
    return SweepParams(n=p["n"], replicas=p["replicas"], N=p["N"], flag_n=p["flag_n"],
                       radii=_radii(p["radii"], np.geomspace(0.3, 0.01, 12)), k_neighbors=p["k_neighbors"],
                       ratio_method=ratio_method(p["ratio"]), bootstrap=p["bootstrap"], q=p["q"])


def run_singularity_sweep(config):
    """Sweep over config.ks; writes sweep.csv and reports/sweep.json."""
    with StageTimer("sweep", config.iprint):
        rep = singularity_sweep(config.measure, config.gamma, config.ks, sweep_params(config), config.seed,
                                threads=config.threads, iprint=config.iprint)
    write_csv(os.path.join(config.output, "sweep.csv"), rep.columns, rep.table())
    out = rep.to_dict()
    out["acceptance"] = sweep_acceptance(rep, shannon_entropy(config.measure))
    write_json(_reports(config, "sweep"), out)
    return rep


def run_claims(config):
    mu, p = config.measure, config.params("claims")
    ks = list(range(1, 17)) if p["ks"] is None else [int(k) for k in p["ks"]]
    with StageTimer("claims", config.iprint):
        diag = diagonalize(config.gamma)
        gk = claim_gk_check(config.gamma, p["k_max"], p["trials"], config.seed)
        measures = {k: build_mu_k(mu, config.gamma, k) for k in ks}
        opens = claim_opens_estimate(measures, diag, p["beta"], p["N"], config.seed, p["n"],
                                     threads=config.threads, iprint=config.iprint)
        sp = config.params("sweep")
        lambdas = {}
        for k in ks:
            e = estimate_spectrum_qr(measures[k], sp["n"], sp["replicas"], config.seed, threads=config.threads)
            lambdas[k] = (float(e.lambdas[0]), float(e.stderr[0]))
        l1 = claim_l1_check(mu, diag, lambdas, {k: opens["masses"][str(k)] for k in ks}, p["beta"])
    rep = {"stage": "claims", "gk": gk, "opens": opens, "l1": l1,
           "passed": bool(gk["passed"] and opens["passed"] and l1["passed"])}
    write_json(_reports(config, "claims"), rep)
    return rep


_runners = {"spectrum": run_spectrum, "harmonic": run_harmonic, "entropy": run_entropy,
            "dimension": run_dimension, "sweep": run_singularity_sweep, "claims": run_claims}


def run_stage(config, stage):
    if stage == "verify":
        return verify_all(config)
    return _runners[stage](config)


def _diag_e():
    e = math.e
    return FiniteMeasure.delta(GroupElement([[e, 0.0], [0.0, 1 / e]], exact=False))


def asymmetric_measures():
    """An asymmetric d = 2 measure (Sanov generators) and an asymmetric d = 3 measure."""
    a = GroupElement([[1, 2], [0, 1]])
    b = GroupElement([[1, 0], [2, 1]])
    w = [Fraction(2, 5), Fraction(1, 10), Fraction(2, 5), Fraction(1, 10)]
    m2 = FiniteMeasure([a, a.inverse(), b, b.inverse()], w, nondegenerate=True, zariski_dense=True)
    c = GroupElement([[1, 1, 0], [0, 1, 1], [0, 0, 1]])
    e = GroupElement([[1, 0, 0], [2, 1, 0], [1, 3, 1]])
    m3 = FiniteMeasure([c, c.inverse(), e, e.inverse()], w, nondegenerate=True, zariski_dense=True)
    return m2, m3


class _Checks:
    """Collects named check results; an exception fails only its own check."""

    def __init__(self, iprint=0):
        self.results = []
        self.iprint = iprint

    def run(self, name, func):
        tx = time.perf_counter()
        with StageTimer(name, 0):
            try:
                rep = func()
                passed = bool(rep.pop("passed"))
            except Exception as e:
                rep, passed = {"error": "%s: %s" % (type(e).__name__, e)}, False
        self.results.append({"name": name, "passed": passed, "details": rep})
        if self.iprint >= 1:
            print("Verify = %28s | %s | Time = %10.3f" % (name, "PASS" if passed else "FAIL",
                                                          time.perf_counter() - tx))
        return rep

    @property
    def passed(self):
        return all(r["passed"] for r in self.results)


def _small_config(config, output, threads):
    """Copy of config with desk-test sizes for the spectrum and sweep stages."""
    small = copy.copy(config)
    small.stages = copy.deepcopy(config.stages)
    small.stages["spectrum"].update(n=500, replicas=2)
    small.stages["sweep"].update(n=500, replicas=2, N=200, flag_n=50, radii=[0.3, 0.2, 0.12, 0.08, 0.05],
                                 bootstrap=20)
    small.ks = config.ks[:2]
    small.output, small.threads, small.iprint = output, threads, 0
    small._nus, small._spectrum, small._entropy = None, None, None
    return small


def verify_all(config):
    """
    Acceptance suite at the configured sizes.

    Returns:
        status : int
            0 if every check passed, 1 otherwise.
        results : dict
    """
    clear_timing()
    mu = config.measure
    sp, hp, ep = config.params("spectrum"), config.params("harmonic"), config.params("entropy")
    dp = config.params("dimension")
    seed, threads = config.seed, config.threads
    chk = _Checks(config.iprint)
    m2, m3 = asymmetric_measures()
    state = {}

    def diag_spectrum():
        est = estimate_spectrum_qr(_diag_e(), 1000, 2, seed)
        dev = float(np.max(np.abs(est.lambdas - np.array([1.0, -1.0]))))
        return {"lambdas": est.lambdas.tolist(), "deviation": dev, "passed": dev <= 1E-10}

    def sanov_spectrum():
        est = estimate_spectrum_qr(mu, sp["n"], sp["replicas"], seed, threads=threads)
        state["est"] = est
        return {"estimate": est.to_dict(), "zero_sum": bool(est.zero_sum_ok()),
                "passed": bool(est.zero_sum_ok() and est.lambdas[0] > 0.2)}

    def reflection():
        r2 = check_reflection_identity(m2, sp["n"], sp["replicas"], seed, threads=threads)
        r3 = check_reflection_identity(m3, sp["n"], sp["replicas"], seed, threads=threads)
        return {"d2": r2, "d3": r3, "passed": r2["passed"] and r3["passed"]}

    def convergence():
        rep = oseledets_convergence(mu, sp["n"] // 4, sp["replicas"], seed, threads=threads)
        return rep

    def furstenberg():
        out, ok = {}, True
        for name, m in (("d2", m2), ("d3", m3)):
            est = estimate_spectrum_qr(m, sp["n"], sp["replicas"], seed, threads=threads)
            bank = sample_limit_flags(m, hp["n"], hp["N"], seed, threads=threads)
            for i in sorted({1, m.d - 1}):
                val, err = furstenberg_partial_sum(m, i, bank.project(i), seed=seed)
                pred = float(est.lambdas[:i].sum())
                sig = err + float(np.sqrt(np.sum(est.stderr[:i] ** 2)))
                good = abs(val - pred) <= 3 * sig + 1E-10
                out["%s_i%d" % (name, i)] = {"value": val, "stderr": err, "predicted": pred, "passed": good}
                ok = ok and good
        out["passed"] = ok
        return out

    def exterior():
        return exterior_spectrum_check(m3, 2, sp["n"], sp["replicas"], seed, threads=threads)

    def harmonic_stationarity():
        nu = harmonic_measures(config)[1]
        rep = stationarity_check(mu, nu, anchors=hp["anchors"], seed=seed, bootstrap=hp["bootstrap"])
        rep["max_atom_mass"] = nu.rounded_atom_max_mass()
        rep["passed"] = rep["passed"] and rep["max_atom_mass"] <= 0.01
        return rep

    def asymptotic():
        h = asymptotic_entropy(mu, ep["n_max"], method=entropy_method(ep["method"]))
        state["h"] = h
        mono = h.check_monotonicity()
        oracle = [free_group_entropy(2, n) for n in range(1, ep["n_max"] + 1)]
        dev = float(np.max(np.abs(np.array(h.entropies) - np.array(oracle))))
        target = free_group_drift_entropy(2)
        rel = abs(h.h_estimate - target) / target
        return {"estimate": h.to_dict(), "monotonicity": mono, "oracle_deviation": dev,
                "relative_error": rel, "passed": bool(mono["passed"] and dev <= 1E-9 and rel <= 0.05)}

    def chain():
        nu = harmonic_measures(config)[1]
        e = differential_entropy(mu, 1, nu, k_neighbors=ep["k_neighbors"], method=ratio_method(ep["ratio"]),
                                 bootstrap=ep["bootstrap"], seed=seed)
        state["E1"] = e
        return entropy_chain_check(state["h"], e, shannon_entropy(mu))

    def decay():
        nu = harmonic_measures(config)[1]
        return translated_mass_decay(mu, 1, nu, nu.point(0), ep["decay_radius"], ep["decay_n"],
                                     ep["decay_paths"], seed, entropy=state["E1"])

    def contraction_diag():
        rep = contraction_rates(_diag_e(), 1, 0.5, 200, 8, 4, seed)
        rep["passed"] = abs(rep["median"] - 2.0) <= 0.05
        return rep

    def contraction_sanov():
        rep = contraction_rates(mu, 1, hp["contraction_r"], hp["contraction_n"], hp["boundary_samples"],
                                hp["contraction_paths"], seed, threads=threads)
        gap = state["est"].gap(1)[0]
        rep["gap"] = gap
        rep["passed"] = rep["q05"] >= gap - 0.1
        return rep

    def calibration():
        circle = DimensionReport(circle_measure(10000), np.geomspace(0.3, 0.021, 10), [0.05, 0.1])
        cantor = DimensionReport(cantor_measure(13), np.geomspace(0.0556, 6.9E-4, 10), [0.05, 0.1])
        atom = DimensionReport(atom_measure(1000, GrassmannPoint.coordinate(2, [0])),
                               np.geomspace(0.3, 0.05, 6), [0.05, 0.1])
        c_med, k_med = circle.curves.median(), cantor.curves.median()
        ok = abs(c_med - 1.0) <= 0.1 and abs(k_med - math.log(2) / math.log(3)) <= 0.05
        ok = ok and all(r.chain_ok(0.1) for r in (circle, cantor, atom))
        return {"circle": circle.to_dict(), "cantor": cantor.to_dict(), "atom": atom.to_dict(),
                "passed": bool(ok)}

    def bound():
        nu = harmonic_measures(config)[1]
        b = dimension_bound(state["E1"], state["est"].gap(1))
        radii = _radii(dp["radii"], np.geomspace(0.3, 0.01, 12))
        rep = DimensionReport(nu, radii, None, dp["q"], bound=b).to_dict()
        rep["passed"] = rep["mean_dim_interval"][1] <= b[0] + 0.1
        return rep

    def sweep():
        rep = run_singularity_sweep(config)
        acc = sweep_acceptance(rep, shannon_entropy(mu))
        return acc

    def claims():
        rep = run_claims(config)
        return {"gk": rep["gk"], "opens": rep["opens"], "passed": rep["gk"]["passed"] and rep["opens"]["passed"]}

    def reproducibility():
        root = os.path.join(config.output, "reproducibility")
        dirs = []
        for j, threads_ in enumerate((1, max(2, threads))):
            small = _small_config(config, os.path.join(root, "run_%d" % j), threads_)
            run_spectrum(small)
            run_singularity_sweep(small)
            dirs.append(small.output)
        diff = diff_outputs(*dirs)
        return {"threads": [1, max(2, threads)], "differing": diff, "passed": len(diff) == 0}

    chk.run("spectrum_diagonal", diag_spectrum)
    chk.run("spectrum_sanov", sanov_spectrum)
    chk.run("reflection_identity", reflection)
    chk.run("oseledets_convergence", convergence)
    chk.run("furstenberg_formula", furstenberg)
    chk.run("exterior_spectrum", exterior)
    chk.run("stationarity", harmonic_stationarity)
    chk.run("asymptotic_entropy", asymptotic)
    chk.run("entropy_chain", chain)
    chk.run("translated_mass_decay", decay)
    chk.run("contraction_diagonal", contraction_diag)
    chk.run("contraction_sanov", contraction_sanov)
    chk.run("dimension_calibration", calibration)
    chk.run("dimension_bound", bound)
    chk.run("singularity_sweep", sweep)
    chk.run("claims", claims)
    chk.run("reproducibility", reproducibility)
    results = {"passed": chk.passed, "checks": chk.results, "config": config.to_dict()}
    write_json(_reports(config, "verify"), results)
    if config.iprint >= 1:
        print(format_timing())
    return (0 if chk.passed else 1), results
