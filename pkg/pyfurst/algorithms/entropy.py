
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
Entropies of random walks.

Asymptotic entropy from exact convolution powers; Furstenberg (differential)
entropy E_i = sum_g mu(g) KL(nu_i || g^-1 nu_i) from nearest-neighbour density
ratios on an empirical harmonic measure; decay of translated ball masses.
"""

import math
import time
import numpy as np
from functools import reduce
from .. import setting
from ..algebra.group import _matmul_num, _reduce, entropy_of_weights
from ..algebra.grassmann import wedge_distance, act_on_wedges
from ..errors import SupportCapError, PreconditionError, NumericError, EmptyMeasureError
from .core import EntropyMethods, RatioMethods, Streams, memory_usage
from .sampler import keyed_generator, increment_indices, reflected


class AsymptoticEntropyEstimate:
    """
    Attributes:
        entropies : list of float
            H(mu^{*n}) for n = 1 .. n_max.
        h_values : list of float
            H(mu^{*n}) / n.
        h_diffs : list of float
            H(mu^{*(n+1)}) - H(mu^{*n}) for n = 0 .. n_max - 1 (H of mu^{*0} is 0).
        h_difference, h_log_corrected : float
            Last difference, and the slope of H(n) = h n + c log n + b fitted
            over the last few n.
        h_estimate : float
            The estimate selected by ``method``.
        supports : list of int
    """

    def __init__(self, entropies, supports, method=EntropyMethods.LogCorrected, fit_points=5):
        self.entropies = list(entropies)
        self.supports = list(supports)
        self.n_max = len(entropies)
        self.method = method
        self.h_values = [h / (n + 1) for n, h in enumerate(entropies)]
        self.h_diffs = list(np.diff([0.0] + self.entropies))
        self.h_difference = self.h_diffs[-1]
        self.h_log_corrected = self._log_corrected(fit_points)
        if method == EntropyMethods.Difference or self.h_log_corrected is None:
            self.h_estimate = self.h_difference
        else:
            self.h_estimate = self.h_log_corrected

    def _log_corrected(self, fit_points):
        npts = min(fit_points, self.n_max)
        if npts < 3:
            return None
        ns = np.arange(self.n_max - npts + 1, self.n_max + 1, dtype=float)
        a = np.stack([ns, np.log(ns), np.ones_like(ns)], axis=1)
        coef = np.linalg.lstsq(a, np.array(self.entropies[-npts:]), rcond=None)[0]
        return float(min(max(coef[0], 0.0), self.h_difference))

    def check_monotonicity(self, tol=1E-12):
        hv, hd = np.array(self.h_values), np.array(self.h_diffs)
        ok_values = bool(np.all(np.diff(hv) <= tol))
        ok_diffs = bool(np.all(np.diff(hd) <= tol))
        ok_above = bool(np.all(hd >= self.h_estimate - tol))
        sub = all(self.entropies[a + b - 1] <= self.entropies[a - 1] + self.entropies[b - 1] + tol
                  for a in range(1, self.n_max + 1) for b in range(1, self.n_max + 1 - a))
        return {"h_values_non_increasing": ok_values, "h_diffs_non_increasing": ok_diffs,
                "h_diffs_above_estimate": ok_above, "subadditive": sub,
                "passed": ok_values and ok_diffs and ok_above and sub}

    def to_dict(self):
        return {"n_max": self.n_max, "entropies": self.entropies, "h_values": self.h_values,
                "h_diffs": self.h_diffs, "h_difference": self.h_difference,
                "h_log_corrected": self.h_log_corrected, "h_estimate": self.h_estimate,
                "method": self.method.name, "supports": self.supports}

    def __repr__(self):
        return "AsymptoticEntropyEstimate(n_max=%d, h=%.6f, method=%s)" % (
            self.n_max, self.h_estimate, self.method.name)


def _integer_weights(mu):
    den = reduce(lambda x, y: x * y // math.gcd(x, y), [w.denominator for w in mu.weights], 1)
    return den, [int(w * den) for w in mu.weights]


def asymptotic_entropy(mu, n_max, method=EntropyMethods.LogCorrected, cap=None, iprint=0):
    """
    Exact H(mu^{*n}), n = 1 .. n_max, by repeated convolution with mu.

    Rational weights are carried as integers over a common denominator D,
    so the weights of mu^{*n} are exact integers over D^n.
    """
    if not mu.exact:
        raise PreconditionError("asymptotic entropy needs exact rational atoms")
    if n_max < 1:
        raise ValueError("n_max must be positive, got %d" % n_max)
    cap = setting.SUPPORT_CAP if cap is None else cap
    d = mu.d
    if mu.rational:
        den, ints = _integer_weights(mu)
    else:
        den, ints = 1, [float(w) for w in mu.weights]
    steps = [((g.den, g.num), c) for g, c in zip(mu.atoms, ints)]
    cur = {}
    for k, c in steps:
        cur[k] = cur.get(k, 0) + c
    entropies, supports = [], []
    scale = den
    for n in range(1, n_max + 1):
        tx = time.perf_counter()
        if n > 1:
            nxt = {}
            for (da, na), wa in cur.items():
                for (db, nb), wb in steps:
                    key = _reduce(_matmul_num(na, nb, d), da * db)[::-1]
                    if key in nxt:
                        nxt[key] += wa * wb
                    else:
                        nxt[key] = wa * wb
                        if len(nxt) > cap:
                            raise SupportCapError(cap, n - 1, len(nxt))
            cur = nxt
            scale *= den
        fscale = float(scale)
        entropies.append(entropy_of_weights(c / fscale for c in cur.values()) if mu.rational
                         else entropy_of_weights(cur.values()))
        supports.append(len(cur))
        if iprint >= 2:
            print("%10s | n = %4d | support = %10d | H = %15.10f | T = %8.3f | MEM = %7s" % (
                "entropy", n, len(cur), entropies[-1], time.perf_counter() - tx, memory_usage()))
    return AsymptoticEntropyEstimate(entropies, supports, method=method)


class DifferentialEntropyEstimate:
    """
    Attributes:
        i : int
        value, stderr : float
        k_neighbors, sample_size : int
        method : RatioMethods
        per_atom : list of float
            KL(nu_i || g^-1 nu_i) estimate for each atom.
        retries : int
            Jitter retries used against duplicate points.
    """

    def __init__(self, i, value, stderr, k_neighbors, sample_size, method, per_atom, retries=0):
        self.i = i
        self.value = value
        self.stderr = stderr
        self.k_neighbors = k_neighbors
        self.sample_size = sample_size
        self.method = method
        self.per_atom = per_atom
        self.retries = retries

    def to_dict(self):
        return {"i": self.i, "value": self.value, "stderr": self.stderr, "k_neighbors": self.k_neighbors,
                "sample_size": self.sample_size, "method": self.method.name,
                "per_atom": self.per_atom, "retries": self.retries}

    def __repr__(self):
        return "DifferentialEntropyEstimate(i=%d, E=%.6f +- %.6f, k=%d, N=%d, %s)" % (
            self.i, self.value, self.stderr, self.k_neighbors, self.sample_size, self.method.name)


def _fixes_cloud(nu, g_inv):
    img = nu.act_wedges(g_inv)
    dist = np.minimum(np.linalg.norm(img - nu.wedges, axis=1), np.linalg.norm(img + nu.wedges, axis=1))
    return bool(np.all(dist <= setting.TOL_FIXED_POINT))


def _log_ratios(nu, g_inv, k, method):
    """Per-point estimates of log (dnu / d(g^-1 nu)) at the cloud points."""
    q = nu.act(g_inv)
    w = nu.wedges
    rk = nu.knn_distances(w, k, exclude_self=True)
    if np.any(rk <= 0):
        return None
    if method == RatioMethods.Count:
        cp = nu.ball_counts(w, rk)
        cq = q.ball_counts(w, rk)
        return np.log((cp + 0.5) / (cq + 0.5))
    else:
        vk = q.knn_distances(w, k)
        m = nu.intrinsic_dim
        n = nu.size
        with np.errstate(divide='ignore'):
            return m * (np.log(np.maximum(vk, np.finfo(float).tiny)) - np.log(rk)) + np.log(n / (n - 1.0))


def differential_entropy(mu, i, nu, k_neighbors=None, method=RatioMethods.Distance, bootstrap=200,
                         seed=0, max_retries=3, iprint=0):
    """
    E_i = -sum_g mu(g) int log (d g^-1 nu / d nu) dnu estimated on the cloud nu.

    Atoms fixing every cloud point contribute exactly zero. Clouds with
    coincident points are jittered and retried.
    """
    if nu.size < 2:
        raise EmptyMeasureError("differential entropy needs at least two points")
    if nu.i != i:
        raise ValueError("cloud lives on Gr_%d, not Gr_%d" % (nu.i, i))
    tx = time.perf_counter()
    k = int(math.ceil(nu.size ** (1.0 / 3.0))) if k_neighbors is None else int(k_neighbors)
    if not 1 <= k < nu.size:
        raise ValueError("k_neighbors must lie in [1, %d), got %d" % (nu.size, k))
    inv_mats = reflected(mu).matrices()
    weights = mu.float_weights()
    rng = keyed_generator(seed, Streams.Bootstrap, 1)
    cloud, retries = nu, 0
    while True:
        per_point = np.zeros(cloud.size)
        per_atom = []
        ok = True
        for g_inv, wt in zip(inv_mats, weights):
            if _fixes_cloud(cloud, g_inv):
                per_atom.append(0.0)
                continue
            lr = _log_ratios(cloud, g_inv, k, method)
            if lr is None:
                ok = False
                break
            per_atom.append(float(lr.mean()))
            per_point += wt * lr
        if ok:
            break
        retries += 1
        if retries > max_retries:
            raise NumericError("coincident cloud points persist after %d jitter retries" % max_retries)
        cloud = nu.jittered(1E-9 * 10.0 ** retries, rng)
    value = float(per_point.mean())
    stderr = 0.0
    if bootstrap > 0 and np.ptp(per_point) > 0:
        boot = [per_point[rng.integers(0, cloud.size, cloud.size)].mean() for _ in range(bootstrap)]
        stderr = float(np.std(boot, ddof=1))
    est = DifferentialEntropyEstimate(i, value, stderr, k, nu.size, method, per_atom, retries)
    if iprint >= 1:
        print("%10s | i = %2d | N = %8d | k = %4d | E = %10.6f +- %8.6f | T = %8.3f | MEM = %7s" % (
            "diffent", i, nu.size, k, value, stderr, time.perf_counter() - tx, memory_usage()))
    return est


def translated_mass_decay(mu, i, nu, center, radius, n_max, paths, seed, n_grid=None, entropy=None):
    """
    Decay of the mass nu(x_check_n^{-1} A) of a ball A = B(center, radius).

    Rates are -(1/n) log nu(x_check_n^{-1} A); empirical zeros are censored
    at one point. Rates relative to nu(A) are reported alongside.

    Args:
        n_grid : list of int or None
            Extra walk lengths in [1, n_max]; n_max is always included.

    Returns:
        report : dict
    """
    if nu.size == 0:
        raise EmptyMeasureError("empirical measure has no points")
    if n_max < 1:
        raise PreconditionError("n_max must be positive, got %d" % n_max)
    mass0 = nu.ball_mass(center, radius)
    if mass0 <= 0:
        raise PreconditionError("ball A has zero empirical mass")
    extra = [] if n_grid is None else [int(n) for n in n_grid]
    bad = [n for n in extra if not 1 <= n <= n_max]
    if bad:
        raise PreconditionError("walk lengths %s lie outside [1, %d]" % (bad, n_max))
    n_grid = sorted(set(extra + [n_max]))
    col = {n: j for j, n in enumerate(n_grid)}
    mu_r = reflected(mu)
    mats = mu_r.matrices()
    d, N = mu.d, nu.size
    rates = np.zeros((paths, len(n_grid)))
    censored = np.zeros((paths, len(n_grid)), dtype=bool)
    for s in range(paths):
        idx = increment_indices(mu_r, n_max, s, seed, Streams.Backward)
        unit = np.identity(d)
        for m in range(1, n_max + 1):
            unit = unit @ mats[idx[m - 1]]
            unit /= np.linalg.norm(unit)
            if m in col:
                img = act_on_wedges(unit, nu.wedges, i)
                count = int(np.sum(wedge_distance(img, center.wedge) <= radius))
                censored[s, col[m]] = count == 0
                rates[s, col[m]] = -math.log(max(count, 1) / N) / m
    shift = np.log(mass0) / np.array(n_grid, dtype=float)
    relative = rates + shift[None, :]
    last = rates[:, -1]
    rep = {"check": "translated_mass_decay", "i": i, "radius": radius, "n_grid": n_grid, "paths": paths,
           "ball_mass": mass0, "rates": last.tolist(), "median": float(np.median(last)),
           "q90": float(np.quantile(last, 0.9)), "censored_fraction": float(censored[:, -1].mean()),
           "median_by_n": np.median(rates, axis=0).tolist(),
           "relative_rates": relative[:, -1].tolist(),
           "relative_median_by_n": np.median(relative, axis=0).tolist()}
    if entropy is not None:
        rep["entropy"] = entropy.value
        rep["passed"] = bool(rep["q90"] <= entropy.value + 3 * entropy.stderr + 1E-12)
    return rep


def entropy_chain_check(h, e, shannon):
    """0 <= E_i <= h + 3 sigma <= H(mu) + 3 sigma."""
    s3 = 3 * e.stderr
    ok = e.value >= -s3 and e.value <= h.h_estimate + s3 and h.h_estimate <= shannon + 1E-12
    return {"check": "entropy_chain", "E": e.value, "E_stderr": e.stderr, "h": h.h_estimate,
            "H_mu": shannon, "passed": bool(ok)}
