
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
Lyapunov spectrum of right random walks.

The singular values of x_n = h_1 ... h_n are those of its transpose
h_n^T ... h_1^T, a left product. Starting from Q = I, each step factors
h_m^T Q = Q' R with diag(R) > 0; the running sums of log diag(R) divided by
n converge to the exponents. Columns are orthonormalized by modified
Gram-Schmidt with one re-orthogonalization pass.

When every increment has |det| = 1 the last log-diagonal entry is taken as
minus the sum of the others, which keeps the bottom exponent exact even if
float rounding has made the increments numerically singular.
"""

import time
import numpy as np
from .. import setting
from ..algebra.linalg import exterior_power
from ..errors import NumericError, EmptyMeasureError, RankError
from .core import Streams, parallel_map, replica_stderr, memory_usage
from .sampler import increment_indices, keyed_generator, reflected, forward_product


def _qr_accumulate(mats_t, idx, unimodular):
    d = mats_t.shape[1]
    q = np.zeros((d, d))
    for j in range(d):
        q[j, j] = 1.0
    tmp = np.empty((d, d))
    acc = np.zeros(d)
    for m in range(idx.shape[0]):
        a = mats_t[idx[m]]
        for i in range(d):
            for j in range(d):
                s = 0.0
                for k in range(d):
                    s += a[i, k] * q[k, j]
                tmp[i, j] = s
        step = 0.0
        for j in range(d):
            last = unimodular and j == d - 1
            for _ in range(2):
                for l in range(j):
                    dot = 0.0
                    for i in range(d):
                        dot += tmp[i, l] * tmp[i, j]
                    for i in range(d):
                        tmp[i, j] -= dot * tmp[i, l]
            nrm = 0.0
            for i in range(d):
                nrm += tmp[i, j] * tmp[i, j]
            nrm = np.sqrt(nrm)
            if last:
                if not nrm > 1E-8:
                    # complete the frame from the coordinate axes
                    for c in range(d):
                        for i in range(d):
                            tmp[i, j] = 1.0 if i == c else 0.0
                        for _ in range(2):
                            for l in range(j):
                                dot = 0.0
                                for i in range(d):
                                    dot += tmp[i, l] * tmp[i, j]
                                for i in range(d):
                                    tmp[i, j] -= dot * tmp[i, l]
                        nrm = 0.0
                        for i in range(d):
                            nrm += tmp[i, j] * tmp[i, j]
                        nrm = np.sqrt(nrm)
                        if nrm > 0.5:
                            break
                acc[j] -= step
            else:
                if not nrm > 0.0 or not np.isfinite(nrm):
                    acc[0] = np.nan
                    return acc
                acc[j] += np.log(nrm)
                step += np.log(nrm)
            for i in range(d):
                tmp[i, j] /= nrm
        for i in range(d):
            for j in range(d):
                q[i, j] = tmp[i, j]
    return acc


try:
    import numba as nb

    qr_accumulate = nb.njit(nb.float64[:](nb.float64[:, :, ::1], nb.int64[::1], nb.boolean),
                            nogil=True)(_qr_accumulate)

except Exception:

    qr_accumulate = _qr_accumulate


class LyapunovSpectrum:
    """Non-increasing exponents lambda_1 >= ... >= lambda_d."""

    def __init__(self, lambdas):
        self.lambdas = np.asarray(lambdas, dtype=float)

    @property
    def d(self):
        return len(self.lambdas)

    @property
    def gaps(self):
        return self.lambdas[:-1] - self.lambdas[1:]

    def partial_sum(self, i):
        return float(np.sum(self.lambdas[:i]))

    def __getitem__(self, i):
        return self.lambdas[i]

    def __repr__(self):
        return "LyapunovSpectrum(%s)" % np.array2string(self.lambdas, precision=6)


class SpectrumEstimate:
    """
    Replica average of QR exponents.

    Attributes:
        spectrum : LyapunovSpectrum
        stderr : ndarray
        n, replicas : int
        replica_values : ndarray(replicas, d)
    """

    def __init__(self, replica_values, n):
        self.replica_values = np.asarray(replica_values, dtype=float)
        self.n = n
        self.replicas = self.replica_values.shape[0]
        self.spectrum = LyapunovSpectrum(self.replica_values.mean(axis=0))
        self.stderr = replica_stderr(self.replica_values)

    @property
    def lambdas(self):
        return self.spectrum.lambdas

    @property
    def gaps(self):
        return self.spectrum.gaps

    @property
    def gap_stderr(self):
        return replica_stderr(self.replica_values[:, :-1] - self.replica_values[:, 1:])

    def gap(self, i):
        """(lambda_i - lambda_{i+1}, stderr) with 1-based i."""
        return float(self.gaps[i - 1]), float(self.gap_stderr[i - 1])

    def zero_sum_ok(self):
        return abs(np.sum(self.lambdas)) <= 3 * np.sum(self.stderr) + 1E-12

    def is_simple(self):
        return bool(np.all(self.gaps > 3 * self.gap_stderr))

    def to_dict(self):
        return {"n": self.n, "replicas": self.replicas, "lambdas": self.lambdas.tolist(),
                "stderr": self.stderr.tolist(), "gaps": self.gaps.tolist(),
                "gap_stderr": self.gap_stderr.tolist()}

    def __repr__(self):
        return "SpectrumEstimate(lambdas=%s, stderr=%s, n=%d, replicas=%d)" % (
            np.array2string(self.lambdas, precision=6), np.array2string(self.stderr, precision=2),
            self.n, self.replicas)


def _is_unimodular(mats):
    return bool(np.all(np.abs(np.abs(np.linalg.det(mats)) - 1) <= setting.TOL_DET))


def walk_exponents(mats, idx):
    """Exponents of one path with increments mats[idx], sorted descending."""
    mats_t = np.ascontiguousarray(np.swapaxes(mats, 1, 2))
    unimodular = setting.UNIMODULAR_QR and _is_unimodular(mats)
    acc = qr_accumulate(mats_t, np.ascontiguousarray(idx, dtype=np.int64), unimodular)
    if not np.all(np.isfinite(acc)):
        raise NumericError("non-positive R diagonal in QR recursion")
    return np.sort(acc / len(idx))[::-1]


def _estimate(mu, mats, n, replicas, seed, stream, threads, iprint, name):
    if n < 1 or replicas < 1:
        raise ValueError("need n >= 1 and replicas >= 1 (got n = %d, replicas = %d)" % (n, replicas))
    tx = time.perf_counter()

    def run(r):
        return walk_exponents(mats, increment_indices(mu, n, r, seed, stream))

    values = parallel_map(run, range(replicas), threads=threads)
    est = SpectrumEstimate(values, n)
    if iprint >= 1:
        print("%10s | n = %8d | replicas = %4d | lambda = %s | T = %8.3f | MEM = %7s" % (
            name, n, replicas, np.array2string(est.lambdas, precision=6),
            time.perf_counter() - tx, memory_usage()))
    return est


def estimate_spectrum_qr(mu, n, replicas, seed, threads=None, iprint=0):
    """Lyapunov spectrum of the mu-walk from `replicas` independent paths of n steps."""
    return _estimate(mu, mu.matrices(), n, replicas, seed, Streams.Forward, threads, iprint, "spectrum")


def estimate_reflected_spectrum_qr(mu, n, replicas, seed, threads=None, iprint=0):
    mu_r = reflected(mu)
    return _estimate(mu_r, mu_r.matrices(), n, replicas, seed, Streams.Backward, threads, iprint, "reflected")


def direct_top_exponent(mu, n, sample_index, seed):
    """(1/n) log of the top singular value of the running product of one path."""
    return forward_product(mu, n, sample_index, seed).product.log_norm() / n


def check_reflection_identity(mu, n, replicas, seed, threads=None, iprint=0):
    est = estimate_spectrum_qr(mu, n, replicas, seed, threads=threads, iprint=iprint)
    est_r = estimate_reflected_spectrum_qr(mu, n, replicas, seed, threads=threads, iprint=iprint)
    dev = np.abs(est_r.lambdas + est.lambdas[::-1])
    sig = est_r.stderr + est.stderr[::-1]
    return {"check": "reflection_identity", "max_deviation": float(dev.max()),
            "combined_stderr": float(sig.max()), "passed": bool(np.all(dev <= 3 * sig + 1E-10)),
            "lambda": est.lambdas.tolist(), "lambda_reflected": est_r.lambdas.tolist()}


def furstenberg_partial_sum(mu, i, nu, mc_samples=None, seed=0):
    """
    Monte Carlo value of sum_g mu(g) int log |wedge^i g w| dnu(w) over unit wedges.

    Returns:
        value : float
        stderr : float
    """
    if nu.size == 0:
        raise EmptyMeasureError("empirical measure has no points")
    d = mu.d
    if i == d:
        return 0.0, 0.0
    if not 1 <= i < d or nu.i != i:
        raise RankError("rank %d does not match measure on Gr_%d(R^%d)" % (i, nu.i, d))
    w = nu.wedges
    if mc_samples is not None and mc_samples < len(w):
        pick = keyed_generator(seed, Streams.Bootstrap, 0).choice(len(w), size=mc_samples, replace=False)
        w = w[np.sort(pick)]
    per_point = np.zeros(len(w))
    for g, wt in zip(mu.matrices(), mu.float_weights()):
        per_point += wt * np.log(np.linalg.norm(w @ exterior_power(g, i).T, axis=1))
    stderr = per_point.std(ddof=1) / np.sqrt(len(w)) if len(w) > 1 else 0.0
    return float(per_point.mean()), float(stderr)


def exterior_spectrum_check(mu, i, n, replicas, seed, threads=None, iprint=0):
    """Compare the top two exponents of the wedge^i walk with sums of base exponents."""
    d = mu.d
    if not 1 <= i <= d - 1:
        raise RankError("rank %d out of range [1, %d]" % (i, d - 1))
    base = estimate_spectrum_qr(mu, n, replicas, seed, threads=threads, iprint=iprint)
    wedge_mats = np.array([exterior_power(g, i) for g in mu.matrices()])
    ext = _estimate(mu, wedge_mats, n, replicas, seed, Streams.Forward, threads, iprint, "exterior")
    lam = base.replica_values
    top_pred = lam[:, :i].sum(axis=1)
    second_pred = lam[:, :i - 1].sum(axis=1) + lam[:, i]
    dtop = ext.replica_values[:, 0] - top_pred
    dsecond = ext.replica_values[:, 1] - second_pred
    sig_top = max(float(replica_stderr(dtop)), ext.stderr[0] + float(replica_stderr(top_pred)))
    sig_second = max(float(replica_stderr(dsecond)), ext.stderr[1] + float(replica_stderr(second_pred)))
    passed = abs(dtop.mean()) <= 3 * sig_top + 1E-10 and abs(dsecond.mean()) <= 3 * sig_second + 1E-10
    gap, gap_err = base.gap(i)
    return {"check": "exterior_spectrum", "i": i, "top": float(ext.lambdas[0]), "top_predicted": float(top_pred.mean()),
            "second": float(ext.lambdas[1]), "second_predicted": float(second_pred.mean()),
            "top_stderr": sig_top, "second_stderr": sig_second,
            "gap": gap, "gap_stderr": gap_err, "passed": bool(passed)}


def oseledets_convergence(mu, n, replicas, seed, threads=None, iprint=0):
    """Estimates at n and 2n should agree within three combined standard errors."""
    e1 = estimate_spectrum_qr(mu, n, replicas, seed, threads=threads, iprint=iprint)
    e2 = estimate_spectrum_qr(mu, 2 * n, replicas, seed, threads=threads, iprint=iprint)
    dev = np.abs(e1.lambdas - e2.lambdas)
    sig = e1.stderr + e2.stderr
    return {"check": "oseledets_convergence", "n": n, "max_deviation": float(dev.max()),
            "passed": bool(np.all(dev <= 3 * sig + 1E-10))}
