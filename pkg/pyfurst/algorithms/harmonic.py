
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
Limit flags of random walks and empirical harmonic measures on Grassmannians.

The limit flag of a path is read from the left singular frame of x_n.
Metric queries on a cloud of unit wedges use a k-d tree over the doubled
cloud {+w, -w}: for rho-radius r < 1 the Euclidean radius is
sqrt(2 - 2 sqrt(1 - r^2)) and at most one of +w, -w can fall inside it.
"""

import time
import warnings
import numpy as np
from scipy.spatial import cKDTree
from scipy.optimize import brentq
from .. import setting
from ..algebra.linalg import exterior_power, wedge_coordinates
from ..algebra.grassmann import GrassmannPoint, Flag, act_on_frames, act_on_wedges, \
    wedge_distance, chordal_radius, chordal_to_rho, orthonormalize, flag_project, \
    orthogonal_complement
from ..errors import EmptyMeasureError, RankError, BallSamplingError
from .core import Streams, parallel_map, memory_usage
from .sampler import increment_indices, keyed_generator, reflected


class EmpiricalMeasure:
    """
    Uniform empirical measure on Gr_i(R^d).

    Attributes:
        frames : ndarray(N, d, i)
        wedges : ndarray(N, C(d, i))
        meta : dict
            Provenance (d, i, n, seed, measure hash, ...).
    """

    def __init__(self, frames, wedges=None, meta=None):
        frames = np.asarray(frames, dtype=float)
        if frames.ndim != 3 or frames.shape[0] == 0:
            raise EmptyMeasureError("empirical measure needs a non-empty stack of frames")
        self.frames = frames
        if wedges is None:
            wedges = wedge_coordinates(frames)
            wedges = wedges / np.linalg.norm(wedges, axis=1)[:, None]
        self.wedges = wedges
        self.meta = dict(meta or {})
        self._tree = None

    @staticmethod
    def from_points(points, meta=None):
        return EmpiricalMeasure(np.array([p.frame for p in points]),
                                np.array([p.wedge for p in points]), meta=meta)

    @property
    def size(self):
        return self.frames.shape[0]

    def __len__(self):
        return self.size

    @property
    def d(self):
        return self.frames.shape[1]

    @property
    def i(self):
        return self.frames.shape[2]

    @property
    def intrinsic_dim(self):
        return self.i * (self.d - self.i)

    def point(self, j):
        return GrassmannPoint(self.frames[j], self.wedges[j], orthonormal=True)

    @property
    def points(self):
        return [self.point(j) for j in range(self.size)]

    @property
    def tree(self):
        if self._tree is None:
            self._tree = cKDTree(np.vstack([self.wedges, -self.wedges]))
        return self._tree

    def _centers(self, z):
        if isinstance(z, GrassmannPoint):
            return z.wedge[None, :]
        z = np.asarray(z, dtype=float)
        return z[None, :] if z.ndim == 1 else z

    def ball_counts(self, centers, radii, exclude_self=False):
        """
        Numbers of cloud points in closed rho-balls.

        Args:
            centers : GrassmannPoint or ndarray(M, C)
            radii : float or ndarray(M)
            exclude_self : bool
                Subtract one from each count (centers are cloud points).
        """
        c = self._centers(centers)
        radii = np.broadcast_to(np.asarray(radii, dtype=float), (len(c), ))
        out = np.full(len(c), self.size, dtype=np.int64)
        inner = radii < 1.0
        if np.any(inner):
            out[inner] = self.tree.query_ball_point(
                c[inner], chordal_radius(radii[inner]), return_length=True)
        if exclude_self:
            out = out - 1
        return out

    def ball_mass(self, z, r):
        return float(self.ball_counts(z, r)[0]) / self.size

    def knn_distances(self, centers, k, exclude_self=False):
        """rho-distance to the k-th nearest cloud point (self excluded on request)."""
        c = self._centers(centers)
        kk = k + int(exclude_self)
        if kk > self.size:
            raise ValueError("k = %d exceeds cloud size %d" % (kk, self.size))
        t, _ = self.tree.query(c, k=kk)
        t = np.asarray(t).reshape(len(c), -1)[:, -1]
        return chordal_to_rho(t)

    def nearest_distances(self, centers):
        return self.knn_distances(centers, 1)

    def mean_nn_distance(self, other):
        """Mean rho-distance from points of other to their nearest point in self."""
        return float(np.mean(self.nearest_distances(other.wedges)))

    def rounded_atom_max_mass(self, decimals=6):
        """Largest mass carried by one point after rounding wedges (sign fixed)."""
        w = self.wedges.copy()
        lead = np.argmax(np.abs(w) > 1E-9, axis=1)
        sgn = np.sign(w[np.arange(len(w)), lead])
        w = np.round(w * sgn[:, None], decimals) + 0.0
        _, counts = np.unique(w, axis=0, return_counts=True)
        return float(counts.max()) / self.size

    def act(self, g):
        """Push-forward by g."""
        frames = act_on_frames(g, self.frames)
        return EmpiricalMeasure(frames, meta=self.meta)

    def act_wedges(self, g):
        return act_on_wedges(g, self.wedges, self.i)

    def subset(self, idx):
        return EmpiricalMeasure(self.frames[idx], self.wedges[idx], meta=self.meta)

    def jittered(self, scale, rng):
        frames, _ = orthonormalize(self.frames + scale * rng.standard_normal(self.frames.shape))
        return EmpiricalMeasure(frames, meta=self.meta)

    def __repr__(self):
        return "EmpiricalMeasure(Gr_%d(R^%d), N=%d)" % (self.i, self.d, self.size)


class FlagSample:
    """
    Limit flag of one path.

    Attributes:
        flag : Flag
        n : int
        convergence_gap : float
            max_i rho(pi_i flag at n // 2, pi_i flag at n).
        degenerate : bool
            Some relative singular value gap fell below the tolerance.
    """

    def __init__(self, flag, n, convergence_gap, degenerate=False, log_singular_values=None):
        self.flag = flag
        self.n = n
        self.convergence_gap = convergence_gap
        self.degenerate = degenerate
        self.log_singular_values = log_singular_values

    def __repr__(self):
        return "FlagSample(n=%d, gap=%.3E%s)" % (self.n, self.convergence_gap,
                                                 ", degenerate" if self.degenerate else "")


def _svd_frames(units):
    u, s, _ = np.linalg.svd(units)
    neg = np.linalg.det(u) < 0
    u[neg, :, -1] = -u[neg, :, -1]
    return u, s


def _flag_gaps(ua, ub):
    d = ua.shape[-1]
    gaps = np.zeros(len(ua))
    for i in range(1, d):
        wa = wedge_coordinates(ua[:, :, :i])
        wb = wedge_coordinates(ub[:, :, :i])
        gaps = np.maximum(gaps, wedge_distance(wa, wb))
    return gaps


class FlagBank:
    """
    Limit flags of paths 0 .. N-1 of one walk.

    Attributes:
        frames : ndarray(N, d, d)
        gaps : ndarray(N)
        degenerate : ndarray(N) of bool
        log_singular_values : ndarray(N, d)
        meta : dict
    """

    def __init__(self, frames, gaps, degenerate, log_singular_values, meta):
        self.frames = frames
        self.gaps = gaps
        self.degenerate = degenerate
        self.log_singular_values = log_singular_values
        self.meta = meta

    @property
    def size(self):
        return len(self.frames)

    def sample(self, j):
        return FlagSample(Flag(self.frames[j]), self.meta["n"], float(self.gaps[j]),
                          bool(self.degenerate[j]), self.log_singular_values[j])

    def project(self, i):
        d = self.frames.shape[1]
        if not 1 <= i <= d - 1:
            raise RankError("rank %d out of range [1, %d]" % (i, d - 1))
        meta = dict(self.meta)
        meta["i"] = i
        return EmpiricalMeasure(np.ascontiguousarray(self.frames[:, :, :i]), meta=meta)


def _limit_flags(mu, n, samples, seed, stream):
    """Flags, convergence gaps and degeneracy for a batch of sample indices."""
    if n < 2:
        raise ValueError("limit flags need n >= 2, got %d" % n)
    d = mu.d
    idx = np.array([increment_indices(mu, n, s, seed, stream) for s in samples]).reshape(len(samples), n)
    mats = mu.matrices()
    units = np.broadcast_to(np.identity(d) / np.sqrt(d), (len(samples), d, d)).copy()
    log_scales = np.zeros(len(samples))
    half = None
    for m in range(n):
        units = units @ mats[idx[:, m]]
        nrm = np.linalg.norm(units, axis=(1, 2))
        units /= nrm[:, None, None]
        log_scales += np.log(nrm)
        if m + 1 == n // 2:
            half = units.copy()
    u, s = _svd_frames(units)
    uh, _ = _svd_frames(half)
    rel = (s[:, :-1] - s[:, 1:]) / s[:, :-1]
    degenerate = np.any(rel < setting.TOL_SINGULAR_GAP, axis=1)
    with np.errstate(divide='ignore'):
        logs = log_scales[:, None] + np.log(s)
    return u, _flag_gaps(uh, u), degenerate, logs


def _warn_degenerate(count, total):
    if count > 0:
        warnings.warn("%d of %d limit flags have near-equal singular values" % (count, total))


def sample_limit_flag(mu, n, sample_index, seed, stream=Streams.Forward):
    frames, gaps, degenerate, logs = _limit_flags(mu, n, [sample_index], seed, stream)
    _warn_degenerate(int(degenerate.sum()), 1)
    return FlagSample(Flag(frames[0]), n, float(gaps[0]), bool(degenerate[0]), logs[0])


def sample_limit_flags(mu, n, N, seed, stream=Streams.Forward, chunk=2048, threads=None, iprint=0):
    """FlagBank of paths 0 .. N-1."""
    if N < 1:
        raise ValueError("need at least one sample, got %d" % N)
    tx = time.perf_counter()
    starts = list(range(0, N, chunk))
    parts = parallel_map(lambda s: _limit_flags(mu, n, list(range(s, min(s + chunk, N))), seed, stream),
                         starts, threads=threads)
    frames, gaps, degenerate, logs = [np.concatenate(x) for x in zip(*parts)]
    _warn_degenerate(int(degenerate.sum()), N)
    meta = {"d": mu.d, "n": n, "seed": int(seed), "stream": int(stream), "count": N,
            "measure_hash": mu.support_hash(), "degenerate": int(degenerate.sum()),
            "median_convergence_gap": float(np.median(gaps))}
    if iprint >= 1:
        print("%10s | n = %8d | N = %8d | median gap = %9.3E | T = %8.3f | MEM = %7s" % (
            "flags", n, N, meta["median_convergence_gap"], time.perf_counter() - tx, memory_usage()))
    return FlagBank(frames, gaps, degenerate, logs, meta)


def sample_harmonic_measure(mu, i, n, N, seed, threads=None, iprint=0):
    """Empirical nu_i from N independent limit flags."""
    return sample_limit_flags(mu, n, N, seed, threads=threads, iprint=iprint).project(i)


def default_test_functions(d, i, anchors, seed):
    """Functions xi -> rho(xi, zeta_r) for random anchors zeta_r."""
    rng = keyed_generator(seed, Streams.Anchors, 0)
    zetas = [GrassmannPoint.random(d, i, rng) for _ in range(anchors)]
    return [(lambda w, z=z: wedge_distance(w, z.wedge)) for z in zetas]


def stationarity_check(mu, nu, test_fns=None, tol=None, anchors=16, seed=0, bootstrap=200):
    """
    Compare int f dnu with sum_g mu(g) int f(g .) dnu for 1-Lipschitz f.

    Returns:
        report : dict
            ``discrepancy`` (max over f), ``stderr`` (bootstrap, at the
            maximizing f), ``tol`` and ``passed``.
    """
    if nu.size == 0:
        raise EmptyMeasureError("empirical measure has no points")
    tol = 4.0 / np.sqrt(nu.size) if tol is None else tol
    if test_fns is None:
        test_fns = default_test_functions(nu.d, nu.i, anchors, seed)
    images = [(w, nu.act_wedges(g)) for g, w in zip(mu.matrices(), mu.float_weights())]
    diffs = []
    for f in test_fns:
        lhs = f(nu.wedges)
        rhs = sum(w * f(img) for w, img in images)
        diffs.append(lhs - rhs)
    diffs = np.array(diffs)
    disc = np.abs(diffs.mean(axis=1))
    k = int(np.argmax(disc))
    stderr = 0.0
    if nu.size > 1 and bootstrap > 0:
        rng = keyed_generator(seed, Streams.Bootstrap, 0)
        boot = np.array([diffs[k, rng.integers(0, nu.size, nu.size)].mean() for _ in range(bootstrap)])
        stderr = float(boot.std(ddof=1))
    return {"check": "stationarity", "discrepancy": float(disc[k]), "stderr": stderr, "tol": float(tol),
            "test_functions": len(test_fns), "passed": bool(disc[k] <= tol + stderr)}


def backward_limit_xi(mu, i, n, sample_index, seed):
    """xi_x: orthogonal complement of the rank d-i part of the backward limit flag."""
    d = mu.d
    if not 1 <= i <= d - 1:
        raise RankError("rank %d out of range [1, %d]" % (i, d - 1))
    fs = sample_limit_flag(reflected(mu), n, sample_index, seed, stream=Streams.Backward)
    return orthogonal_complement(flag_project(fs.flag, d - i))


def ball_sphere_points(center, r, count, rng, max_rejections=None):
    """
    Points at rho-distance r from center, from Gaussian perturbations of its
    frame rescaled along the perturbation to hit the sphere.
    """
    if not 0 < r < 1:
        raise ValueError("ball radius must lie in (0, 1), got %r" % r)
    max_rejections = setting.MAX_BALL_REJECTIONS if max_rejections is None else max_rejections
    f = center.frame
    d, i = f.shape
    proj = np.identity(d) - f @ f.T
    out, rejected = [], 0
    while len(out) < count:
        t_dir = proj @ rng.standard_normal((d, i))
        sig = np.linalg.svd(t_dir, compute_uv=False)
        if sig[0] < 1E-12:
            rejected += 1
            if rejected > max_rejections:
                raise BallSamplingError("ball sampling failed after %d rejections" % rejected)
            continue

        def excess(t):
            return np.sqrt(max(0.0, 1.0 - np.prod(1.0 / (1.0 + (t * sig) ** 2)))) - r

        hi = 1.0
        while excess(hi) < 0 and hi < 1E12:
            hi *= 4.0
        if excess(hi) < 0:
            rejected += 1
            if rejected > max_rejections:
                raise BallSamplingError("ball sampling failed after %d rejections" % rejected)
            continue
        t = brentq(excess, 0.0, hi, xtol=1E-14)
        out.append(GrassmannPoint(f + t * t_dir))
    return out


def _pair_states(w):
    """Orthonormal 2-frames and triangular ratios (a, sign, log b) for all pairs of rows of w."""
    p, q = np.triu_indices(len(w), k=1)
    pq = np.stack([w[p], w[q]], axis=2)
    qf, r = np.linalg.qr(pq)
    a = r[:, 0, 1] / r[:, 0, 0]
    tau = r[:, 1, 1] / r[:, 0, 0]
    with np.errstate(divide='ignore'):
        logb = np.log(np.abs(tau))
    return qf, a, np.sign(tau), logb


def _pair_log_rho(a, logb):
    with np.errstate(divide='ignore'):
        loga = np.log(np.abs(a))
    return logb - 0.5 * np.logaddexp(2 * loga, 2 * logb)


def contraction_rate(mu, i, r, n, boundary_samples=8, sample_index=0, seed=0, flag_steps=64):
    """
    -(1/n) log diam of x_check_n^{-1} B(xi_x, r) for one backward path.

    Pairwise distances are carried as logs through the whole product, so
    contraction far below double precision is resolved. The center xi_x is
    the limit flag of the first min(n, flag_steps) steps of the same backward
    path.
    """
    if not 0 < r < 1:
        raise ValueError("ball radius must lie in (0, 1), got %r" % r)
    d = mu.d
    if not 1 <= i <= d - 1:
        raise RankError("rank %d out of range [1, %d]" % (i, d - 1))
    xi = backward_limit_xi(mu, i, max(2, min(n, flag_steps)), sample_index, seed)
    rng = keyed_generator(seed, Streams.Ball, sample_index)
    pts = [xi] + ball_sphere_points(xi, r, boundary_samples, rng)
    w = np.array([p.wedge for p in pts])
    idx = increment_indices(reflected(mu), n, sample_index, seed, Streams.Backward)
    # inverse of the k-th atom of the reflected measure is the k-th atom of mu
    inv_mats = np.array([exterior_power(g, i) for g in mu.matrices()])
    qf, a, sgn, logb = _pair_states(w)
    for m in range(n):
        aq = inv_mats[idx[m]] @ qf
        qf, rr = np.linalg.qr(aq)
        r11, r12, r22 = rr[:, 0, 0], rr[:, 0, 1], rr[:, 1, 1]
        a = a + (r12 / r11) * sgn * np.exp(logb)
        sgn = sgn * np.sign(r22 / r11)
        logb = logb + np.log(np.abs(r22)) - np.log(np.abs(r11))
    return float(-np.max(_pair_log_rho(a, logb)) / n)


def contraction_rates(mu, i, r, n, boundary_samples=8, paths=100, seed=0, threads=None, iprint=0, flag_steps=64):
    """Distribution of contraction rates over backward paths 0 .. paths-1."""
    tx = time.perf_counter()
    rates = np.array(parallel_map(
        lambda s: contraction_rate(mu, i, r, n, boundary_samples, s, seed, flag_steps=flag_steps), range(paths),
        threads=threads))
    rep = {"i": i, "r": r, "n": n, "paths": paths, "boundary_samples": boundary_samples,
           "flag_steps": min(n, flag_steps),
           "rates": rates.tolist(), "q05": float(np.quantile(rates, 0.05)),
           "median": float(np.median(rates)), "q95": float(np.quantile(rates, 0.95))}
    if iprint >= 1:
        print("%10s | n = %8d | paths = %6d | q05 = %10.6f | T = %8.3f | MEM = %7s" % (
            "contract", n, paths, rep["q05"], time.perf_counter() - tx, memory_usage()))
    return rep


def ball_positivity_check(mu, nu, r, n, paths, seed, min_fraction=0.95):
    """Fraction of backward paths whose ball B(xi_x, r) has positive empirical mass."""
    pos = [nu.ball_mass(backward_limit_xi(mu, nu.i, n, s, seed), r) > 0 for s in range(paths)]
    frac = float(np.mean(pos))
    return {"check": "ball_positivity", "r": r, "fraction": frac, "passed": frac >= min_fraction}


def circle_measure(N, d=3):
    """Equispaced points of the projective line span{e1, e2} inside Gr_1(R^d)."""
    theta = np.pi * np.arange(N) / N
    frames = np.zeros((N, d, 1))
    frames[:, 0, 0] = np.cos(theta)
    frames[:, 1, 0] = np.sin(theta)
    return EmpiricalMeasure(frames, meta={"benchmark": "circle", "dimension": 1.0})


def cantor_points(level):
    digits = (np.arange(2 ** level)[:, None] >> np.arange(level)[::-1][None, :]) & 1
    return (2 * digits * 3.0 ** -np.arange(1, level + 1)[None, :]).sum(axis=1)


def cantor_measure(level=13, scale=0.5):
    """Middle-thirds Cantor measure at the given level, as angles scale * x on Gr_1(R^2)."""
    theta = scale * cantor_points(level)
    frames = np.stack([np.cos(theta), np.sin(theta)], axis=1)[:, :, None]
    return EmpiricalMeasure(frames, meta={"benchmark": "cantor", "dimension": np.log(2) / np.log(3)})


def atom_measure(N, point):
    frames = np.repeat(point.frame[None, :, :], N, axis=0)
    return EmpiricalMeasure(frames, meta={"benchmark": "atom", "dimension": 0.0})


def mixture_measure(a, b):
    """Equal-weight mixture of two empirical measures of the same size."""
    assert a.size == b.size and a.d == b.d and a.i == b.i
    return EmpiricalMeasure(np.concatenate([a.frames, b.frames]),
                            np.concatenate([a.wedges, b.wedges]), meta={"benchmark": "mixture"})
