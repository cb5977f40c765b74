
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
Finite-sample proxies of measure dimensions on Grassmannians.

Radii below RESOLUTION_FACTOR * N^(-1/m), m = i(d - i), are discarded.
Pointwise dimensions are least-squares slopes of log m B(z, r) against
log r over the remaining window, with leave-one-out ball masses.
"""

import heapq
import math
import numpy as np
from .. import setting
from ..algebra.grassmann import chordal_radius
from ..errors import BoundUndefinedError


def resolution_floor(nu):
    return setting.RESOLUTION_FACTOR * nu.size ** (-1.0 / max(nu.intrinsic_dim, 1))


def reliable_radii(nu, radii):
    """Radii inside (floor, 1), sorted decreasing."""
    r = np.asarray(radii, dtype=float)
    r = r[(r > resolution_floor(nu)) & (r > 0) & (r < 1)]
    return np.sort(r)[::-1]


def _masked_slopes(x, y, mask):
    """Least-squares slopes of y against x per row, using entries where mask holds."""
    w = mask.astype(float)
    x = np.broadcast_to(x, y.shape)
    y = np.where(mask, y, 0.0)
    n = w.sum(axis=1)
    sx, sy = (w * x).sum(axis=1), (w * y).sum(axis=1)
    sxx, sxy = (w * x * x).sum(axis=1), (w * x * y).sum(axis=1)
    den = n * sxx - sx * sx
    with np.errstate(divide='ignore', invalid='ignore'):
        slope = np.where((n >= 2) & (den > 0), (n * sxy - sx * sy) / den, np.nan)
    return slope


class PointwiseCurves:
    """
    Attributes:
        radii : ndarray(R)
            Decreasing radii of the reliable window.
        masses : ndarray(N, R)
            Leave-one-out ball masses.
        ratios : ndarray(N, R)
            log mass / log r; NaN where the ball is empty (truncated curve).
        slopes : ndarray(N)
            Per-point least-squares dimension.
        lower_slopes : ndarray(N)
            Smaller of the slopes over the large-radius and small-radius
            halves of the window.
        truncated : int
            Number of points with at least one empty ball.
    """

    def __init__(self, radii, masses):
        self.radii = radii
        self.masses = masses
        pos = masses > 0
        with np.errstate(divide='ignore', invalid='ignore'):
            lm = np.where(pos, np.log(np.where(pos, masses, 1.0)), np.nan)
        lr = np.log(radii)
        self.ratios = lm / lr[None, :]
        self.slopes = _masked_slopes(lr[None, :], np.nan_to_num(lm), pos)
        self.lower_slopes = self._lower_slopes(lr, np.nan_to_num(lm), pos)
        self.truncated = int(np.sum(~np.all(pos, axis=1)))

    def _lower_slopes(self, lr, lm, pos):
        if len(lr) < 3:
            return self.slopes
        h = (len(lr) + 1) // 2
        parts = [_masked_slopes(lr[None, a], lm[:, a], pos[:, a]) for a in (slice(0, h + 1), slice(h - 1, None))]
        with np.errstate(invalid='ignore'):
            return np.fmin(parts[0], parts[1])

    @property
    def finite_slopes(self):
        return self.slopes[np.isfinite(self.slopes)]

    def median(self):
        s = self.finite_slopes
        return float(np.median(s)) if len(s) else float('nan')

    def csv_rows(self):
        for j in range(self.masses.shape[0]):
            for k, r in enumerate(self.radii):
                yield j, r, self.masses[j, k], self.ratios[j, k]


def pointwise_dims(nu, radii):
    """Ratio curves log m B(z, r) / log r for every sample point z."""
    radii = reliable_radii(nu, radii)
    n = nu.size
    if len(radii) == 0:
        return PointwiseCurves(radii, np.zeros((n, 0)))
    if n == 1:
        return PointwiseCurves(radii, np.ones((1, len(radii))))
    masses = np.zeros((n, len(radii)))
    for k, r in enumerate(radii):
        masses[:, k] = nu.ball_counts(nu.wedges, r, exclude_self=True) / (n - 1.0)
    return PointwiseCurves(radii, masses)


def mean_dimension_interval(nu, radii, q=0.05, curves=None):
    """[q, 1 - q] quantiles of the pointwise dimensions."""
    if not 0 < q < 0.5:
        raise ValueError("mass tail q must lie in (0, 0.5), got %r" % q)
    curves = pointwise_dims(nu, radii) if curves is None else curves
    s = curves.finite_slopes
    if len(s) == 0:
        return 0.0, 0.0
    lo, hi = np.quantile(s, [q, 1 - q])
    return float(max(lo, 0.0)), float(max(hi, 0.0))


def _greedy_cover(nu, r, need, candidates=None):
    """
    Lazy greedy: repeatedly take the sample point whose r-ball holds the most
    uncovered points among `candidates` (all points by default). Ties go to
    the lowest index.
    """
    n = nu.size
    target = np.ones(n, dtype=bool) if candidates is None else candidates.copy()
    if need <= 0:
        return 0
    if r >= 1:
        return 1
    t = float(chordal_radius(r))
    tree = nu.tree

    def members(j):
        idx = np.asarray(tree.query_ball_point(nu.wedges[j], t), dtype=np.int64) % n
        return np.unique(idx)

    if candidates is None:
        gains = nu.ball_counts(nu.wedges, r)
    else:
        gains = np.array([int(target[members(j)].sum()) for j in range(n)], dtype=np.int64)
    heap = [(-int(g), j) for j, g in enumerate(gains) if g > 0]
    heapq.heapify(heap)
    covered, count = 0, 0
    while covered < need and heap:
        neg, j = heapq.heappop(heap)
        m = members(j)
        gain = int(target[m].sum())
        if gain == 0:
            continue
        # stale entry: the stored gain is an upper bound
        if gain < -neg and heap and (-gain, j) > heap[0]:
            heapq.heappush(heap, (-gain, j))
            continue
        target[m] = False
        covered += gain
        count += 1
    return count


def covering_number(nu, r, eps):
    """Greedy upper bound on the number of r-balls covering mass >= 1 - eps."""
    if not 0 < eps < 1:
        raise ValueError("eps must lie in (0, 1), got %r" % eps)
    need = math.ceil((1.0 - eps) * nu.size - 1E-9)
    return _greedy_cover(nu, r, need)


def core_set(nu, eps, r):
    """Points left after removing the eps-fraction with the smallest r-ball mass."""
    counts = nu.ball_counts(nu.wedges, r)
    drop = int(math.floor(eps * nu.size + 1E-9))
    order = np.lexsort((np.arange(nu.size), counts))
    keep = np.ones(nu.size, dtype=bool)
    keep[order[:drop]] = False
    return keep


def _half_slopes(lr, lc):
    """Slopes of lc against lr over the whole window and its two halves."""
    if len(lr) < 2:
        return 0.0, 0.0, 0.0
    full = np.polyfit(lr, lc, 1)[0]
    h = (len(lr) + 1) // 2
    parts = [np.polyfit(lr[a], lc[a], 1)[0] for a in (slice(0, h + 1), slice(h - 1, None))
             if len(lr[a]) >= 2]
    return float(full), float(min(parts)), float(max(parts))


class CoveringSummary:
    """
    Attributes:
        radii, epsilons : ndarray
        ledrappier_counts, box_counts : ndarray(E, R)
        ledrappier_lower, ledrappier_upper : float
            sup over eps of the lower / upper half-window slopes of
            log N(r, eps) against log 1/r.
        box_lower, box_upper : float
            Same for full covers of the core sets A_eps.
    """

    def __init__(self, radii, epsilons, ledrappier_counts, box_counts):
        self.radii = radii
        self.epsilons = epsilons
        self.ledrappier_counts = ledrappier_counts
        self.box_counts = box_counts
        lr = -np.log(radii)
        led = [_half_slopes(lr, np.log(c)) for c in ledrappier_counts]
        box = [_half_slopes(lr, np.log(c)) for c in box_counts]
        self.ledrappier_lower = max(max(x[1], 0.0) for x in led) if led else 0.0
        self.ledrappier_upper = max(max(x[2], 0.0) for x in led) if led else 0.0
        self.box_lower = max(max(x[1], 0.0) for x in box) if box else 0.0
        self.box_upper = max(max(x[2], 0.0) for x in box) if box else 0.0

    def ratios(self):
        """log N / log(1/r) for every (eps, r)."""
        return np.log(self.ledrappier_counts) / (-np.log(self.radii))[None, :]


def ledrappier_box_summary(nu, radii, epsilons):
    radii = reliable_radii(nu, radii)
    epsilons = np.asarray(epsilons, dtype=float)
    if len(radii) == 0 or len(epsilons) == 0:
        raise ValueError("radius and epsilon grids must be non-empty")
    led = np.zeros((len(epsilons), len(radii)), dtype=np.int64)
    box = np.zeros_like(led)
    for ie, eps in enumerate(epsilons):
        keep = core_set(nu, eps, radii[0])
        for ir, r in enumerate(radii):
            led[ie, ir] = covering_number(nu, r, eps)
            box[ie, ir] = _greedy_cover(nu, r, int(keep.sum()), candidates=keep)
    return CoveringSummary(radii, epsilons, np.maximum(led, 1), np.maximum(box, 1))


def hausdorff_proxy(curves, q=0.05):
    """
    (1 - q)-quantile of the lower pointwise dimensions, the sample version of
    the essential supremum of the lower local dimension.
    """
    s = curves.lower_slopes[np.isfinite(curves.lower_slopes)]
    return float(max(np.quantile(s, 1 - q), 0.0)) if len(s) else 0.0


def dimension_bound(entropy, gap):
    """
    E_i / (lambda_i - lambda_{i+1}) with first-order error propagation.

    Args:
        entropy : DifferentialEntropyEstimate
        gap : (float, float)
            Gap and its standard error.
    """
    g, sg = gap
    if not g > 3 * sg or g <= 0:
        raise BoundUndefinedError("gap %.6g is not above 3 x stderr %.3g" % (g, sg))
    e, se = entropy.value, entropy.stderr
    value = e / g
    stderr = math.sqrt((se / g) ** 2 + (e * sg / g ** 2) ** 2)
    return value, stderr


class DimensionReport:
    """
    Attributes:
        radii : ndarray
        window : (float, float)
        sample_size : int
        curves : PointwiseCurves
        mean_dim_interval : (float, float)
        covering : CoveringSummary or None
        hausdorff : float
        bound : (float, float) or None
    """

    def __init__(self, nu, radii, epsilons=None, q=0.05, bound=None):
        self.curves = pointwise_dims(nu, radii)
        self.radii = self.curves.radii
        self.window = (float(self.radii[-1]), float(self.radii[0])) if len(self.radii) else (0.0, 0.0)
        self.sample_size = nu.size
        self.floor = resolution_floor(nu)
        self.mean_dim_interval = mean_dimension_interval(nu, radii, q, curves=self.curves)
        self.covering = ledrappier_box_summary(nu, radii, epsilons) if epsilons is not None else None
        self.hausdorff = hausdorff_proxy(self.curves, q)
        self.bound = bound

    def chain_ok(self, slack=0.1):
        """dim_H proxy <= Ledrappier <= box, each within slack."""
        if self.covering is None:
            return self.hausdorff <= self.mean_dim_interval[1] + slack
        c = self.covering
        return bool(self.hausdorff <= c.ledrappier_lower + slack and
                    c.ledrappier_lower <= c.box_lower + slack and c.ledrappier_upper <= c.box_upper + slack)

    def to_dict(self):
        rep = {"sample_size": self.sample_size, "window": list(self.window), "floor": self.floor,
               "radii": self.radii.tolist(), "median_pointwise": self.curves.median(),
               "truncated": self.curves.truncated, "mean_dim_interval": list(self.mean_dim_interval),
               "hausdorff_proxy": self.hausdorff}
        if self.covering is not None:
            c = self.covering
            rep.update({"epsilons": c.epsilons.tolist(), "ledrappier": [c.ledrappier_lower, c.ledrappier_upper],
                        "box": [c.box_lower, c.box_upper], "box_estimates": c.ratios().tolist()})
        if self.bound is not None:
            rep["bound"] = list(self.bound)
        return rep
