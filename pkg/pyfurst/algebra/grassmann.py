
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
Grassmannians embedded in projective spaces of exterior powers, and flags.

A rank-i subspace is kept both as an orthonormal frame (used for actions)
and as the unit wedge of its columns (used for distances). The distance is
rho(xi, zeta) = sin of the angle between the two wedge lines.
"""

import numpy as np
from .. import setting
from ..errors import RankError, DegenerateActionError
from .linalg import wedge_coordinates, exterior_power


def orthonormalize(frames):
    """
    Orthonormal frames spanning the same subspaces as a stack (..., d, i).
    Returns the frames and the ratio of the smallest to the largest |R_jj|.
    """
    q, r = np.linalg.qr(frames)
    diag = np.abs(np.diagonal(r, axis1=-2, axis2=-1))
    ratio = diag.min(axis=-1) / np.maximum(diag.max(axis=-1), np.finfo(float).tiny)
    return q, ratio


def normalize_rows(w):
    nrm = np.linalg.norm(w, axis=-1, keepdims=True)
    return w / nrm


def wedge_distance(w1, w2):
    """rho between unit wedge vectors, broadcasting over leading axes."""
    c = np.abs(np.sum(w1 * w2, axis=-1))
    return np.sqrt(np.clip(1.0 - c * c, 0.0, 1.0))


def chordal_radius(r):
    """Euclidean radius in the doubled wedge cloud {+w, -w} matching rho-radius r < 1."""
    r = np.asarray(r, dtype=float)
    return np.sqrt(np.clip(2.0 - 2.0 * np.sqrt(np.clip(1.0 - r * r, 0.0, 1.0)), 0.0, 4.0))


def chordal_to_rho(t):
    t = np.asarray(t, dtype=float)
    c = np.clip(1.0 - 0.5 * t * t, -1.0, 1.0)
    return np.sqrt(np.clip(1.0 - c * c, 0.0, 1.0))


class GrassmannPoint:
    """
    Point of Gr_i(R^d).

    Attributes:
        frame : ndarray(d, i)
            Orthonormal column frame.
        wedge : ndarray(C(d, i))
            Unit exterior product of the frame columns.
    """

    def __init__(self, frame, wedge=None, orthonormal=False):
        frame = np.asarray(frame, dtype=float)
        if frame.ndim == 1:
            frame = frame[:, None]
        d, i = frame.shape
        if not 1 <= i <= d:
            raise RankError("rank %d out of range for d = %d" % (i, d))
        if not orthonormal:
            frame, ratio = orthonormalize(frame)
            if ratio < setting.TOL_RANK:
                raise DegenerateActionError("frame is numerically rank deficient")
        self.frame = frame
        if wedge is None:
            wedge = wedge_coordinates(frame)
            wedge = wedge / np.linalg.norm(wedge)
        self.wedge = wedge

    @property
    def d(self):
        return self.frame.shape[0]

    @property
    def i(self):
        return self.frame.shape[1]

    @staticmethod
    def span(*vectors):
        return GrassmannPoint(np.array(vectors, dtype=float).T)

    @staticmethod
    def coordinate(d, idx):
        """Span of the coordinate vectors e_j, j in idx (0-based)."""
        frame = np.identity(d)[:, list(idx)]
        return GrassmannPoint(frame, orthonormal=True)

    @staticmethod
    def random(d, i, rng):
        return GrassmannPoint(rng.standard_normal((d, i)))

    def __repr__(self):
        return "GrassmannPoint(d=%d, i=%d, wedge=%s)" % (
            self.d, self.i, np.array2string(self.wedge, precision=5))


class Flag:
    """Full flag; subspace i is the span of the first i frame columns."""

    def __init__(self, frame):
        self.frame = np.asarray(frame, dtype=float)

    @property
    def d(self):
        return self.frame.shape[0]

    @staticmethod
    def standard(d):
        return Flag(np.identity(d))

    def is_orthonormal(self, tol=None):
        tol = setting.TOL_ORTHO if tol is None else tol
        return np.abs(self.frame.T @ self.frame - np.identity(self.d)).max() <= tol

    def __repr__(self):
        return "Flag(d=%d)" % self.d


def _check_rank(d, i):
    if not 1 <= i <= d - 1:
        raise RankError("rank %d out of range [1, %d]" % (i, d - 1))


def grassmann_distance(xi, zeta):
    if xi.i != zeta.i or xi.d != zeta.d:
        raise RankError("rank mismatch: Gr_%d(R^%d) vs Gr_%d(R^%d)" % (xi.i, xi.d, zeta.i, zeta.d))
    return float(wedge_distance(xi.wedge, zeta.wedge))


def act_on_grassmann(g, xi):
    frame, ratio = orthonormalize(np.asarray(g, dtype=float) @ xi.frame)
    if ratio < setting.TOL_RANK:
        raise DegenerateActionError("image of rank-%d subspace is numerically rank deficient" % xi.i)
    return GrassmannPoint(frame, orthonormal=True)


def orthogonal_complement(xi):
    q, _ = np.linalg.qr(xi.frame, mode='complete')
    return GrassmannPoint(q[:, xi.i:], orthonormal=True)


def flag_project(flag, i):
    _check_rank(flag.d, i)
    return GrassmannPoint(flag.frame[:, :i], orthonormal=True)


def act_on_wedges(g, wedges, i):
    """Batch projective action of g on unit wedge vectors (N, C(d, i))."""
    eg = exterior_power(g, i)
    img = wedges @ eg.T
    nrm = np.linalg.norm(img, axis=-1)
    if np.any(nrm <= setting.TOL_RANK * np.linalg.norm(eg, ord=2)):
        raise DegenerateActionError("wedge image vanished")
    return img / nrm[:, None]


def act_on_frames(g, frames):
    """Batch action of g on frames (N, d, i); returns orthonormal frames."""
    out, ratio = orthonormalize(np.asarray(g, dtype=float) @ frames)
    if np.any(ratio < setting.TOL_RANK):
        raise DegenerateActionError("image of some frame is numerically rank deficient")
    return out


def random_orthogonal(d, rng):
    """Haar-distributed element of SO(d)."""
    q, r = np.linalg.qr(rng.standard_normal((d, d)))
    q = q * np.sign(np.diagonal(r))[None, :]
    if np.linalg.det(q) < 0:
        q[:, -1] = -q[:, -1]
    return q
