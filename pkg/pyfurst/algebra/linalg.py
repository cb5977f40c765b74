
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
Linear algebra functions at module level.
Cartan (polar) decomposition, exterior powers and overflow-safe products.
"""

import numpy as np
from functools import lru_cache
from itertools import combinations
from .. import setting
from ..errors import DecompositionError, RankError, InstabilityError


@lru_cache(maxsize=None)
def wedge_basis(d, i):
    """Lexicographic multi-indices (j1 < ... < ji) of the basis of wedge^i R^d."""
    if not 1 <= i <= d:
        raise RankError("rank %d out of range for d = %d" % (i, d))
    return np.array(list(combinations(range(d), i)), dtype=np.int64)


def minors(a, i):
    """
    All i x i minors of the last two axes of a stack, rows and columns
    taken in lexicographic order.

    Args:
        a : ndarray(..., d, k)
        i : int

    Returns:
        out : ndarray(..., C(d, i), C(k, i))
    """
    d, k = a.shape[-2:]
    rows = wedge_basis(d, i)
    cols = wedge_basis(k, i)
    sub = a[..., rows[:, None, :, None], cols[None, :, None, :]]
    return np.linalg.det(sub)


def wedge_coordinates(frames):
    """Coordinates of the exterior product of the columns of frames (..., d, i)."""
    i = frames.shape[-1]
    return minors(frames, i)[..., 0]


def exterior_power(g, i):
    """Matrix of wedge^i g in the lexicographic basis; works on stacks (..., d, d)."""
    g = np.asarray(g, dtype=float)
    d = g.shape[-1]
    if not 1 <= i <= d - 1:
        raise RankError("exterior power rank %d out of range [1, %d]" % (i, d - 1))
    if i == 1:
        return g.copy()
    return minors(g, i)


class CartanVector:
    """Logarithms of the singular values, non-increasing."""

    def __init__(self, logs):
        self.logs = np.array(logs, dtype=float)
        assert np.all(np.diff(self.logs) <= setting.TOL_ROUND_TRIP)

    @property
    def d(self):
        return len(self.logs)

    def reversed_negated(self):
        return CartanVector(-self.logs[::-1])

    def __repr__(self):
        return "CartanVector(%s)" % np.array2string(self.logs, precision=6)


def cartan_decompose(g):
    """
    Polar decomposition g = k1 diag(exp a) k2 with k1, k2 in SO(d).

    Args:
        g : ndarray(d, d)
            Invertible matrix with positive determinant.

    Returns:
        k1 : ndarray(d, d)
        a : CartanVector
        k2 : ndarray(d, d)
    """
    g = np.asarray(g, dtype=float)
    if not np.all(np.isfinite(g)):
        raise DecompositionError("non-finite entries")
    try:
        u, s, vt = np.linalg.svd(g)
    except np.linalg.LinAlgError as e:
        raise DecompositionError("svd failed: %s" % e)
    if s[-1] <= setting.TOL_RANK * max(s[0], 1.0):
        raise DecompositionError("singular input (smallest singular value = %.3E)" % s[-1])
    if np.linalg.det(u) < 0:
        u[:, -1] = -u[:, -1]
        vt[-1, :] = -vt[-1, :]
    if np.linalg.det(vt) < 0:
        raise DecompositionError("determinant of input is negative")
    return u, CartanVector(np.log(s)), vt


class ScaledMatrix:
    """
    Matrix represented as exp(log_scale) * unit with unit of Frobenius norm 1.
    Long products are formed without overflow.
    """

    def __init__(self, unit, log_scale=0.0):
        self.unit = unit
        self.log_scale = log_scale

    @staticmethod
    def identity(d):
        return ScaledMatrix(np.identity(d) / np.sqrt(d), 0.5 * np.log(d))

    @staticmethod
    def from_matrix(a):
        a = np.asarray(a, dtype=float)
        nrm = np.linalg.norm(a)
        if nrm == 0 or not np.isfinite(nrm):
            raise InstabilityError("cannot scale matrix of norm %r" % nrm)
        return ScaledMatrix(a / nrm, float(np.log(nrm)))

    @property
    def d(self):
        return self.unit.shape[0]

    def renormalize(self):
        nrm = np.linalg.norm(self.unit)
        if nrm == 0 or not np.isfinite(nrm):
            raise InstabilityError("running product lost scale (norm = %r)" % nrm)
        log_scale = self.log_scale + float(np.log(nrm))
        if abs(log_scale) > setting.MAX_LOG_SCALE:
            raise InstabilityError("log scale %.6E beyond %.1E" % (log_scale, setting.MAX_LOG_SCALE))
        return ScaledMatrix(self.unit / nrm, log_scale)

    def __matmul__(self, other):
        if isinstance(other, ScaledMatrix):
            return ScaledMatrix(self.unit @ other.unit, self.log_scale + other.log_scale).renormalize()
        return ScaledMatrix(self.unit @ np.asarray(other, dtype=float), self.log_scale).renormalize()

    def log_norm(self, ord=2):
        """Natural log of the (operator by default) norm of the represented matrix."""
        return self.log_scale + float(np.log(np.linalg.norm(self.unit, ord=ord)))

    def log_singular_values(self):
        s = np.linalg.svd(self.unit, compute_uv=False)
        with np.errstate(divide='ignore'):
            return self.log_scale + np.log(s)

    def to_matrix(self):
        return np.exp(self.log_scale) * self.unit

    def __repr__(self):
        return "ScaledMatrix(d=%d, log_scale=%.6f)" % (self.d, self.log_scale)
