
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
Reproducible right random walks x_n = h_1 h_2 ... h_n.

Increment m of sample s is the atom selected by inverse CDF from the m-th
double of a Philox stream keyed by (seed, stream, s), so every increment is
a pure function of its key whatever the order or thread it is drawn in.
"""

import numpy as np
from .. import setting
from ..algebra.linalg import ScaledMatrix
from ..algebra.group import reflect
from ..errors import InstabilityError
from .core import Streams


class StreamKey:
    """(experiment seed, sample index, step index) plus the stream id."""
    __slots__ = ['seed', 'sample', 'step', 'stream']

    def __init__(self, seed, sample, step, stream=Streams.Forward):
        self.seed = int(seed)
        self.sample = int(sample)
        self.step = int(step)
        self.stream = int(stream)

    def __repr__(self):
        return "StreamKey(seed=%d, sample=%d, step=%d, stream=%d)" % (
            self.seed, self.sample, self.step, self.stream)


def keyed_generator(seed, stream, sample):
    key = np.random.SeedSequence(int(seed), spawn_key=(int(stream), int(sample))).generate_state(2, np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


# uint64 outputs per Philox counter step
_PHILOX_BLOCK = 4


def uniforms(seed, stream, sample, start, count):
    """
    Doubles number start .. start + count - 1 of the keyed stream.

    The counter is advanced to the block holding ``start``, so the cost does
    not depend on ``start``.
    """
    gen = keyed_generator(seed, stream, sample)
    block, skip = divmod(int(start), _PHILOX_BLOCK)
    if block != 0:
        gen.bit_generator.advance(block)
    return gen.random(skip + count)[skip:]


def increment_indices(mu, n, sample, seed, stream=Streams.Forward):
    """Atom indices of h_1 .. h_n for one sample path."""
    if n == 0:
        return np.zeros(0, dtype=np.int64)
    u = uniforms(seed, stream, sample, 0, n)
    idx = np.searchsorted(mu.cdf(), u, side='right')
    return np.minimum(idx, mu.size - 1).astype(np.int64)


def sample_increment(mu, key):
    u = uniforms(key.seed, key.stream, key.sample, key.step, 1)
    idx = int(np.searchsorted(mu.cdf(), u[0], side='right'))
    return mu.atoms[min(idx, mu.size - 1)]


def reflected(mu):
    """Cached reflected measure."""
    if 'reflect' not in mu._cache:
        mu._cache['reflect'] = reflect(mu)
    return mu._cache['reflect']


def _product_accumulate(mats, idx, unit):
    d = unit.shape[0]
    tmp = np.empty((d, d))
    log_scale = 0.0
    for m in range(idx.shape[0]):
        a = mats[idx[m]]
        nrm = 0.0
        for i in range(d):
            for j in range(d):
                s = 0.0
                for k in range(d):
                    s += unit[i, k] * a[k, j]
                tmp[i, j] = s
                nrm += s * s
        nrm = np.sqrt(nrm)
        if nrm == 0.0 or not np.isfinite(nrm):
            return np.nan
        for i in range(d):
            for j in range(d):
                unit[i, j] = tmp[i, j] / nrm
        log_scale += np.log(nrm)
    return log_scale


try:
    import numba as nb

    product_accumulate = nb.njit(nb.float64(nb.float64[:, :, ::1], nb.int64[::1], nb.float64[:, ::1]),
                                 nogil=True)(_product_accumulate)

except Exception:

    product_accumulate = _product_accumulate


class PathState:
    """
    Running product of one sample path.

    Attributes:
        n : int
        product : ScaledMatrix
        increments : list of GroupElement or None
    """

    def __init__(self, n, product, increments=None):
        self.n = n
        self.product = product
        self.increments = increments

    def __repr__(self):
        return "PathState(n=%d, log_scale=%.6f)" % (self.n, self.product.log_scale)


def _walk(mu, n, sample_index, seed, stream, retain):
    if n < 0:
        raise ValueError("number of steps must be non-negative, got %d" % n)
    idx = increment_indices(mu, n, sample_index, seed, stream)
    prod = ScaledMatrix.identity(mu.d)
    unit = np.ascontiguousarray(prod.unit)
    if n > 0:
        log_scale = product_accumulate(np.ascontiguousarray(mu.matrices()), idx, unit)
        if not np.isfinite(log_scale):
            raise InstabilityError("running product lost scale at sample %d" % sample_index)
        prod = ScaledMatrix(unit, prod.log_scale + log_scale)
        if abs(prod.log_scale) > setting.MAX_LOG_SCALE:
            raise InstabilityError("log scale %.6E beyond %.1E" % (prod.log_scale, setting.MAX_LOG_SCALE))
    incs = [mu.atoms[j] for j in idx] if retain else None
    return PathState(n, prod, incs)


def forward_product(mu, n, sample_index, seed, retain=False):
    """x_n = h_1 ... h_n with mu-distributed increments."""
    return _walk(mu, n, sample_index, seed, Streams.Forward, retain)


def backward_product(mu, n, sample_index, seed, retain=False):
    """x_{-n}, the right random walk of the reflected measure on its own stream."""
    return _walk(reflected(mu), n, sample_index, seed, Streams.Backward, retain)


def forward_products(mu, n, samples, seed, stream=Streams.Forward):
    """
    Products for many sample paths at once.

    Returns:
        units : ndarray(N, d, d)
            Unit Frobenius-norm factors.
        log_scales : ndarray(N)
    """
    samples = np.asarray(samples, dtype=np.int64)
    nsam, d = len(samples), mu.d
    idx = np.array([increment_indices(mu, n, s, seed, stream) for s in samples]).reshape(nsam, n)
    mats = mu.matrices()
    units = np.broadcast_to(np.identity(d) / np.sqrt(d), (nsam, d, d)).copy()
    log_scales = np.full(nsam, 0.5 * np.log(d))
    for m in range(n):
        units = units @ mats[idx[:, m]]
        nrm = np.linalg.norm(units, axis=(1, 2))
        if np.any(nrm == 0) or not np.all(np.isfinite(nrm)):
            raise InstabilityError("running product lost scale at step %d" % (m + 1))
        units /= nrm[:, None, None]
        log_scales += np.log(nrm)
    if np.any(np.abs(log_scales) > setting.MAX_LOG_SCALE):
        raise InstabilityError("log scale beyond %.1E" % setting.MAX_LOG_SCALE)
    return units, log_scales


def backward_products(mu, n, samples, seed):
    return forward_products(reflected(mu), n, samples, seed, stream=Streams.Backward)
