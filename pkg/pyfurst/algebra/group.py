
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
Exact group arithmetic in SL(d, Q) and finitely supported measures.

Exact elements keep a reduced integer numerator matrix and a positive common
denominator, so equality of products is decidable and convolution supports
merge without rounding. Float elements exist for irrational generators;
they can be sampled from but never convolved.
"""

import math
import hashlib
import numpy as np
from fractions import Fraction
from functools import reduce
from .. import setting
from ..errors import PreconditionError, NumericError, SupportCapError, EmptyMeasureError


def _to_fraction(x):
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (int, np.integer)):
        return Fraction(int(x))
    if isinstance(x, str):
        return Fraction(x.strip())
    if isinstance(x, (float, np.floating)):
        return Fraction(repr(float(x)))
    raise TypeError("cannot interpret %r as an exact rational" % (x, ))


def bareiss_det(rows):
    """Fraction-free determinant of a square integer matrix (list of lists)."""
    a = [list(r) for r in rows]
    n = len(a)
    sign, prev = 1, 1
    for k in range(n - 1):
        if a[k][k] == 0:
            for p in range(k + 1, n):
                if a[p][k] != 0:
                    a[k], a[p] = a[p], a[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
        prev = a[k][k]
    return sign * a[n - 1][n - 1]


def _fraction_inverse(rows):
    n = len(rows)
    a = [[Fraction(x) for x in r] + [Fraction(int(i == j)) for j in range(n)]
         for i, r in enumerate(rows)]
    for c in range(n):
        p = next((r for r in range(c, n) if a[r][c] != 0), None)
        if p is None:
            raise NumericError("matrix is singular")
        a[c], a[p] = a[p], a[c]
        pv = a[c][c]
        a[c] = [x / pv for x in a[c]]
        for r in range(n):
            if r != c and a[r][c] != 0:
                f = a[r][c]
                a[r] = [x - f * y for x, y in zip(a[r], a[c])]
    return [row[n:] for row in a]


def _reduce(num, den):
    g = reduce(math.gcd, num, den)
    if den < 0:
        g = -g
    if g != 1:
        num = tuple(x // g for x in num)
        den //= g
    return num, den


def _matmul_num(a, b, d):
    return tuple(sum(a[i * d + k] * b[k * d + j] for k in range(d))
                 for i in range(d) for j in range(d))


def _reduce_word(word):
    out = []
    for gen, e in word:
        if out and out[-1][0] == gen:
            e += out.pop()[1]
        if e != 0:
            out.append((gen, e))
    return tuple(out)


class GroupElement:
    """
    Element of SL(d, R).

    Exact elements store ``num`` (row-major integer tuple) and ``den``
    (positive integer), reduced. Float elements store ``array``.

    Attributes:
        d : int
        exact : bool
        word : tuple of (int, int) or None
            Generator indices with exponents.
    """
    __slots__ = ['d', 'exact', 'num', 'den', 'array', 'word', '_float']

    def __init__(self, entries, word=None, exact=True, validate=True):
        if exact:
            rows = [[_to_fraction(x) for x in r] for r in entries]
            d = len(rows)
            if d < 2 or any(len(r) != d for r in rows):
                raise PreconditionError("group element must be a square matrix with d >= 2")
            den = reduce(lambda x, y: x * y // math.gcd(x, y), [x.denominator for r in rows for x in r], 1)
            num = tuple(int(x * den) for r in rows for x in r)
            self.num, self.den = _reduce(num, den)
            self.array = None
        else:
            arr = np.array(entries, dtype=float)
            d = arr.shape[0]
            if arr.ndim != 2 or arr.shape != (d, d) or d < 2:
                raise PreconditionError("group element must be a square matrix with d >= 2")
            if not np.all(np.isfinite(arr)):
                raise PreconditionError("non-finite matrix entries")
            self.num, self.den = None, None
            self.array = arr
        self.d = d
        self.exact = exact
        self.word = _reduce_word(word) if word is not None else None
        self._float = None
        if validate:
            self.check_unimodular()

    @classmethod
    def _from_reduced(cls, d, num, den, word=None):
        obj = cls.__new__(cls)
        obj.d, obj.exact, obj.num, obj.den = d, True, num, den
        obj.array, obj.word, obj._float = None, word, None
        return obj

    @classmethod
    def _from_array(cls, arr, word=None):
        obj = cls.__new__(cls)
        obj.d, obj.exact, obj.num, obj.den = arr.shape[0], False, None, None
        obj.array, obj.word, obj._float = arr, word, None
        return obj

    @staticmethod
    def identity(d):
        return GroupElement._from_reduced(d, tuple(int(i == j) for i in range(d) for j in range(d)), 1, ())

    @staticmethod
    def generator(entries, index):
        """Exact element tagged with the one-letter word (index, 1)."""
        return GroupElement(entries, word=((index, 1), ))

    def check_unimodular(self):
        if self.exact:
            det = bareiss_det(self.rows_num())
            if det != self.den ** self.d:
                raise PreconditionError("determinant is %s, not 1" % Fraction(det, self.den ** self.d))
        else:
            det = np.linalg.det(self.array)
            if abs(det - 1) > setting.TOL_DET:
                raise PreconditionError("determinant is %.12g, not 1 within %.1E" % (det, setting.TOL_DET))

    def rows_num(self):
        d = self.d
        return [list(self.num[i * d:(i + 1) * d]) for i in range(d)]

    @property
    def entries(self):
        """Entries as a list of rows of Fractions (exact) or floats."""
        if self.exact:
            return [[Fraction(x, self.den) for x in r] for r in self.rows_num()]
        return self.array.tolist()

    @property
    def key(self):
        if self.exact:
            return (self.d, self.den, self.num)
        return (self.d, 0, self.array.tobytes())

    def to_array(self):
        if self._float is None:
            if self.exact:
                self._float = np.array(self.num, dtype=float).reshape(self.d, self.d) / self.den
            else:
                self._float = self.array
        return self._float

    def __matmul__(self, other):
        assert self.d == other.d
        word = _reduce_word(self.word + other.word) \
            if self.word is not None and other.word is not None else None
        if self.exact and other.exact:
            num, den = _reduce(_matmul_num(self.num, other.num, self.d), self.den * other.den)
            return GroupElement._from_reduced(self.d, num, den, word)
        return GroupElement._from_array(self.to_array() @ other.to_array(), word)

    def inverse(self):
        word = tuple((g, -e) for g, e in reversed(self.word)) if self.word is not None else None
        if self.exact:
            inv = _fraction_inverse(self.rows_num())
            return GroupElement(inv, validate=False)._scaled(self.den, word)
        return GroupElement._from_array(np.linalg.inv(self.array), word)

    def _scaled(self, c, word):
        num, den = _reduce(tuple(x * c for x in self.num), self.den)
        return GroupElement._from_reduced(self.d, num, den, word)

    def power(self, k):
        """Exact power by repeated squaring; negative k uses the inverse."""
        base = self if k >= 0 else self.inverse()
        k = abs(k)
        result = GroupElement.identity(self.d)
        if not self.exact:
            return GroupElement._from_array(np.linalg.matrix_power(base.array, k),
                None if base.word is None else _reduce_word(base.word * k))
        while k:
            if k & 1:
                result = result @ base
            base = base @ base
            k >>= 1
        return result

    def is_identity(self):
        if self.exact:
            return self.den == 1 and self.num == GroupElement.identity(self.d).num
        return np.array_equal(self.array, np.identity(self.d))

    def operator_norm(self):
        return float(np.linalg.norm(self.to_array(), ord=2))

    def __eq__(self, other):
        return isinstance(other, GroupElement) and self.key == other.key

    def __hash__(self):
        return hash(self.key)

    def __repr__(self):
        if self.exact:
            rows = ", ".join("[%s]" % ", ".join(str(x) for x in r) for r in self.entries)
            return "GroupElement([%s])" % rows
        return "GroupElement(%s, exact=False)" % np.array2string(self.array, precision=6)


def _is_rational(w):
    return isinstance(w, (Fraction, int))


class FiniteMeasure:
    """
    Finitely supported probability measure on SL(d, R).

    Args:
        atoms : list of GroupElement
        weights : list of Fraction/int (rational mode) or float
        nondegenerate, zariski_dense : bool or None
            Unverified input metadata asserted by configuration.
    """

    def __init__(self, atoms, weights, nondegenerate=None, zariski_dense=None, merge=True, check=True):
        if len(atoms) == 0:
            raise EmptyMeasureError("measure without atoms")
        if len(atoms) != len(weights):
            raise PreconditionError("%d atoms but %d weights" % (len(atoms), len(weights)))
        d = atoms[0].d
        if any(g.d != d for g in atoms):
            raise PreconditionError("atoms of different dimensions")
        rational = all(_is_rational(w) for w in weights)
        weights = [Fraction(w) for w in weights] if rational else [float(w) for w in weights]
        if merge:
            index = {}
            m_atoms, m_weights = [], []
            for g, w in zip(atoms, weights):
                k = g.key
                if k in index:
                    m_weights[index[k]] += w
                else:
                    index[k] = len(m_atoms)
                    m_atoms.append(g)
                    m_weights.append(w)
            atoms, weights = m_atoms, m_weights
        if check:
            if any(w <= 0 for w in weights):
                raise PreconditionError("weights must be positive")
            if rational:
                if sum(weights) != 1:
                    raise PreconditionError("rational weights sum to %s, not 1" % sum(weights))
            elif abs(math.fsum(weights) - 1) > setting.TOL_WEIGHT_SUM:
                raise PreconditionError("weights sum to %.15g, not 1" % math.fsum(weights))
        self.atoms = list(atoms)
        self.weights = list(weights)
        self.rational = rational
        self.nondegenerate = nondegenerate
        self.zariski_dense = zariski_dense
        self._cache = {}

    @staticmethod
    def delta(g):
        return FiniteMeasure([g], [Fraction(1)])

    @staticmethod
    def uniform(atoms, **kwargs):
        return FiniteMeasure(atoms, [Fraction(1, len(atoms))] * len(atoms), **kwargs)

    @property
    def d(self):
        return self.atoms[0].d

    @property
    def exact(self):
        return all(g.exact for g in self.atoms)

    @property
    def size(self):
        return len(self.atoms)

    def __len__(self):
        return len(self.atoms)

    def items(self):
        return zip(self.atoms, self.weights)

    def weight_of(self, g):
        for a, w in self.items():
            if a.key == g.key:
                return w
        return 0

    def float_weights(self):
        if 'w' not in self._cache:
            self._cache['w'] = np.array([float(w) for w in self.weights])
        return self._cache['w']

    def cdf(self):
        """Cumulative weights; the last entry is exactly 1."""
        if 'cdf' not in self._cache:
            if self.rational:
                acc, c = Fraction(0), []
                for w in self.weights:
                    acc += w
                    c.append(float(acc))
            else:
                c = list(np.cumsum(self.float_weights()) / math.fsum(self.weights))
            c[-1] = 1.0
            self._cache['cdf'] = np.array(c)
        return self._cache['cdf']

    def matrices(self):
        """Stack (n_atoms, d, d) of float matrices."""
        if 'mats' not in self._cache:
            self._cache['mats'] = np.array([g.to_array() for g in self.atoms])
        return self._cache['mats']

    def is_symmetric(self):
        return reflect(self).canonical() == self.canonical()

    def canonical(self):
        """Atoms and weights sorted by canonical key."""
        return sorted(((g.key, w) for g, w in self.items()), key=lambda x: x[0])

    def support_hash(self):
        h = hashlib.sha256()
        for key, w in self.canonical():
            h.update(repr((key[0], key[1], key[2] if self.exact else key[2].hex(), str(w))).encode())
        return h.hexdigest()

    def __eq__(self, other):
        return isinstance(other, FiniteMeasure) and self.canonical() == other.canonical()

    def __repr__(self):
        return "FiniteMeasure(d=%d, atoms=%d, %s)" % (
            self.d, self.size, "rational" if self.rational else "float")


def _require_exact(*measures):
    for m in measures:
        if not m.exact:
            raise PreconditionError("exact rational atoms are required for convolution")


def convolve(mu, nu, cap=None):
    """
    Exact convolution mu * nu; atoms sorted by canonical key.

    Each product g h is formed once; an atom reached by several products
    keeps its shortest word. Raises SupportCapError reporting the full
    support size when it exceeds cap.
    """
    if mu.d != nu.d:
        raise PreconditionError("dimension mismatch %d vs %d" % (mu.d, nu.d))
    _require_exact(mu, nu)
    cap = setting.SUPPORT_CAP if cap is None else cap
    d = mu.d
    out, words = {}, {}
    for g, wg in mu.items():
        for h, wh in nu.items():
            p = g @ h
            key = (p.den, p.num)
            if key in out:
                out[key] += wg * wh
                if p.word is not None and (words[key] is None or len(p.word) < len(words[key])):
                    words[key] = p.word
            else:
                out[key] = wg * wh
                words[key] = p.word
    if len(out) > cap:
        raise SupportCapError(cap, 1, len(out))
    keys = sorted(out.keys())
    atoms = [GroupElement._from_reduced(d, num, den, words[(den, num)]) for den, num in keys]
    return FiniteMeasure(atoms, [out[k] for k in keys], merge=False, check=False)


def reflect(mu):
    return FiniteMeasure([g.inverse() for g in mu.atoms], list(mu.weights),
                         nondegenerate=mu.nondegenerate, zariski_dense=mu.zariski_dense, merge=False, check=False)


def entropy_of_weights(weights):
    w = [float(x) for x in weights]
    return -math.fsum(x * math.log(x) for x in w if x > 0)


def shannon_entropy(mu):
    return entropy_of_weights(mu.weights)


def first_moment(mu):
    return math.fsum(float(w) * math.log(g.operator_norm()) for g, w in mu.items())


class Diagonalization:
    """
    gamma = h^-1 diag(deltas) h with |deltas| non-increasing.

    Attributes:
        h, h_inv : ndarray(d, d)
        deltas : ndarray(d)
    """

    def __init__(self, h, h_inv, deltas):
        self.h = h
        self.h_inv = h_inv
        self.deltas = deltas

    @property
    def log_condition(self):
        return float(np.log(np.linalg.norm(self.h, ord=2)) + np.log(np.linalg.norm(self.h_inv, ord=2)))

    def __repr__(self):
        return "Diagonalization(deltas=%s, log_cond=%.4f)" % (
            np.array2string(self.deltas, precision=6), self.log_condition)


def is_r_regular(gamma, weak=False):
    """
    Test diagonalizability over R with pairwise distinct eigenvalue moduli.

    Args:
        gamma : GroupElement
        weak : bool
            If True, test only diagonalizability over R with some
            eigenvalue modulus different from 1.

    Returns:
        regular : bool
        eigenvalues : list of complex
            Sorted by non-increasing modulus.
        diag : Diagonalization or None
            Available whenever gamma is diagonalizable over R.
    """
    a = gamma.to_array()
    try:
        vals, vecs = np.linalg.eig(a)
    except np.linalg.LinAlgError as e:
        raise NumericError("eigen-solver failed: %s" % e)
    idx = np.argsort(-np.abs(vals), kind='stable')
    vals, vecs = vals[idx], vecs[:, idx]
    eigenvalues = [complex(v) for v in vals]
    mods = np.abs(vals)
    real = bool(np.all(np.abs(vals.imag) <= setting.TOL_REAL_EIG * np.maximum(mods, 1.0)))
    diag = None
    if real:
        p = vecs.real
        p = p / np.linalg.norm(p, axis=0)[None, :]
        sv = np.linalg.svd(p, compute_uv=False)
        if sv[-1] > setting.TOL_RANK ** 0.5 * sv[0]:
            diag = Diagonalization(np.linalg.inv(p), p, vals.real.copy())
    if diag is None:
        return False, eigenvalues, None
    if weak:
        return bool(np.any(np.abs(mods - 1) > setting.TOL_MODULUS_MARGIN)), eigenvalues, diag
    rel = (mods[:-1] - mods[1:]) / mods[:-1]
    return bool(np.all(rel >= setting.TOL_MODULUS_MARGIN)), eigenvalues, diag


def build_mu_k(mu, gamma, k, weak=False):
    """mu^k = 1/2 mu + 1/4 (delta_{gamma^k} + delta_{gamma^-k})."""
    if k < 1:
        raise PreconditionError("k must be a positive integer, got %r" % (k, ))
    _require_exact(mu)
    if not gamma.exact:
        raise PreconditionError("gamma must be exact rational")
    regular, eigs, _ = is_r_regular(gamma, weak=weak)
    if not regular:
        raise PreconditionError("gamma is not R-regular (eigenvalues %s)" % ", ".join("%.6g" % abs(x) for x in eigs))
    half, quarter = (Fraction(1, 2), Fraction(1, 4)) if mu.rational else (0.5, 0.25)
    atoms = list(mu.atoms) + [gamma.power(k), gamma.power(-k)]
    weights = [half * w for w in mu.weights] + [quarter, quarter]
    return FiniteMeasure(atoms, weights, nondegenerate=mu.nondegenerate,
                         zariski_dense=mu.zariski_dense, merge=True)


def free_group_drift_entropy(k):
    """Asymptotic entropy of the simple random walk on the free group of rank k."""
    return (k - 1) / k * math.log(2 * k - 1)


def free_group_entropy(k, n):
    """
    H(mu^{*n}) for the simple random walk on the free group of rank k.

    Word length is a birth-death chain; given its length the reduced word
    is uniform among the 2k(2k-1)^(L-1) words of that length.
    """
    q = 2 * k
    p = np.zeros(n + 2)
    p[0] = 1.0
    for _ in range(n):
        nxt = np.zeros_like(p)
        nxt[1] += p[0]
        nxt[2:] += p[1:-1] * (q - 1) / q
        nxt[:-2] += p[1:-1] / q
        p = nxt
    lengths = np.arange(n + 2)
    with np.errstate(divide='ignore'):
        log_words = np.where(lengths > 0, np.log(q) + (lengths - 1) * np.log(q - 1), 0.0)
    mask = p > 0
    return float(-np.sum(p[mask] * np.log(p[mask])) + np.sum(p[mask] * log_words[mask]))
