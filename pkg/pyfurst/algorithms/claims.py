
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
Audits of the estimates behind the growth of lambda_1(mu^k).

gamma = h^-1 diag(deltas) h is fixed once; all norms of gamma^{+-k} v are
evaluated in log form through the eigenbasis, so large k do not overflow.
"""

import math
import time
import numpy as np
from .. import setting
from ..algebra.group import is_r_regular, first_moment
from ..errors import DecompositionError
from .core import Streams, memory_usage
from .sampler import keyed_generator, reflected
from .harmonic import EmpiricalMeasure, sample_harmonic_measure


def diagonalize(gamma):
    """Diagonalization of gamma over R (R-regularity is not required)."""
    _, eigs, diag = is_r_regular(gamma, weak=True)
    if diag is None:
        raise DecompositionError("gamma is not diagonalizable over R (eigenvalues %s)" %
                                 ", ".join("%.6g" % abs(x) for x in eigs))
    return diag


def _log_norm_power(diag, v, k):
    """log |gamma^k v| for rows v and integer k (arrays broadcast)."""
    u = v @ diag.h.T
    with np.errstate(divide='ignore'):
        lu = np.log(np.abs(u))
    k = np.asarray(k)[..., None]
    ld = np.log(np.abs(diag.deltas))[None, :]
    sgn = np.sign(u) * np.where(np.sign(diag.deltas)[None, :] < 0, (-1.0) ** (k % 2), 1.0)
    logs = k * ld + lu
    top = np.max(logs, axis=1, keepdims=True)
    y = sgn * np.exp(logs - top)
    return top[:, 0] + np.log(np.linalg.norm(y @ diag.h_inv.T, axis=1))


def claim_gk_check(gamma, k_max, trials, seed, chunk=65536):
    """
    log |gamma^k v| + log |gamma^-k v| >= -2 log(|h| |h^-1|) for unit v.

    Random unit v and k uniform in [1, k_max]; violations are counted with
    slack 1E-6.
    """
    if k_max < 1 or trials < 1:
        raise ValueError("need k_max >= 1 and trials >= 1")
    diag = diagonalize(gamma)
    bound = -2.0 * diag.log_condition
    rng = keyed_generator(seed, Streams.Anchors, 1)
    d = gamma.d
    margins = []
    for start in range(0, trials, chunk):
        m = min(chunk, trials - start)
        v = rng.standard_normal((m, d))
        v /= np.linalg.norm(v, axis=1)[:, None]
        k = rng.integers(1, k_max + 1, size=m)
        lhs = _log_norm_power(diag, v, k) + _log_norm_power(diag, v, -k)
        margins.append(lhs - bound)
    margins = np.concatenate(margins)
    violations = int(np.sum(margins < -1E-6))
    return {"check": "claim_gk", "k_max": k_max, "trials": trials, "bound": bound,
            "min_margin": float(margins.min()), "violations": violations, "passed": violations == 0}


def in_opens(vectors, diag, beta=0.5):
    """
    Membership of lines in U: both the first and the last coordinate of
    h v / |h v| exceed beta, for v or -v.
    """
    u = np.atleast_2d(vectors) @ diag.h.T
    u = u / np.linalg.norm(u, axis=1)[:, None]
    pos = (u[:, 0] > beta) & (u[:, -1] > beta)
    neg = (u[:, 0] < -beta) & (u[:, -1] < -beta)
    return pos | neg


def opens_mass(nu, diag, beta=0.5):
    if nu.i != 1:
        raise ValueError("U lives in the projective space, got Gr_%d" % nu.i)
    return float(np.mean(in_opens(nu.frames[:, :, 0], diag, beta)))


def claim_opens_estimate(measures, diag, beta=0.5, N=10000, seed=0, n=200, threads=None, iprint=0):
    """
    Empirical nu_1^k(U) for each k.

    Args:
        measures : dict
            k -> FiniteMeasure (sampled here) or EmpiricalMeasure on Gr_1.
    """
    tx = time.perf_counter()
    masses = {}
    for k in sorted(measures):
        m = measures[k]
        nu = m if isinstance(m, EmpiricalMeasure) else \
            sample_harmonic_measure(m, 1, n, N, seed, threads=threads)
        masses[k] = opens_mass(nu, diag, beta)
        if iprint >= 2:
            print("%10s | k = %4d | N = %8d | mass(U) = %10.6f" % ("opens", k, nu.size, masses[k]))
    zeros = [k for k, x in masses.items() if x == 0]
    rep = {"check": "claim_opens", "beta": beta, "masses": {str(k): x for k, x in masses.items()},
           "min_mass": min(masses.values()) if masses else 0.0, "zero_ks": zeros,
           "passed": len(masses) > 0 and len(zeros) == 0}
    if iprint >= 1:
        print("%10s | ks = %4d | min mass = %10.6f | T = %8.3f | MEM = %7s" % (
            "opens", len(masses), rep["min_mass"], time.perf_counter() - tx, memory_usage()))
    return rep


def claim_l1_lower_bound(mu, diag, k, beta, mass_u):
    """
    Lower bound on lambda_1(mu^k) from the Furstenberg formula, using
    log |g v| >= -log |g^-1| on the mu part, the U estimate on the
    gamma^{+-k} part where nu_1^k(U) = mass_u, and the uniform gk bound elsewhere.
    """
    lc = diag.log_condition
    mods = np.abs(diag.deltas)
    spread = math.log(mods[0] / mods[-1])
    first = -0.5 * first_moment(reflected(mu))
    inside = 2.0 * (math.log(beta) - lc) + k * spread
    outside = -2.0 * lc
    return first + 0.25 * (mass_u * inside + (1.0 - mass_u) * outside)


def claim_l1_check(mu, diag, lambdas, masses, beta=0.5):
    """
    Compare measured lambda_1(mu^k) with the lower bound for each k.

    Args:
        lambdas : dict
            k -> (lambda_1, stderr).
        masses : dict
            k -> nu_1^k(U).
    """
    rows = []
    for k in sorted(lambdas):
        lb = claim_l1_lower_bound(mu, diag, k, beta, masses[k])
        lam, err = lambdas[k]
        rows.append({"k": k, "lambda_1": lam, "stderr": err, "lower_bound": lb,
                     "passed": bool(lam + 3 * err + setting.TOL_DET >= lb)})
    return {"check": "claim_l1", "rows": rows, "passed": all(r["passed"] for r in rows)}
