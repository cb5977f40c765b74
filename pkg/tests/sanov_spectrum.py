
import sys
sys.path[:0] = ['..']

import time
from pyfurst.algebra.group import GroupElement, FiniteMeasure
from pyfurst.algorithms.lyapunov import estimate_spectrum_qr, check_reflection_identity, furstenberg_partial_sum
from pyfurst.algorithms.harmonic import sample_harmonic_measure

a = GroupElement.generator([[1, 2], [0, 1]], 0)
b = GroupElement.generator([[1, 0], [2, 1]], 1)
mu = FiniteMeasure.uniform([a, a.inverse(), b, b.inverse()])

n, replicas, seed = 100000, 16, 1234

tx = time.perf_counter()
est = estimate_spectrum_qr(mu, n, replicas, seed, threads=4, iprint=1)
print(est)
print("gap = %.6f +- %.6f" % est.gap(1))
print("zero sum = %s" % est.zero_sum_ok())
print(check_reflection_identity(mu, n, replicas, seed, threads=4))

nu = sample_harmonic_measure(mu, 1, n=200, N=4000, seed=seed, threads=4)
print(furstenberg_partial_sum(mu, 1, nu))
print('T = %.3f' % (time.perf_counter() - tx))
