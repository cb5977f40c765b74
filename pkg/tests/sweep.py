
import sys
sys.path[:0] = ['..']

import numpy as np
from pyfurst.algebra.group import GroupElement, FiniteMeasure, shannon_entropy
from pyfurst.algorithms.sweep import SweepParams, singularity_sweep, sweep_acceptance

a = GroupElement.generator([[1, 2], [0, 1]], 0)
b = GroupElement.generator([[1, 0], [2, 1]], 1)
mu = FiniteMeasure.uniform([a, a.inverse(), b, b.inverse()])
gamma = a @ b

params = SweepParams(n=20000, replicas=8, N=2000, flag_n=200, radii=np.geomspace(0.3, 0.02, 10))
rep = singularity_sweep(mu, gamma, [1, 2, 4, 8], params, seed=11, threads=4, iprint=1)

print(" ".join("%12s" % c for c in rep.columns))
for row in rep.table():
    print(" ".join("%12.6g" % x if isinstance(x, float) else "%12s" % x for x in row))
print(sweep_acceptance(rep, shannon_entropy(mu)))
