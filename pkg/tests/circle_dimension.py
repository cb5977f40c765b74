
import sys
sys.path[:0] = ['..']

import numpy as np
from pyfurst.algorithms.harmonic import circle_measure, cantor_measure
from pyfurst.algorithms.dimension import DimensionReport

radii = np.geomspace(0.3, 0.01, 12)
for name, nu in [("circle", circle_measure(4000)), ("cantor", cantor_measure(12))]:
    rep = DimensionReport(nu, radii)
    print("%8s expected = %.4f interval = (%.4f, %.4f)" % ((name, nu.meta["dimension"]) + tuple(rep.mean_dim_interval)))
