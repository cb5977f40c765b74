
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
Global numerical options and the tolerance table.

Every tolerance used for pass/fail decisions lives here, so a run can be
reproduced by recording the values passed to :func:`set_options`.
"""

import sys

this = sys.modules[__name__]

# tolerance table
this.TOL_DET = 1E-9
this.TOL_ORTHO = 1E-10
this.TOL_UNIT_NORM = 1E-12
this.TOL_ROUND_TRIP = 1E-9
this.TOL_REAL_EIG = 1E-9
this.TOL_MODULUS_MARGIN = 1E-6
this.TOL_WEIGHT_SUM = 1E-12
this.TOL_RANK = 1E-12
this.TOL_SINGULAR_GAP = 1E-12
this.TOL_FIXED_POINT = 1E-10
this.MAX_LOG_SCALE = 1E8
this.SUPPORT_CAP = 5000000

# run options
this.DEFAULT_THREADS = 1
this.DEFAULT_IPRINT = 0
this.UNIMODULAR_QR = True
this.RESOLUTION_FACTOR = 2.0
this.MAX_BALL_REJECTIONS = 100000

_tolerance_map = {
    "det": "TOL_DET",
    "ortho": "TOL_ORTHO",
    "unit_norm": "TOL_UNIT_NORM",
    "round_trip": "TOL_ROUND_TRIP",
    "real_eig": "TOL_REAL_EIG",
    "modulus_margin": "TOL_MODULUS_MARGIN",
    "weight_sum": "TOL_WEIGHT_SUM",
    "rank": "TOL_RANK",
    "singular_gap": "TOL_SINGULAR_GAP",
    "fixed_point": "TOL_FIXED_POINT",
    "max_log_scale": "MAX_LOG_SCALE",
    "support_cap": "SUPPORT_CAP",
}


def set_tolerance(name, value):
    if name not in _tolerance_map:
        raise KeyError("tolerance %s not supported" % name)
    if name == "support_cap":
        value = int(value)
    else:
        value = float(value)
    if value <= 0:
        raise ValueError("tolerance %s must be positive, got %r" % (name, value))
    setattr(this, _tolerance_map[name], value)


def get_tolerances():
    return {k: getattr(this, v) for k, v in _tolerance_map.items()}


def set_threads(threads):
    this.DEFAULT_THREADS = max(1, int(threads))


def set_iprint(iprint):
    this.DEFAULT_IPRINT = int(iprint)


def set_unimodular_qr(unimodular_qr):
    this.UNIMODULAR_QR = bool(unimodular_qr)


def set_options(**kwargs):
    threads = kwargs.pop("threads", None)
    iprint = kwargs.pop("iprint", None)
    unimodular_qr = kwargs.pop("unimodular_qr", None)
    tolerances = kwargs.pop("tolerances", None)
    for name in list(kwargs.keys()):
        if name in _tolerance_map:
            set_tolerance(name, kwargs.pop(name))
    if len(kwargs) != 0:
        raise KeyError("unknown options: %s" % ", ".join(sorted(kwargs)))
    if threads is not None:
        set_threads(threads)
    if iprint is not None:
        set_iprint(iprint)
    if unimodular_qr is not None:
        set_unimodular_qr(unimodular_qr)
    if tolerances is not None:
        for name, value in tolerances.items():
            set_tolerance(name, value)


def dispatch_settings(**kwargs):
    keys = list(kwargs.keys())
    for ikey in keys:
        if kwargs.get(ikey) is None:
            kwargs[ikey] = getattr(this, "DEFAULT_%s" % ikey.upper())
    _settings = [kwargs.pop(ikey) for ikey in keys]
    if len(_settings) == 1:
        _settings = _settings[0]
    return _settings
