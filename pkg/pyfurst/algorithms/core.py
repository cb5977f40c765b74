
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
Common methods for sampling algorithms: estimator options, worker pool,
progress printing and stage timings.
"""

import os
import time
import psutil
import numpy as np
from enum import Enum, auto
from multiprocessing.pool import ThreadPool
from .. import setting


def fmt_size(i, suffix='B'):
    if i < 1000:
        return "%d %s" % (i, suffix)
    else:
        a = 1024
        for pf in "KMGTPEZY":
            p = 2
            for k in [10, 100, 1000]:
                if i < k * a:
                    return "%%.%df %%s%%s" % p % (i / a, pf, suffix)
                p -= 1
            a *= 1024
    return "??? " + suffix


def memory_usage():
    return fmt_size(psutil.Process(os.getpid()).memory_info().rss)


class EntropyMethods(Enum):
    Difference = auto()
    LogCorrected = auto()


class RatioMethods(Enum):
    Count = auto()
    Distance = auto()


class Streams:
    """Independent uses of one experiment seed."""
    Forward = 0
    Backward = 1
    Ball = 2
    Bootstrap = 3
    Anchors = 4


_timings = {}


def add_timing(name, dt):
    _timings[name] = _timings.get(name, 0.0) + dt


def format_timing():
    return " | ".join("T-%s = %.3f" % (k, v) for k, v in _timings.items())


def clear_timing():
    _timings.clear()


class StageTimer:
    """Context manager adding elapsed time to a named stage and printing a summary line."""

    def __init__(self, name, iprint=0):
        self.name = name
        self.iprint = iprint

    def __enter__(self):
        self.tx = time.perf_counter()
        return self

    def __exit__(self, *args):
        dt = time.perf_counter() - self.tx
        add_timing(self.name, dt)
        if self.iprint >= 1:
            print("Stage = %12s | Time = %10.3f | MEM = %7s" % (self.name, dt, memory_usage()))


def parallel_map(func, items, threads=None):
    """Map over items with a thread pool; results keep the order of items."""
    threads = setting.dispatch_settings(threads=threads)
    items = list(items)
    if threads <= 1 or len(items) <= 1:
        return [func(x) for x in items]
    with ThreadPool(min(threads, len(items))) as pool:
        return pool.map(func, items)


def replica_stderr(values):
    """Standard error of the mean along axis 0; zero for a single replica."""
    values = np.asarray(values, dtype=float)
    if values.shape[0] < 2:
        return np.zeros(values.shape[1:])
    return values.std(axis=0, ddof=1) / np.sqrt(values.shape[0])
