
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

"""Named failures raised by pyfurst."""


class DecompositionError(RuntimeError):
    pass


class RankError(ValueError):
    pass


class DegenerateActionError(RuntimeError):
    pass


class SupportCapError(RuntimeError):
    """Convolution support grew beyond the configured cap.

    Attributes:
        cap : int
            The support cap in force.
        achieved : int
            Largest convolution power completed before the cap was hit.
    """

    def __init__(self, cap, achieved, size=None):
        self.cap = cap
        self.achieved = achieved
        self.size = size
        msg = "support cap %d exceeded (achieved power = %d" % (cap, achieved)
        if size is not None:
            msg += ", support size = %d" % size
        RuntimeError.__init__(self, msg + ")")


class PreconditionError(ValueError):
    pass


class NumericError(RuntimeError):
    pass


class InstabilityError(RuntimeError):
    pass


class BoundUndefinedError(ValueError):
    pass


class EmptyMeasureError(ValueError):
    pass


class BallSamplingError(RuntimeError):
    pass


class MeasureFileError(ValueError):
    pass


class ConfigError(ValueError):
    pass
