
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
Files: measure definitions, flag banks, JSON reports and CSV tables.

Reports and tables are written to a temporary file in the target directory
and moved into place with os.replace.
"""

import os
import csv
import json
import time
import numpy as np
from fractions import Fraction
from .algebra.group import GroupElement, FiniteMeasure
from .algorithms.harmonic import EmpiricalMeasure
from .errors import MeasureFileError, PreconditionError, EmptyMeasureError


def _weight(x):
    if isinstance(x, str):
        return Fraction(x.strip())
    if isinstance(x, int):
        return Fraction(x)
    return float(x)


def measure_from_dict(doc):
    """
    FiniteMeasure from {"d": int, "atoms": [{"matrix": ..., "weight": "p/q"}]}.

    Matrix entries may be integers, floats or "p/q" strings. With
    ``"exact": false`` the entries are read as floats (irrational generators).
    """
    try:
        d = int(doc["d"])
        atoms_doc = doc["atoms"]
    except (KeyError, TypeError, ValueError) as e:
        raise MeasureFileError("measure document needs 'd' and 'atoms': %s" % e)
    exact = bool(doc.get("exact", True))
    atoms, weights = [], []
    for ia, a in enumerate(atoms_doc):
        try:
            mat = a["matrix"]
            w = _weight(a["weight"])
        except (KeyError, TypeError, ValueError, ZeroDivisionError) as e:
            raise MeasureFileError("atom %d is malformed: %s" % (ia, e))
        if len(mat) != d or any(len(r) != d for r in mat):
            raise MeasureFileError("atom %d is not a %d x %d matrix" % (ia, d, d))
        try:
            entries = mat if exact else [[float(Fraction(x)) if isinstance(x, str) else float(x)
                                          for x in r] for r in mat]
            atoms.append(GroupElement(entries, word=((ia, 1), ), exact=exact))
        except (PreconditionError, ValueError, ZeroDivisionError, TypeError) as e:
            raise MeasureFileError("atom %d: %s" % (ia, e))
        weights.append(w)
    if len(atoms) == 0:
        raise MeasureFileError("measure document has no atoms")
    try:
        return FiniteMeasure(atoms, weights, nondegenerate=doc.get("nondegenerate"),
                             zariski_dense=doc.get("zariski_dense"))
    except (PreconditionError, EmptyMeasureError) as e:
        raise MeasureFileError(str(e))


def measure_to_dict(mu):
    atoms = []
    for g, w in mu.items():
        if g.exact:
            mat = [[str(x) for x in r] for r in g.entries]
        else:
            mat = g.to_array().tolist()
        atoms.append({"matrix": mat, "weight": str(w) if mu.rational else float(w)})
    doc = {"d": mu.d, "exact": mu.exact, "atoms": atoms}
    if mu.nondegenerate is not None:
        doc["nondegenerate"] = mu.nondegenerate
    if mu.zariski_dense is not None:
        doc["zariski_dense"] = mu.zariski_dense
    return doc


def load_measure(filename):
    try:
        with open(filename, 'r') as f:
            doc = json.load(f)
    except (OSError, ValueError) as e:
        raise MeasureFileError("cannot read measure file %s: %s" % (filename, e))
    return measure_from_dict(doc)


def save_measure(mu, filename):
    write_json(filename, measure_to_dict(mu))


def _to_json(x):
    if isinstance(x, np.ndarray):
        return x.tolist()
    if isinstance(x, np.generic):
        return x.item()
    if isinstance(x, Fraction):
        return str(x)
    raise TypeError("%r is not JSON serializable" % (x, ))


def _atomic(filename, mode, writer):
    dirname = os.path.dirname(os.path.abspath(filename))
    os.makedirs(dirname, exist_ok=True)
    tmp = os.path.join(dirname, ".%s.%d.tmp" % (os.path.basename(filename), os.getpid()))
    try:
        with open(tmp, mode, **({} if 'b' in mode else {"newline": "", "encoding": "utf-8"})) as f:
            writer(f)
            f.flush()
            os.fsync(f.fileno())
        os.replace(tmp, filename)
    finally:
        if os.path.exists(tmp):
            os.remove(tmp)


def write_json(filename, obj):
    _atomic(filename, 'w', lambda f: f.write(json.dumps(obj, indent=2, sort_keys=True, default=_to_json) + "\n"))


def read_json(filename):
    with open(filename, 'r') as f:
        return json.load(f)


def _cell(x):
    if isinstance(x, (float, np.floating)):
        return repr(float(x))
    return x


def write_csv(filename, columns, rows, stamp=True):
    """
    CSV with an optional first line "# generated <UTC time>".

    Floats are written with repr, so identical values give identical bytes.
    """
    def writer(f):
        if stamp:
            f.write("# generated %s\n" % time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime()))
        w = csv.writer(f, lineterminator="\n")
        w.writerow(columns)
        for r in rows:
            w.writerow([_cell(x) for x in r])
    _atomic(filename, 'w', writer)


def read_csv(filename):
    """(columns, rows) with comment lines skipped; cells stay strings."""
    with open(filename, 'r', newline='') as f:
        lines = [l for l in f if not l.startswith('#')]
    rows = list(csv.reader(lines))
    return rows[0], rows[1:]


def write_flag_bank(nu, filename):
    """
    One JSON header line (d, i, n, seed, measure_hash, count, ...) then the
    frames (count, d, i) as raw little-endian float64.
    """
    header = dict(nu.meta)
    header.update({"d": nu.d, "i": nu.i, "count": nu.size, "format": "float64-le"})
    line = json.dumps(header, sort_keys=True, default=_to_json)

    def writer(f):
        f.write(line.encode() + b"\n")
        f.write(np.ascontiguousarray(nu.frames, dtype='<f8').tobytes())
    _atomic(filename, 'wb', writer)


def read_flag_bank(filename):
    with open(filename, 'rb') as f:
        header = json.loads(f.readline().decode())
        data = f.read()
    d, i, count = header["d"], header["i"], header["count"]
    frames = np.frombuffer(data, dtype='<f8')
    if frames.size != count * d * i:
        raise MeasureFileError("flag bank %s holds %d values, expected %d" % (filename, frames.size, count * d * i))
    return EmpiricalMeasure(frames.reshape(count, d, i).astype(float), meta=header)


def _content_lines(filename):
    with open(filename, 'rb') as f:
        return [l for l in f if not l.startswith(b'#')]


def diff_outputs(dir_a, dir_b):
    """
    Relative paths whose contents differ between two output trees.

    Lines starting with '#' (generation stamps) are ignored; a file present
    in only one tree counts as different.
    """
    def files(root):
        out = set()
        for base, _, names in os.walk(root):
            for name in names:
                out.add(os.path.relpath(os.path.join(base, name), root))
        return out
    fa, fb = files(dir_a), files(dir_b)
    diff = sorted(fa ^ fb)
    for rel in sorted(fa & fb):
        if _content_lines(os.path.join(dir_a, rel)) != _content_lines(os.path.join(dir_b, rel)):
            diff.append(rel)
    return sorted(diff)
