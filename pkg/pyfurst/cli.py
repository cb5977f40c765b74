
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
Command line driver.

    pyfurst sweep --config run.json --seed 7 --out results --threads 4

The subcommand selects the stage; ``--stage`` (or ``PYFURST_STAGE``) is
accepted when no subcommand is given. Exit status is 0 on success, 1 when a
stage or a verification check fails and 2 on configuration errors.
"""

import os
import sys
import argparse
from .config import STAGES, ENV_PREFIX, load_config, default_config_path
from .errors import ConfigError
from .experiment import run_stage


def build_parser():
    parser = argparse.ArgumentParser(
        prog="pyfurst",
        description="Random walks on SL(d, R): spectra, harmonic measures, entropies and dimensions.",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="Environment overrides: %sCONFIG, %sSEED, %sOUT, %sTHREADS, %sSTAGE." % ((ENV_PREFIX, ) * 5))
    parser.add_argument("command", nargs="?", choices=STAGES, help="stage to run")
    parser.add_argument("--config", metavar="PATH", default=None,
                        help="experiment configuration (JSON); default: the shipped Sanov configuration")
    parser.add_argument("--seed", type=int, default=None, help="master seed (unsigned 64-bit)")
    parser.add_argument("--out", metavar="DIR", default=None, help="output directory")
    parser.add_argument("--threads", type=int, default=None, help="worker threads")
    parser.add_argument("--stage", metavar="NAME", default=None, help="stage to run (alternative to COMMAND)")
    parser.add_argument("--iprint", type=int, default=None, help="verbosity (0, 1 or 2)")
    return parser


def config_path(args, environ):
    if args.config is not None:
        return args.config
    return environ.get(ENV_PREFIX + "CONFIG", default_config_path())


def main(argv=None, environ=None):
    environ = os.environ if environ is None else environ
    args = build_parser().parse_args(argv)
    try:
        config = load_config(config_path(args, environ))
        config.apply_overrides(seed=args.seed, output=args.out, threads=args.threads,
                               stage=args.stage, environ=environ)
        if args.command is not None:
            config.select_stage(args.command)
        if config.stage is None:
            raise ConfigError("no stage selected (give a subcommand or --stage)")
        if args.iprint is not None:
            config.iprint = args.iprint
        config.apply_settings()
    except (ConfigError, ValueError, KeyError) as e:
        print("pyfurst: configuration error: %s" % e, file=sys.stderr)
        return 2
    try:
        rep = run_stage(config, config.stage)
    except Exception as e:
        print("pyfurst: stage %s failed: %s: %s" % (config.stage, type(e).__name__, e), file=sys.stderr)
        return 1
    if config.stage == "verify":
        status, results = rep
        n_pass = sum(r["passed"] for r in results["checks"])
        print("verify: %d / %d checks passed" % (n_pass, len(results["checks"])))
        return status
    if config.stage == "claims" and not rep["passed"]:
        return 1
    print("%s: reports written to %s" % (config.stage, config.output))
    return 0


if __name__ == "__main__":
    sys.exit(main())
