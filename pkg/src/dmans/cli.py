"""Command-line entry point: dmans eos|stars|fit|contour.

Exit codes: 0 success, 2 validation failure (causality or monotonicity),
3 solver non-convergence.
"""

import argparse
import sys

from .dm import DMError
from .eos import CausalityError, MonotonicityError
from .perturbations import PerturbationError
from .rmf import NonConvergence, RMFError
from .tov import TOVError
from . import workbench


def build_parser():
    ap = argparse.ArgumentParser(
        prog="dmans",
        description="Neutron-star structure workbench with dark-matter "
                    "admixture: EOS tables, stellar sequences, universal-"
                    "relation fits and M-R frequency contours.")
    sub = ap.add_subparsers(dest="command", required=True)
    for name, doc in (("eos", "emit unified EOS tables"),
                      ("stars", "emit stellar sequences"),
                      ("fit", "fit universal relations"),
                      ("contour", "emit M-R frequency contour")):
        sp = sub.add_parser(name, help=doc)
        sp.add_argument("--config", required=True)
        sp.add_argument("--model", action="append", default=[],
                        help="extra model file or bundled name (repeatable)")
        sp.add_argument("--kf-dm", action="append", type=float, default=[],
                        help="DM Fermi momentum in GeV (repeatable)")
        sp.add_argument("--out", default=None, help="output directory")
        sp.add_argument("--allow-acausal", action="store_true")
        if name == "fit":
            sp.add_argument("--self-test", action="store_true",
                            help="exact-recovery least-squares check")
        if name == "contour":
            sp.add_argument("--fits", default=None,
                            help="reuse a fits.csv from a previous run")
    return ap


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        cfg = workbench.load_config(args.config)
        if args.model:
            cfg.model_files += [workbench.resolve_model(m) for m in args.model]
        if args.kf_dm:
            cfg.kf_dm_list = args.kf_dm
        if args.out:
            cfg.output_dir = args.out
        if args.allow_acausal:
            cfg.allow_acausal = True
        cfg.validate()

        if args.command == "eos":
            paths = workbench.cmd_eos(cfg)
        elif args.command == "stars":
            paths = workbench.cmd_stars(cfg)
        elif args.command == "fit":
            if args.self_test:
                workbench.cmd_fit(cfg, self_test=True)
                return 0
            paths = workbench.cmd_fit(cfg)
        else:
            paths = workbench.cmd_contour(cfg, fits_file=args.fits)
        for p in paths:
            print(p)
        return 0
    except (CausalityError, MonotonicityError) as exc:
        print(f"validation failure: {exc}", file=sys.stderr)
        return 2
    except (NonConvergence, RMFError, TOVError, PerturbationError,
            DMError) as exc:
        print(f"solver failure: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
