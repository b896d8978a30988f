"""Command-line interface: orbits, verify, chi-dependence.

Models are selected by fixture id or by path to a TOML file; the
directory in PLECTIC_CM_MODEL_DIR is searched as well.  Every command
prints a human-readable table and can additionally write the full JSON
report; the exit status is 0 exactly when no check failed.
"""

from __future__ import annotations

import argparse
import sys
from typing import Optional, Sequence

from .config import MODEL_DIR_ENV, available_models, load_model
from .errors import PlecticError
from .verify import SUITES, Report, cmd_chi_dependence, cmd_orbits, cmd_verify


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="plectic-cm",
        description=(
            "Exhaustive desk-scale verification of plectic Galois actions "
            "on finite CM models.  Known models: "
            + (", ".join(sorted(available_models())) or "none")
            + f".  Extra models are read from ${MODEL_DIR_ENV}."
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)

    orbits = sub.add_parser("orbits", help="orbit decomposition of the CM types")
    orbits.add_argument("--model", required=True, help="model id or path to a TOML file")
    orbits.add_argument("--group", choices=["galois", "plectic", "both"], default="both",
                        help="which group acts (default: both)")
    orbits.add_argument("--json", metavar="OUT", help="also write the JSON report here")

    verify = sub.add_parser("verify", help="run a verification suite")
    verify.add_argument("--model", required=True, help="model id or path to a TOML file")
    verify.add_argument("--suite", choices=list(SUITES) + ["all"], default="all",
                        help="which suite to run (default: all)")
    verify.add_argument("--json", metavar="OUT", help="also write the JSON report here")

    chi = sub.add_parser("chi-dependence",
                         help="probe how outputs depend on the choice of splitting")
    chi.add_argument("--model", required=True, help="model id or path to a TOML file")
    chi.add_argument("--json", metavar="OUT", help="also write the JSON report here")

    return parser


def _emit(report: Report, json_path: Optional[str]) -> int:
    print(report.to_table())
    if json_path:
        with open(json_path, "w", encoding="utf-8") as fh:
            fh.write(report.to_json() + "\n")
        print(f"   report written to {json_path}")
    return report.exit_code()


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        bundle = load_model(args.model)
        if args.command == "orbits":
            report = cmd_orbits(bundle, args.group)
        elif args.command == "verify":
            suites = SUITES if args.suite == "all" else (args.suite,)
            report = cmd_verify(bundle, suites)
        else:
            report = cmd_chi_dependence(bundle)
    except PlecticError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return _emit(report, args.json)


if __name__ == "__main__":
    sys.exit(main())
