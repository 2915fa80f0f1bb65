"""
Command line front end for wittkit.

Every subcommand prints one JSON report on stdout. Exit status is 0 when
the computation succeeded and the tested condition holds, 2 when it
succeeded but the condition fails, and 1 on an input or validation error
(with an error document on stdout).
"""

import argparse
import logging
import sys
from pathlib import Path

from wittkit import __sha1__, __timestamp__, __version__
from wittkit.complex_core import homology_ranks
from wittkit.errors import InvalidArgument, WittkitError
from wittkit.ih_engine import ih_ranks, parse_perversity
from wittkit.indicial_spectral import (
    WeightWindow,
    check_gap_condition,
    circle_spectrum,
    indicial_roots,
    load_spectrum,
    normal_injectivity_certificate,
    rescale_for_gap,
    witt_spectral_check,
)
from wittkit.pipeline import coarsest_for_pairing, prepare
from wittkit.resolution import boundary_defining_ledger, resolve, tree_to_json, validate_ifs
from wittkit.utils import (
    DEFAULT_MODE_CUTOFF,
    DEFAULT_SUBDIVISIONS,
    DEFAULT_TOLERANCE,
    dump_report,
    format_number,
    get_cores,
    load_json,
    parse_rational,
    setup_logger,
)
from wittkit.witt_signature import intersection_pairing, signature_of_form, witt_check

OK, ERROR, FAILED = 0, 1, 2


class _Parser(argparse.ArgumentParser):
    """Reports usage errors as input errors instead of exiting."""

    def error(self, message):
        raise InvalidArgument(message)


def _echo(prepared):
    K = prepared.base
    return {
        "name": K.name,
        "dimension": K.n,
        "subdivisions": prepared.subdivisions,
    }


def _prepare(args):
    return prepare(
        args.input, subdivisions=args.subdivisions, stages={0, 1, 2, 3}, strict=True
    )


def run_check(args, cores):
    prepared = prepare(args.input, subdivisions=0, stages={0, 1, 3})
    K = prepared.base
    report = {
        **_echo(prepared),
        "f_vector": list(K.f_vector),
        "homology_ranks": list(homology_ranks(K, cores=cores)),
        "pseudomanifold": prepared.pseudomanifold.to_json(),
        "strata": prepared.poset.to_json(),
    }
    return report, prepared.pseudomanifold.passed


def run_ih(args, cores):
    prepared = _prepare(args)
    p = parse_perversity(args.perversity, prepared.base.n)
    result = ih_ranks(prepared.complex, prepared.filtration, p, cycles=args.cycles, cores=cores)
    report = {
        **_echo(prepared),
        **result.to_json(include_cycles=args.cycles, K=prepared.complex),
    }
    return report, True


def run_witt(args, cores):
    prepared = _prepare(args)
    witt = witt_check(prepared.complex, prepared.filtration, poset=prepared.poset)
    return {**_echo(prepared), **witt.to_json()}, witt.witt


def run_signature(args, cores):
    prepared = _prepare(args)
    used = coarsest_for_pairing(prepared)
    pairing = intersection_pairing(
        used.complex,
        used.filtration,
        oriented=used.oriented,
        poset=used.poset,
    )
    sig = 0 if pairing.skew else signature_of_form(pairing.matrix)
    report = {
        **_echo(prepared),
        **pairing.to_json(),
        "signature": sig,
        "pairing_subdivisions": used.subdivisions,
    }
    return report, True


def run_resolve(args, cores):
    prepared = _prepare(args)
    tree = resolve(prepared.complex, prepared.filtration, poset=prepared.poset)
    ifs = validate_ifs(tree)
    report = {
        **_echo(prepared),
        **tree_to_json(tree),
        "ledger": boundary_defining_ledger(tree).to_json(),
        "fibration_checks": ifs.to_json(),
    }
    return report, ifs.passed


def _spectrum(args):
    if args.circle is not None:
        text = args.circle.strip()
        if text.endswith("pi"):
            length = parse_rational(text[:-2] or "1")
            return circle_spectrum(length, cutoff=args.cutoff, in_units_of_pi=True)
        return circle_spectrum(float(parse_rational(text)), cutoff=args.cutoff)
    if args.input is None:
        raise InvalidArgument("give a spectrum file or --circle")
    return load_spectrum(load_json(args.input))


def run_indicial(args, cores):
    S = _spectrum(args)
    if args.weight is None:
        raise InvalidArgument("--weight is required for indicial")
    a = parse_rational(args.weight)
    roots = indicial_roots(S, a, exact=True if args.exact else None, tolerance=args.tolerance)
    report = roots.to_json()
    report["cutoff_note"] = S.cutoff_note
    holds = True
    if args.alpha is not None or args.epsilon is not None:
        if args.alpha is None or args.epsilon is None:
            raise InvalidArgument("--alpha and --epsilon go together")
        window = WeightWindow(float(parse_rational(args.alpha)), float(parse_rational(args.epsilon)))
        holds = window.is_clear(roots.shifted, args.tolerance)
        report["window"] = {
            "alpha": window.alpha,
            "epsilon": window.epsilon,
            "hits": window.hits(roots.shifted, args.tolerance),
            "clear": holds,
        }
    return report, holds


def run_gap(args, cores):
    S = _spectrum(args)
    gap = check_gap_condition(S, args.tolerance)
    spectral_witt = witt_spectral_check(S)
    c_max = rescale_for_gap(S, args.tolerance)
    report = {
        "dim_link": S.f0,
        "gap": gap,
        "witt_spectral": spectral_witt,
        "harmonic_betti": list(S.harmonic_betti),
        "c_max": "inf" if c_max == float("inf") else format_number(c_max),
        "cutoff_note": S.cutoff_note,
    }
    holds = gap and spectral_witt
    if args.weight is not None:
        certificate = normal_injectivity_certificate(
            S, parse_rational(args.weight), args.tolerance
        )
        report["certificate"] = certificate.to_json()
        holds = holds and certificate.status != "FAIL"
    return report, holds


COMMANDS = {
    "check": (run_check, "Pseudomanifold and filtration checks."),
    "ih": (run_ih, "Intersection homology ranks for a perversity."),
    "witt": (run_witt, "Witt condition on the links of singular strata."),
    "signature": (run_signature, "Middle intersection pairing and its signature."),
    "resolve": (run_resolve, "Resolution tree with iterated fibration checks."),
    "indicial": (run_indicial, "Indicial root containment set of a link spectrum."),
    "gap": (run_gap, "Gap condition, rescaling and injectivity certificate."),
}


def build_parser():
    parser = _Parser(
        prog="wittkit",
        description="Intersection homology, Witt spaces and resolutions of "
        "stratified pseudomanifolds.",
    )
    subparsers = parser.add_subparsers(dest="command", parser_class=_Parser)
    subparsers.required = True
    for name, (_, help_text) in COMMANDS.items():
        sub = subparsers.add_parser(name, help=help_text, description=help_text)
        required = sub.add_argument_group("required arguments")
        spectral = name in ("indicial", "gap")
        required.add_argument(
            "input",
            nargs="?" if spectral else None,
            help="spectrum-JSON file" if spectral
            else "complex-JSON file or builtin:<name>",
        )
        optional = sub.add_argument_group("optional arguments")
        if name == "ih":
            optional.add_argument(
                "--perversity",
                default="lower-middle",
                help="lower-middle, upper-middle, zero, top or custom:v2,...,vn. "
                "Default is lower-middle.",
            )
            optional.add_argument(
                "--cycles",
                action="store_true",
                help="Include a basis of cycle representatives per degree.",
            )
        if name in ("ih", "witt", "signature", "resolve"):
            optional.add_argument(
                "--subdivisions",
                type=int,
                default=DEFAULT_SUBDIVISIONS,
                help=f"Barycentric subdivisions before computing. Default is {DEFAULT_SUBDIVISIONS}.",
            )
        if spectral:
            optional.add_argument(
                "--circle",
                help="Use the circle of this length instead of a file, e.g. 6.28 or 4pi.",
            )
            optional.add_argument(
                "--cutoff",
                type=int,
                default=DEFAULT_MODE_CUTOFF,
                help=f"Highest circle mode. Default is {DEFAULT_MODE_CUTOFF}.",
            )
            optional.add_argument("--weight", help="Weight a, e.g. 1/2.")
            optional.add_argument(
                "--tolerance",
                type=float,
                default=DEFAULT_TOLERANCE,
                help=f"Absolute tolerance for float comparisons. Default is {DEFAULT_TOLERANCE}.",
            )
        if name == "indicial":
            optional.add_argument("--alpha", help="Centre of the weight window.")
            optional.add_argument("--epsilon", help="Half-width of the window, in (0, 1).")
            optional.add_argument(
                "--exact",
                action="store_true",
                help="Keep roots as exact surds (needs rational input).",
            )
        optional.add_argument("--out", help="Also write the JSON report to this path.")
        optional.add_argument("--log", help="Write the log to this file as well as stderr.")
        optional.add_argument("--verbose", action="store_true", help="Debug logging.")
    return parser


def run(argv=None):
    """
    Parse `argv`, run one subcommand and print its report.

    Returns
    -------
    int
        Exit status.
    """
    try:
        args = build_parser().parse_args(argv)
    except InvalidArgument as e:
        sys.stdout.write(dump_report(e.to_json()))
        return ERROR

    setup_logger(Path(args.log) if args.log else None, "DEBUG" if args.verbose else "INFO")
    logging.info(f"wittkit v{__version__} (commit {__sha1__} on {__timestamp__}).")
    logging.info("All arguments:")
    for k, v in vars(args).items():
        logging.info(f"{k}: {v}")

    handler = COMMANDS[args.command][0]
    try:
        cores = get_cores()
        report, holds = handler(args, cores)
    except WittkitError as e:
        logging.error(f"{args.command} failed with {e.code}: {e.detail}")
        sys.stdout.write(dump_report(e.to_json()))
        return ERROR

    sys.stdout.write(dump_report(report, args.out))
    return OK if holds else FAILED


def main():
    """
    Main entry point for the wittkit command.
    """
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()
