"""Command line entry point: ``gpdsite COMMAND FILE ...``.

``FILE`` is a groupoid description file, or ``preset:SPEC`` for a generated
groupoid. Exit codes: 0 success, 1 a check failed, 2 bad input.
"""

import argparse
import logging
import sys
from typing import List, Optional, Sequence, Tuple

from sphinx.util import logging as sphinx_logging

from gpdsite import __version__
from gpdsite.config import REPORT_FORMATS, Settings
from gpdsite.eqsheaf import enumerate_eq_maps
from gpdsite.errors import GpdsiteError
from gpdsite.galois import dominates, gd_closure, is_definable
from gpdsite.groupoid import (
    FinGroupoid,
    enumerate_open_subgroupoids,
    replete_subgroupoid,
    subgroupoid_on,
    validate_groupoid,
)
from gpdsite.restrict import verify_site_restriction
from gpdsite.site import (
    SiteObject,
    check_tset_bijection,
    enumerate_site_objects,
    enumerate_tsets,
    subobject_lattice,
    verify_frame_isomorphism,
)
from gpdsite.cli.fileformat import read_groupoid, serialize_groupoid
from gpdsite.cli.presets import corpus, generate_preset
from gpdsite.cli.report import RunReport
from gpdsite.cli.suite import CHECKS, run_suite, subgroupoids_by_filtering

logger = sphinx_logging.getLogger(__name__)

EXIT_OK, EXIT_FAILED, EXIT_BAD_INPUT = 0, 1, 2
PRESET_PREFIX = "preset:"


def _atoms(argument: str) -> List[str]:
    """``a,b`` as a list; ``-`` is the empty list."""
    if argument.strip() in ("", "-"):
        return []
    return [atom.strip() for atom in argument.split(",") if atom.strip()]


def _checks(argument: str) -> List[str]:
    names = _atoms(argument)
    unknown = [name for name in names if name not in CHECKS]
    if unknown:
        raise argparse.ArgumentTypeError(f"unknown check(s): {', '.join(unknown)}")
    return names


def load(source: str, settings: Settings) -> FinGroupoid:
    if source.startswith(PRESET_PREFIX):
        return generate_preset(source[len(PRESET_PREFIX):], settings)
    return read_groupoid(source)


def _site_object(G: FinGroupoid, argument: str) -> SiteObject:
    return SiteObject(G, subgroupoid_on(G, _atoms(argument)))


def cmd_validate(G: FinGroupoid, args, settings: Settings, report: RunReport) -> None:
    result = validate_groupoid(G)
    report.results["report"] = result._asdict()
    report.add("axioms", result.axioms_ok, list(result.problems) or None)
    report.add("continuity", result.continuity_ok)
    report.add("open", result.is_open)
    report.add("composition_open", result.composition_open)


def cmd_subgroupoids(G: FinGroupoid, args, settings: Settings, report: RunReport) -> None:
    subs = enumerate_open_subgroupoids(G)
    report.results["subgroupoids"] = subs
    report.results["count"] = len(subs)
    oracle = subgroupoids_by_filtering(G)
    report.add("oracle", {sub.arrows for sub in subs} == set(oracle), len(oracle))


def cmd_site(G: FinGroupoid, args, settings: Settings, report: RunReport) -> None:
    objects = enumerate_site_objects(G)
    report.results["objects"] = [
        {"object": A, "elements": len(A.sheaf.points)} for A in objects
    ]
    report.results["homs"] = [
        [len(enumerate_tsets(A, B)) for B in objects] for A in objects
    ]


def cmd_hom(G: FinGroupoid, args, settings: Settings, report: RunReport) -> None:
    A, B = _site_object(G, args.source), _site_object(G, args.target)
    tsets = enumerate_tsets(A, B)
    report.results["tsets"] = [
        {"arrows": t.arrows, "graph": t.graph.graph} for t in tsets
    ]
    report.results["maps"] = len(enumerate_eq_maps(A.sheaf, B.sheaf))
    result = check_tset_bijection(A, B)
    report.add("oracle", result.holds, list(result.problems) or None)


def cmd_subobjects(G: FinGroupoid, args, settings: Settings, report: RunReport) -> None:
    A = _site_object(G, args.object)
    lattice = subobject_lattice(A)
    report.results["subobjects"] = [
        {"open": V, "elements": lattice.sub_from_open(V)} for V in lattice.opens
    ]
    frame = verify_frame_isomorphism(A)
    report.add("frame", frame.holds, None if frame.holds else frame._asdict())


def cmd_restrict(G: FinGroupoid, args, settings: Settings, report: RunReport) -> None:
    result = verify_site_restriction(replete_subgroupoid(G, _atoms(args.h0)))
    report.results["lifts"] = len(result.witnesses)
    for name in (
        "essentially_surjective",
        "essentially_full",
        "pullback_isomorphism",
        "m_intersection",
        "functorial",
        "comparison_gate",
    ):
        passed = getattr(result, name)
        witness = None
        if not passed:
            witness = [p for p in result.problems if p.startswith(name + ":")][:5]
        report.add(name, passed, witness)


def cmd_closure(G: FinGroupoid, args, settings: Settings, report: RunReport) -> None:
    objects = _atoms(args.set)
    report.results["closure"] = gd_closure(G, objects)
    report.results["witnesses"] = {
        str(x): query.witness
        for x in sorted(G.objects)
        for query in [dominates(G, x, objects)]
        if not query.result
    }


def cmd_definable(G: FinGroupoid, args, settings: Settings, report: RunReport) -> None:
    objects = _atoms(args.set)
    report.results["definable"] = is_definable(G, objects)
    report.results["closure"] = gd_closure(G, objects)


def cmd_check(G: FinGroupoid, args, settings: Settings, report: RunReport) -> None:
    run_suite(G, settings, args.checks, report)


COMMANDS = {
    "validate": cmd_validate,
    "subgroupoids": cmd_subgroupoids,
    "site": cmd_site,
    "hom": cmd_hom,
    "subobjects": cmd_subobjects,
    "restrict": cmd_restrict,
    "closure": cmd_closure,
    "definable": cmd_definable,
    "check": cmd_check,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=None, help="seed for generators")
    common.add_argument("--format", choices=REPORT_FORMATS, default=None)
    verbosity = common.add_mutually_exclusive_group()
    verbosity.add_argument("-v", "--verbose", action="store_true")
    verbosity.add_argument("-q", "--quiet", action="store_true")

    parser = argparse.ArgumentParser(
        prog="gpdsite", description="Finite open groupoids and their Moerdijk sites"
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="cmd", required=True)

    for name in ("validate", "subgroupoids", "site"):
        p = sub.add_parser(name, parents=[common])
        p.add_argument("file")

    p = sub.add_parser("hom", parents=[common], help="T-sets between two site objects")
    p.add_argument("file")
    p.add_argument("source", help="arrows of N, comma separated, '-' for none")
    p.add_argument("target", help="arrows of M, comma separated, '-' for none")

    p = sub.add_parser("subobjects", parents=[common])
    p.add_argument("file")
    p.add_argument("object", help="arrows of N, comma separated, '-' for none")

    p = sub.add_parser("restrict", parents=[common])
    p.add_argument("file")
    p.add_argument("--h0", required=True, help="objects of the replete subgroupoid")

    for name in ("closure", "definable"):
        p = sub.add_parser(name, parents=[common])
        p.add_argument("file")
        p.add_argument("--set", required=True, help="objects, comma separated")

    p = sub.add_parser("check", parents=[common], help="run the verification suite")
    p.add_argument("file", nargs="?")
    selection = p.add_mutually_exclusive_group()
    selection.add_argument("--all", dest="checks", action="store_const", const=None)
    selection.add_argument("--checks", type=_checks, help=", ".join(CHECKS))
    p.add_argument("--corpus", action="store_true", help="run over the preset corpus")
    p.add_argument(
        "--sheaf-points", type=int, default=None, help="total-space bound for generation"
    )

    p = sub.add_parser("gen", parents=[common], help="write a preset as a file")
    p.add_argument("spec")
    p.add_argument("-o", "--output", default="-")
    p.add_argument("--max-obj", type=int, default=None)
    p.add_argument("--max-arrows", type=int, default=None)
    return parser


def configure_logging(verbose: bool, quiet: bool) -> None:
    level = logging.DEBUG if verbose else logging.WARNING if quiet else logging.INFO
    # the Sphinx application replaces these handlers when it sets up logging
    root = logging.getLogger("sphinx")
    root.setLevel(level)
    root.propagate = False
    if not any(getattr(h, "_gpdsite", False) for h in root.handlers):
        handler = logging.StreamHandler(sys.stderr)
        handler.setFormatter(logging.Formatter("%(levelname)s: %(message)s"))
        handler._gpdsite = True
        root.addHandler(handler)


def _gen(args, settings: Settings) -> Tuple[int, RunReport]:
    report = RunReport(f"gen {args.spec}", settings.report_format)
    G = generate_preset(args.spec, settings)
    text = serialize_groupoid(G)
    if args.output == "-":
        # the file itself is the output
        sys.stdout.write(text)
        return EXIT_OK, report
    with open(args.output, "w") as f:
        f.write(text)
    report.results.update(output=args.output, objects=len(G.objects), arrows=len(G.arrows))
    return EXIT_OK, report


def _corpus(args, settings: Settings) -> Tuple[int, RunReport]:
    report = RunReport("check --corpus", settings.report_format)
    for name, G in corpus(settings):
        run_suite(G, settings, args.checks, report, prefix=f"{name}/")
    return (EXIT_OK if report.passed else EXIT_FAILED), report


def run_command(argv: Optional[Sequence[str]] = None) -> Tuple[int, RunReport]:
    parser = build_parser()
    args = parser.parse_args(argv)
    configure_logging(args.verbose, args.quiet)
    settings = Settings().updated(seed=args.seed, report_format=args.format)
    if args.cmd == "gen":
        settings = settings.updated(
            random_max_objects=args.max_obj, random_max_arrows=args.max_arrows
        )
    if args.cmd == "check":
        settings = settings.updated(sheaf_points=args.sheaf_points)

    try:
        if args.cmd == "gen":
            return _gen(args, settings)
        if args.cmd == "check" and args.corpus:
            return _corpus(args, settings)
        if args.file is None:
            parser.error(f"{args.cmd} needs a groupoid file")
        report = RunReport(f"{args.cmd} {args.file}", settings.report_format)
        G = load(args.file, settings)
        COMMANDS[args.cmd](G, args, settings, report)
    except OSError as exc:
        logger.error(f"cannot read input: {exc}")
        return EXIT_BAD_INPUT, RunReport(args.cmd, settings.report_format)
    except GpdsiteError as exc:
        logger.error(f"{exc.category}: {exc}")
        return EXIT_BAD_INPUT, RunReport(args.cmd, settings.report_format)
    return (EXIT_OK if report.passed else EXIT_FAILED), report


def main(argv: Optional[Sequence[str]] = None) -> None:
    code, report = run_command(argv)
    if report.checks or report.results:
        sys.stdout.write(report.render())
    sys.exit(code)


if __name__ == "__main__":
    main()
