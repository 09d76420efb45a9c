"""The verification suite run by ``check`` and by the report directive."""

from typing import Callable, Dict, Iterable, List, Optional

from sphinx.util import logging

from gpdsite.config import Settings
from gpdsite.eqsheaf import (
    enumerate_eqsheaves,
    gun_cover_check,
    uncovered_points,
    validate_eqsheaf,
)
from gpdsite.errors import GpdsiteError
from gpdsite.fintop import powerset
from gpdsite.galois import verify_galois_laws
from gpdsite.groupoid import (
    FinGroupoid,
    enumerate_open_subgroupoids,
    replete_subgroupoid,
    replete_subsets,
    validate_groupoid,
)
from gpdsite.restrict import verify_site_restriction
from gpdsite.site import (
    check_composition_law,
    check_tset_bijection,
    enumerate_site_objects,
    enumerate_tsets,
    identity_tset,
    tset_compose,
    verify_frame_isomorphism,
)
from gpdsite.cli.report import Check, RunReport

logger = logging.getLogger(__name__)


def subgroupoids_by_filtering(G: FinGroupoid) -> List[frozenset]:
    """Open arrow sets closed under composition and inverse, found without the lattice."""
    found = []
    for N in powerset(G.arrows):
        if not G.arr_space.is_open(N):
            continue
        composites = {G.m[(g, f)] for f in N for g in N if G.d(g) == G.c(f)}
        if composites <= N and {G.i(g) for g in N} <= N:
            found.append(N)
    return found


def _groupoid(G: FinGroupoid, check: Check, settings: Settings) -> None:
    report = validate_groupoid(G)
    check.passed = all(report[:4])
    if not check.passed:
        check.witness = list(report.problems) or report._asdict()


def _subgroupoids(G: FinGroupoid, check: Check, settings: Settings) -> None:
    listed = {sub.arrows for sub in enumerate_open_subgroupoids(G)}
    oracle = set(subgroupoids_by_filtering(G))
    check.passed = listed == oracle
    if not check.passed:
        check.witness = {"listed": len(listed), "oracle": len(oracle)}


def _tset_bijection(G: FinGroupoid, check: Check, settings: Settings) -> None:
    objects = enumerate_site_objects(G)
    for A in objects:
        for B in objects:
            result = check_tset_bijection(A, B)
            if not result.holds:
                check.passed = False
                check.witness = {"source": A, "target": B, "problems": result.problems}
                return


def _composition_law(G: FinGroupoid, check: Check, settings: Settings) -> None:
    objects = enumerate_site_objects(G)
    homs = {(A, B): enumerate_tsets(A, B) for A in objects for B in objects}
    for (A, B), tsets in homs.items():
        for t in tsets:
            neutral = (
                tset_compose(identity_tset(A), t).graph.graph == t.graph.graph
                and tset_compose(t, identity_tset(B)).graph.graph == t.graph.graph
            )
            if not neutral:
                check.passed = False
                check.witness = {"tset": t.arrows, "law": "identity"}
                return
            for C in objects:
                for second in homs[(B, C)]:
                    if not check_composition_law(t, second):
                        check.passed = False
                        check.witness = {"first": t.arrows, "second": second.arrows}
                        return


def _frames(G: FinGroupoid, check: Check, settings: Settings) -> None:
    for A in enumerate_site_objects(G):
        report = verify_frame_isomorphism(A)
        if not report.holds:
            check.passed = False
            check.witness = {"object": A, "report": report._asdict()}
            return


def _generation(G: FinGroupoid, check: Check, settings: Settings) -> None:
    count = 0
    for R in enumerate_eqsheaves(G, settings.sheaf_points):
        count += 1
        if not validate_eqsheaf(G, R).ok or not gun_cover_check(R):
            check.passed = False
            check.witness = {"points": R.points, "uncovered": uncovered_points(R)}
            return
    for A in enumerate_site_objects(G):
        if not gun_cover_check(A.sheaf):
            check.passed = False
            check.witness = {"object": A}
            return
    logger.debug(f"{count} sheaf/sheaves are generated by quotient sheaves")


def _restriction(G: FinGroupoid, check: Check, settings: Settings) -> None:
    for H0 in replete_subsets(G):
        report = verify_site_restriction(replete_subgroupoid(G, H0))
        if not report.holds:
            check.passed = False
            check.witness = {"objects": H0, "problems": report.problems[:5]}
            return


def _domination(G: FinGroupoid, check: Check, settings: Settings) -> None:
    report = verify_galois_laws(G, settings)
    check.passed = report.holds
    if not check.passed:
        check.witness = report.failures[:5]


CheckFn = Callable[[FinGroupoid, Check, Settings], None]

CHECKS: Dict[str, CheckFn] = {
    "groupoid": _groupoid,
    "subgroupoids": _subgroupoids,
    "tset_bijection": _tset_bijection,
    "composition_law": _composition_law,
    "frames": _frames,
    "generation": _generation,
    "restriction": _restriction,
    "domination": _domination,
}


def run_suite(
    G: FinGroupoid,
    settings: Optional[Settings] = None,
    checks: Optional[Iterable[str]] = None,
    report: Optional[RunReport] = None,
    prefix: str = "",
) -> RunReport:
    settings = settings or Settings()
    report = report if report is not None else RunReport("check")
    names = list(CHECKS) if checks is None else list(checks)
    unknown = [name for name in names if name not in CHECKS]
    if unknown:
        raise ValueError(f"unknown check(s): {', '.join(unknown)}")
    for name in names:
        logger.info(f"checking {prefix}{name}")
        with report.timed(prefix + name) as check:
            try:
                CHECKS[name](G, check, settings)
            except GpdsiteError as exc:
                check.passed = False
                check.witness = str(exc)
        if not check.passed:
            logger.warning(f"check {prefix}{name} failed")
    key = prefix.rstrip("/") or "groupoid"
    report.results.setdefault("objects", {})[key] = len(G.objects)
    return report
