"""Geometric domination and the closure it induces on sets of objects.

``x`` dominates ``H0`` when every inclusion ``c^-1(H0) & d^-1(V) <= d^-1(W)``,
for an open subgroupoid ``(U, N)`` and N-closed opens ``V, W`` inside U, also
holds with ``H0`` replaced by ``{x}``. A replete subgroupoid is definable
exactly when its objects are closed under domination.
"""

import random
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Dict, Iterable, List, NamedTuple, Optional, Tuple

from sphinx.util import logging

from gpdsite.config import Settings
from gpdsite.eqsheaf import is_isomorphic, stalk, subterminal_sheaf
from gpdsite.errors import UnknownPoint
from gpdsite.fintop import Point, PointSet, lex_key, ordered, powerset, size_key
from gpdsite.groupoid import (
    FinGroupoid,
    OpenSubgroupoid,
    enumerate_open_subgroupoids,
    is_replete,
    replete_subgroupoid,
    replete_subsets,
    require_open,
)
from gpdsite.site import (
    SiteObject,
    closed_opens,
    enumerate_site_objects,
    subobject_lattice,
)

logger = logging.getLogger(__name__)


class DominationWitness(NamedTuple):
    sub: OpenSubgroupoid
    V: PointSet
    W: PointSet
    arrow: Point


class DominationQuery(NamedTuple):
    x: Point
    objects: PointSet
    result: bool
    witness: Optional[DominationWitness] = None


@lru_cache(maxsize=None)
def _frames(G: FinGroupoid) -> Tuple[Tuple[OpenSubgroupoid, Tuple[PointSet, ...]], ...]:
    """Open subgroupoids, largest first, each with its N-closed opens."""
    subs = sorted(
        enumerate_open_subgroupoids(G),
        key=lambda sub: (-len(sub.arrows), lex_key(sub.arrows)),
    )
    return tuple((sub, tuple(closed_opens(G, sub))) for sub in subs)


def _check_objects(G: FinGroupoid, x: Point, objects: PointSet) -> None:
    unknown = (objects | {x}) - G.objects
    if unknown:
        raise UnknownPoint(f"unknown object(s): {ordered(unknown)}")


def dominates(G: FinGroupoid, x: Point, objects: Iterable[Point]) -> DominationQuery:
    require_open(G)
    objects = frozenset(objects)
    _check_objects(G, x, objects)
    into_h, into_x = G.c.preimage(objects), G.c.preimage({x})
    for sub, opens in _frames(G):
        for V in opens:
            out_of_v = G.d.preimage(V)
            premise, conclusion = into_h & out_of_v, into_x & out_of_v
            for W in opens:
                out_of_w = G.d.preimage(W)
                if premise <= out_of_w and not conclusion <= out_of_w:
                    arrow = min(conclusion - out_of_w)
                    witness = DominationWitness(sub, V, W, arrow)
                    return DominationQuery(x, objects, False, witness)
    return DominationQuery(x, objects, True)


def witness_problems(G: FinGroupoid, query: DominationQuery) -> List[str]:
    """Re-check a negative answer independently of the scan that produced it."""
    if query.result:
        return [] if query.witness is None else ["positive answer carries a witness"]
    if query.witness is None:
        return ["negative answer has no witness"]
    sub, V, W, arrow = query.witness
    problems = []
    if sub not in enumerate_open_subgroupoids(G):
        problems.append("witness is not an open subgroupoid")
    for name, subset in (("V", V), ("W", W)):
        if not (G.obj_space.is_open(subset) and subset <= sub.objects):
            problems.append(f"{name} is not an open inside U")
        elif not G.c.image(sub.arrows & G.d.preimage(subset)) <= subset:
            problems.append(f"{name} is not closed under N")
    if not G.c.preimage(query.objects) & G.d.preimage(V) <= G.d.preimage(W):
        problems.append("premise does not hold")
    if G.c(arrow) != query.x or G.d(arrow) not in V or G.d(arrow) in W:
        problems.append(f"arrow {arrow} does not violate the conclusion")
    return problems


def _hull(subobjects: List[PointSet], points: PointSet) -> PointSet:
    """Smallest subobject containing ``points``; subobjects are closed under meets."""
    hull = frozenset().union(*subobjects)
    for S in subobjects:
        if points <= S:
            hull &= S
    return hull


def dominates_by_stalks(G: FinGroupoid, x: Point, objects: Iterable[Point]) -> bool:
    """Domination read off stalks of the quotient sheaves.

    For every subobject ``P`` of every ``<G,U,N>``, the stalk of ``P`` at ``x``
    must lie in the smallest subobject holding the stalks of ``P`` over H0.
    """
    require_open(G)
    objects = frozenset(objects)
    _check_objects(G, x, objects)
    for A in enumerate_site_objects(G):
        lattice = subobject_lattice(A)
        subobjects = lattice.subobjects
        stalks = {y: stalk(lattice.sheaf, y) for y in objects | {x}}
        for P in subobjects:
            over_h = frozenset().union(*(stalks[y] & P for y in objects))
            if not stalks[x] & P <= _hull(subobjects, over_h):
                return False
    return True



@lru_cache(maxsize=None)
def _closure(G: FinGroupoid, objects: PointSet) -> PointSet:
    return frozenset(x for x in G.objects if dominates(G, x, objects).result)


def gd_closure(G: FinGroupoid, objects: Iterable[Point]) -> PointSet:
    require_open(G)
    objects = frozenset(objects)
    unknown = objects - G.objects
    if unknown:
        raise UnknownPoint(f"unknown object(s): {ordered(unknown)}")
    return _closure(G, objects)


def is_definable(G: FinGroupoid, objects: Iterable[Point]) -> bool:
    objects = frozenset(objects)
    replete_subgroupoid(G, objects)
    return gd_closure(G, objects) == objects


LAWS = (
    "extensive",
    "monotone",
    "idempotent",
    "replete",
    "open_closed",
    "closed_closed",
    "open_iff_arrows_open",
    "open_is_subterminal",
    "trivial_definable",
    "witnesses_sound",
    "formulations_agree",
)


@dataclass
class GaloisReport:
    subsets_scanned: int = 0
    sampled: bool = False
    laws: Dict[str, bool] = field(default_factory=lambda: dict.fromkeys(LAWS, True))
    failures: List[Tuple[str, Tuple[Point, ...]]] = field(default_factory=list)

    @property
    def holds(self) -> bool:
        return all(self.laws.values())

    def fail(self, law: str, subset: Iterable[Point]) -> None:
        self.laws[law] = False
        self.failures.append((law, lex_key(subset)))


def _subsets(G: FinGroupoid, settings: Settings) -> Tuple[List[PointSet], bool]:
    if len(G.objects) <= settings.sample_threshold:
        return list(powerset(G.objects)), False
    rng = random.Random(settings.seed)
    points = ordered(G.objects)
    found = {
        frozenset(x for x in points if rng.random() < 0.5)
        for _ in range(settings.sample_count)
    }
    return sorted(found, key=size_key), True


def _check_subset(G: FinGroupoid, H: PointSet, report: GaloisReport) -> None:
    closure = gd_closure(G, H)
    if not H <= closure:
        report.fail("extensive", H)
    if gd_closure(G, closure) != closure:
        report.fail("idempotent", H)
    if not is_replete(G, closure):
        report.fail("replete", H)
    for x in ordered(G.objects - H):
        if not closure <= gd_closure(G, H | {x}):
            report.fail("monotone", H)
            break
    for x in ordered(G.objects):
        query = dominates(G, x, H)
        if witness_problems(G, query):
            report.fail("witnesses_sound", H)
        if dominates_by_stalks(G, x, H) != query.result:
            report.fail("formulations_agree", H)


def _check_replete(G: FinGroupoid, H: PointSet, report: GaloisReport) -> None:
    arrows = G.d.preimage(H)
    open_objects = G.obj_space.is_open(H)
    if open_objects != G.arr_space.is_open(arrows):
        report.fail("open_iff_arrows_open", H)
    if open_objects:
        if gd_closure(G, H) != H:
            report.fail("open_closed", H)
        A = SiteObject(G, OpenSubgroupoid(H, arrows))
        if not is_isomorphic(A.sheaf, subterminal_sheaf(G, H)):
            report.fail("open_is_subterminal", H)
    if G.obj_space.is_closed(H) and gd_closure(G, H) != H:
        report.fail("closed_closed", H)


def verify_galois_laws(G: FinGroupoid, settings: Optional[Settings] = None) -> GaloisReport:
    """Closure-operator laws of domination over every subset, or a seeded sample."""
    settings = settings or Settings()
    require_open(G)
    subsets, sampled = _subsets(G, settings)
    report = GaloisReport(len(subsets), sampled)
    for H in subsets:
        _check_subset(G, H, report)
    for H in replete_subsets(G):
        _check_replete(G, H, report)
    for H in (frozenset(), G.objects):
        if not is_definable(G, H):
            report.fail("trivial_definable", H)
    if report.holds:
        logger.info(f"closure laws hold over {report.subsets_scanned} subset(s)")
    else:
        law, subset = report.failures[0]
        logger.warning(f"closure law '{law}' fails at {list(subset)}")
    return report
