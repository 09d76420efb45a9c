"""The site functor ``I: S_G -> S_H`` along a replete inclusion and its lifts.

``I`` intersects everything with H. ``J`` (``saturate_object``) goes back by
taking the largest open arrow set that meets H inside the given one, and the
comparison ``A -> J(I(A))`` is sent to an identity by ``I``.
"""

from dataclasses import dataclass, field
from typing import Dict, List, Tuple

from sphinx.util import logging

from gpdsite.eqsheaf import EqMap, inverse_eq_map, inverse_image, is_eq_map
from gpdsite.errors import AmbientMismatch, GpdsiteError, InvalidInput
from gpdsite.fintop import PointSet, lex_key
from gpdsite.groupoid import (
    OpenSubgroupoid,
    RepleteInclusion,
    composition_restriction_failures,
    open_subgroupoid,
)
from gpdsite.site import (
    SiteObject,
    TSet,
    enumerate_site_objects,
    enumerate_tsets,
    identity_tset,
    is_valid_tset,
    partial_tset,
    subobject_inclusion,
    tset_compose,
)

logger = logging.getLogger(__name__)


def _require_ambient(inclusion: RepleteInclusion, A: SiteObject) -> None:
    if A.groupoid != inclusion.ambient:
        raise AmbientMismatch(f"{A!r} does not live over the ambient groupoid")


def restrict_object(inclusion: RepleteInclusion, A: SiteObject) -> SiteObject:
    _require_ambient(inclusion, A)
    sub = OpenSubgroupoid(A.objects & inclusion.objects, A.arrows & inclusion.arrows)
    return SiteObject(inclusion.sub, sub)


def pullback_isomorphism(inclusion: RepleteInclusion, A: SiteObject) -> EqMap:
    """``[f]_H |-> (c(f), [f]_N)`` into the pullback of A's sheaf along the inclusion."""
    restricted = restrict_object(inclusion, A).sheaf
    pulled = inverse_image(inclusion.morphism, A.sheaf)
    G = inclusion.ambient
    graph = {}
    for name in restricted.points:
        f = restricted.representative(name)
        graph[name] = (G.c(f), A.sheaf.class_of(f))
    return EqMap(restricted, pulled, graph)


def restrict_tset(inclusion: RepleteInclusion, t: TSet) -> TSet:
    return TSet(
        restrict_object(inclusion, t.source),
        restrict_object(inclusion, t.target),
        t.arrows & inclusion.arrows,
    )


def _largest_open(inclusion: RepleteInclusion, bound: PointSet) -> PointSet:
    """Union of the opens K of G1 with ``K & H1`` inside ``bound``."""
    G, H1 = inclusion.ambient, inclusion.arrows
    return frozenset().union(
        *(K for K in G.arr_space.opens if K & H1 <= bound)
    )


def saturate_object(inclusion: RepleteInclusion, B: SiteObject) -> SiteObject:
    if B.groupoid != inclusion.sub:
        raise AmbientMismatch(f"{B!r} does not live over the subgroupoid")
    G = inclusion.ambient
    N = _largest_open(inclusion, B.arrows)
    U = G.d.image(N) | G.c.image(N)
    return SiteObject(G, open_subgroupoid(G, U, N))


def comparison_vhat(inclusion: RepleteInclusion, A: SiteObject) -> TSet:
    """``A -> J(I(A))`` realised by the arrows of ``J(I(A))`` landing in U."""
    saturated = saturate_object(inclusion, restrict_object(inclusion, A))
    G = A.groupoid
    return TSet(A, saturated, saturated.arrows & G.c.preimage(A.objects))


def comparison_gate(inclusion: RepleteInclusion, A: SiteObject) -> List[str]:
    """Check the comparison against ``[f]_N |-> [f]_Nbar`` and its restriction."""
    vhat = comparison_vhat(inclusion, A)
    if is_valid_tset(vhat.source, vhat.target, vhat.arrows):
        return ["comparison arrows are not a valid T-set"]
    problems = []
    source, target = A.sheaf, vhat.target.sheaf
    for name, block in source.classes.items():
        if vhat.graph(name) != target.class_of(min(block)):
            problems.append(f"comparison moves {name}")
    restricted = restrict_tset(inclusion, vhat)
    if restricted != identity_tset(restricted.source):
        problems.append("comparison is not sent to an identity")
    return problems


@dataclass(frozen=True)
class LiftWitness:
    t_h: TSet
    arrows: PointSet
    s_hat: TSet
    left_leg: TSet
    right_leg: TSet
    restricts_exactly: bool
    legs_identity: bool
    square_commutes: bool

    @property
    def holds(self) -> bool:
        return self.restricts_exactly and self.legs_identity and self.square_commutes


def lift_tset(
    inclusion: RepleteInclusion, A: SiteObject, B: SiteObject, t_h: TSet
) -> LiftWitness:
    """Lift ``t_h: I(A) -> I(B)`` to a morphism from a subobject of A into ``J(I(B))``."""
    restricted_a, restricted_b = restrict_object(inclusion, A), restrict_object(inclusion, B)
    if t_h.source != restricted_a or t_h.target != restricted_b:
        raise InvalidInput(
            f"{t_h!r} does not run between {restricted_a!r} and {restricted_b!r}"
        )
    if is_valid_tset(t_h.source, t_h.target, t_h.arrows):
        raise InvalidInput(f"{t_h!r} is not a valid T-set")
    G = inclusion.ambient
    S = G.c.preimage(A.objects) & _largest_open(inclusion, t_h.arrows)
    right_leg = comparison_vhat(inclusion, B)
    s_hat = partial_tset(A, right_leg.target, S)
    left_leg = subobject_inclusion(A, s_hat.source.objects)

    restricted_s = restrict_tset(inclusion, s_hat)
    legs = (restrict_tset(inclusion, left_leg), restrict_tset(inclusion, right_leg))
    legs_identity = all(leg == identity_tset(leg.source) for leg in legs)
    square_commutes = False
    if legs_identity:
        around = tset_compose(tset_compose(legs[0], t_h), legs[1])
        square_commutes = around.graph.graph == restricted_s.graph.graph
    return LiftWitness(
        t_h,
        S,
        s_hat,
        left_leg,
        right_leg,
        restricts_exactly=S & inclusion.arrows == t_h.arrows and restricted_s == t_h,
        legs_identity=legs_identity,
        square_commutes=square_commutes,
    )


def tset_pullback_coherent(inclusion: RepleteInclusion, t: TSet) -> bool:
    """The restricted map agrees with ``t`` transported along the pullback isomorphisms."""
    restricted = restrict_tset(inclusion, t)
    to_source = pullback_isomorphism(inclusion, t.source)
    to_target = pullback_isomorphism(inclusion, t.target)
    for name in restricted.source.sheaf.points:
        y, element = to_source(name)
        if to_target(restricted(name)) != (y, t(element)):
            return False
    return True


def _is_isomorphism(phi: EqMap) -> bool:
    return is_eq_map(phi) and inverse_eq_map(phi) is not None


@dataclass
class SiteFunctorReport:
    inclusion: RepleteInclusion
    object_map: Dict[SiteObject, SiteObject] = field(default_factory=dict)
    essentially_surjective: bool = True
    essentially_full: bool = True
    pullback_isomorphism: bool = True
    m_intersection: bool = True
    functorial: bool = True
    comparison_gate: bool = True
    witnesses: List[LiftWitness] = field(default_factory=list)
    problems: List[str] = field(default_factory=list)

    @property
    def holds(self) -> bool:
        return (
            self.essentially_surjective
            and self.essentially_full
            and self.pullback_isomorphism
            and self.m_intersection
            and self.functorial
            and self.comparison_gate
        )

    def fail(self, check: str, message: str) -> None:
        setattr(self, check, False)
        self.problems.append(f"{check}: {message}")


def _check_functoriality(
    report: SiteFunctorReport,
    homs: Dict[Tuple[SiteObject, SiteObject], List[TSet]],
    objects: List[SiteObject],
) -> None:
    inclusion = report.inclusion
    for A in objects:
        if restrict_tset(inclusion, identity_tset(A)) != identity_tset(report.object_map[A]):
            report.fail("functorial", f"identity of {A!r} is not preserved")
    for A in objects:
        for B in objects:
            for C in objects:
                for first in homs[(A, B)]:
                    for second in homs[(B, C)]:
                        composite = restrict_tset(inclusion, tset_compose(first, second))
                        expected = tset_compose(
                            restrict_tset(inclusion, first), restrict_tset(inclusion, second)
                        )
                        if composite.graph.graph != expected.graph.graph:
                            report.fail(
                                "functorial", f"{second!r} o {first!r} is not preserved"
                            )
            for t in homs[(A, B)]:
                if not tset_pullback_coherent(inclusion, t):
                    report.fail("functorial", f"{t!r} disagrees with its pullback")


def verify_site_restriction(inclusion: RepleteInclusion) -> SiteFunctorReport:
    """Check that restriction along ``inclusion`` is essentially surjective and full."""
    report = SiteFunctorReport(inclusion)
    objects = enumerate_site_objects(inclusion.ambient)
    report.object_map = {A: restrict_object(inclusion, A) for A in objects}
    logger.info(
        f"restricting {len(objects)} site object(s) to {list(lex_key(inclusion.objects))}"
    )

    for B in enumerate_site_objects(inclusion.sub):
        try:
            if restrict_object(inclusion, saturate_object(inclusion, B)) != B:
                report.fail("essentially_surjective", f"{B!r} is not recovered")
        except GpdsiteError as exc:
            report.fail("essentially_surjective", f"{B!r}: {exc}")

    for A in objects:
        if not _is_isomorphism(pullback_isomorphism(inclusion, A)):
            report.fail("pullback_isomorphism", f"{A!r} is not the pullback sheaf")
        try:
            for problem in comparison_gate(inclusion, A):
                report.fail("comparison_gate", f"{A!r}: {problem}")
        except GpdsiteError as exc:
            report.fail("comparison_gate", f"{A!r}: {exc}")

    failures = composition_restriction_failures(inclusion)
    if failures:
        left, right = failures[0]
        report.fail(
            "m_intersection",
            f"composition does not restrict on {lex_key(left)} x {lex_key(right)}",
        )

    homs = {(A, B): enumerate_tsets(A, B) for A in objects for B in objects}
    _check_functoriality(report, homs, objects)

    for A in objects:
        for B in objects:
            for t_h in enumerate_tsets(report.object_map[A], report.object_map[B]):
                try:
                    witness = lift_tset(inclusion, A, B, t_h)
                except GpdsiteError as exc:
                    report.fail("essentially_full", f"{t_h!r}: {exc}")
                    continue
                report.witnesses.append(witness)
                if not witness.holds:
                    report.fail("essentially_full", f"{t_h!r} does not lift")

    if report.holds:
        logger.info(f"restriction verified with {len(report.witnesses)} lift(s)")
    else:
        logger.warning(f"restriction fails: {report.problems[0]}")
    return report
