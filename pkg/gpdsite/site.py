"""The Moerdijk site of an open groupoid.

Objects are open subgroupoids ``(U, N)`` standing for the sheaves
``<G,U,N>``. A morphism ``(U, N) -> (V, M)`` is an open arrow set ``T`` acting
by precomposition, ``[f] |-> [f o g]`` for ``g`` in T with ``c(g) == d(f)``.
"""

from dataclasses import dataclass
from functools import cached_property, lru_cache
from itertools import combinations
from typing import Iterable, List, NamedTuple, Tuple

from sphinx.util import logging

from gpdsite.eqsheaf import (
    EqMap,
    EqSheaf,
    GunSheaf,
    build_gun,
    compose_eq_maps,
    enumerate_eq_maps,
)
from gpdsite.errors import (
    AmbientMismatch,
    ConditionViolated,
    InconsistentTSet,
    InvalidSubset,
    NoComposableWitness,
    ObjectMismatch,
    UnknownPoint,
)
from gpdsite.fintop import Point, PointSet, lex_key, size_key
from gpdsite.groupoid import (
    FinGroupoid,
    OpenSubgroupoid,
    enumerate_open_subgroupoids,
)

logger = logging.getLogger(__name__)

CONDITIONS = ("open", "domain", "i", "ii", "iii", "iv")


@dataclass(frozen=True)
class SiteObject:
    groupoid: FinGroupoid
    sub: OpenSubgroupoid

    def __hash__(self) -> int:
        return hash((self.groupoid, self.sub))

    @property
    def objects(self) -> PointSet:
        return self.sub.objects

    @property
    def arrows(self) -> PointSet:
        return self.sub.arrows

    @property
    def sheaf(self) -> GunSheaf:
        return _gun(self.groupoid, self.sub)

    def __repr__(self) -> str:
        return f"SiteObject({lex_key(self.objects)}, {lex_key(self.arrows)})"


@lru_cache(maxsize=None)
def _gun(G: FinGroupoid, sub: OpenSubgroupoid) -> GunSheaf:
    return build_gun(G, sub)


def site_object(G: FinGroupoid, sub: OpenSubgroupoid) -> SiteObject:
    return SiteObject(G, sub)


def enumerate_site_objects(G: FinGroupoid) -> List[SiteObject]:
    return [SiteObject(G, sub) for sub in enumerate_open_subgroupoids(G)]


@dataclass(frozen=True)
class TSet:
    source: SiteObject
    target: SiteObject
    arrows: PointSet

    def __post_init__(self) -> None:
        object.__setattr__(self, "arrows", frozenset(self.arrows))

    def __hash__(self) -> int:
        return hash((self.source, self.target, self.arrows))

    @property
    def groupoid(self) -> FinGroupoid:
        return self.source.groupoid

    @property
    def sort_key(self) -> Tuple[Point, ...]:
        return lex_key(self.arrows)

    @cached_property
    def graph(self) -> EqMap:
        return tset_graph(self)

    def __call__(self, element: Point) -> Point:
        return tset_apply(self, element)

    def __repr__(self) -> str:
        return f"TSet({self.source!r} -> {self.target!r}, {lex_key(self.arrows)})"


def is_valid_tset(
    src: SiteObject, tgt: SiteObject, T: Iterable[Point]
) -> List[str]:
    """Names of the failed conditions, in the order of ``CONDITIONS``."""
    G = src.groupoid
    T = frozenset(T)
    if not T <= G.arrows:
        return ["open"]
    (U, N), (V, M) = (src.objects, src.arrows), (tgt.objects, tgt.arrows)
    failed = []
    if not G.arr_space.is_open(T):
        failed.append("open")
    if not T <= G.d.preimage(V):
        failed.append("domain")
    if not G.compose_sets(T, M) <= T:
        failed.append("i")
    if G.c.image(T) != U:
        failed.append("ii")
    if not G.compose_sets(G.inverse_set(T), T) <= M:
        failed.append("iii")
    if not G.compose_sets(N, T) <= T:
        failed.append("iv")
    return failed


def enumerate_tsets(src: SiteObject, tgt: SiteObject) -> List[TSet]:
    if src.groupoid != tgt.groupoid:
        raise AmbientMismatch("site objects live over different groupoids")
    G = src.groupoid
    window = G.d.preimage(tgt.objects) & G.c.preimage(src.objects)
    found = [
        TSet(src, tgt, T)
        for T in G.arr_space.opens_within(window)
        if not is_valid_tset(src, tgt, T)
    ]
    logger.debug(f"{len(found)} T-set(s) {src!r} -> {tgt!r}")
    return found


def tset_apply(t: TSet, element: Point) -> Point:
    """``[f] |-> [f o g]``, checked to be the same for every ``f`` and ``g``."""
    G = t.groupoid
    source, target = t.source.sheaf, t.target.sheaf
    if element not in source.classes:
        raise UnknownPoint(f"'{element}' is not an element of {t.source!r}")
    results = set()
    for f in source.classes[element]:
        for g in t.arrows & G.arrows_into(G.d(f)):
            result = target.quotient.graph.get(G.m[(f, g)])
            if result is None:
                raise InconsistentTSet(f"{f} o {g} is not an arrow out of {t.target!r}")
            results.add(result)
    if not results:
        raise NoComposableWitness(f"no arrow of {lex_key(t.arrows)} composes with {element}")
    if len(results) > 1:
        raise InconsistentTSet(
            f"{element} is sent to several classes: {sorted(results)}"
        )
    return results.pop()


def tset_graph(t: TSet) -> EqMap:
    source = t.source.sheaf
    return EqMap(source, t.target.sheaf, {x: tset_apply(t, x) for x in source.points})


def tset_compose(first: TSet, second: TSet) -> TSet:
    """The T-set of ``second o first``: every ``g1 o g2``, ``g1`` from first, ``g2`` from second."""
    if first.target != second.source:
        raise ObjectMismatch(
            f"cannot compose {first!r} with {second!r}: objects do not match"
        )
    G = first.groupoid
    return TSet(first.source, second.target, G.compose_sets(first.arrows, second.arrows))


def identity_tset(A: SiteObject) -> TSet:
    return TSet(A, A, A.arrows)


def closed_opens(G: FinGroupoid, sub: OpenSubgroupoid) -> List[PointSet]:
    """Opens ``V`` inside U that no arrow of N leaves, smallest first."""
    found = [
        V
        for V in G.obj_space.opens_within(sub.objects)
        if G.c.image(sub.arrows & G.d.preimage(V)) <= V
    ]
    return sorted(found, key=size_key)


@dataclass(frozen=True)
class SubobjectLattice:
    site_object: SiteObject
    opens: Tuple[PointSet, ...]

    def __hash__(self) -> int:
        return hash((self.site_object, self.opens))

    @property
    def sheaf(self) -> GunSheaf:
        return self.site_object.sheaf

    def sub_from_open(self, V: Iterable[Point]) -> PointSet:
        """The classes ``[f]`` with ``d(f)`` in V."""
        V = frozenset(V)
        if V not in self.opens:
            raise InvalidSubset(f"{lex_key(V)} is not a closed open of {self.site_object!r}")
        G = self.site_object.groupoid
        return self.sheaf.quotient.image(G.d.preimage(V))

    def open_from_sub(self, S: Iterable[Point]) -> PointSet:
        """Pull ``S`` back along the canonical section ``x |-> [1_x]``."""
        S = frozenset(S)
        return frozenset(x for x, y in self.sheaf.canonical_section.items() if y in S)

    @property
    def subobjects(self) -> List[PointSet]:
        return [self.sub_from_open(V) for V in self.opens]

    def __len__(self) -> int:
        return len(self.opens)


def subobject_lattice(A: SiteObject) -> SubobjectLattice:
    return SubobjectLattice(A, tuple(closed_opens(A.groupoid, A.sub)))


def sheaf_subobjects(R: EqSheaf) -> List[PointSet]:
    """Open subsets of the total space closed under the action."""
    return sorted(
        (
            S
            for S in R.total_space.opens
            if all(R.act(g, x) in S for (g, x) in R.action if x in S)
        ),
        key=size_key,
    )


class FrameReport(NamedTuple):
    bijective: bool
    round_trip: bool
    monotone: bool
    meets: bool
    joins: bool

    @property
    def holds(self) -> bool:
        return all(self)


def verify_frame_isomorphism(A: SiteObject) -> FrameReport:
    lattice = subobject_lattice(A)
    to_sub, to_open = lattice.sub_from_open, lattice.open_from_sub
    subs = lattice.subobjects
    bijective = sorted(subs, key=size_key) == sheaf_subobjects(A.sheaf)
    round_trip = all(to_open(to_sub(V)) == V for V in lattice.opens) and all(
        to_sub(to_open(S)) == S for S in subs
    )
    pairs = list(combinations(lattice.opens, 2))
    monotone = all(
        to_sub(V) <= to_sub(W) for V, W in pairs if V <= W
    ) and all(to_open(S) <= to_open(P) for S, P in combinations(subs, 2) if S <= P)
    meets = all(to_sub(V & W) == to_sub(V) & to_sub(W) for V, W in pairs)
    joins = all(to_sub(V | W) == to_sub(V) | to_sub(W) for V, W in pairs)
    report = FrameReport(bijective, round_trip, monotone, meets, joins)
    if not report.holds:
        logger.warning(f"subobject frame of {A!r} is not isomorphic: {report}")
    return report


def subobject_site_object(A: SiteObject, V: Iterable[Point]) -> SiteObject:
    """The site object ``(V, N restricted to V)`` presenting the subobject over V."""
    G, V = A.groupoid, frozenset(V)
    if V not in closed_opens(G, A.sub):
        raise InvalidSubset(f"{lex_key(V)} is not a closed open of {A!r}")
    return SiteObject(G, OpenSubgroupoid(V, A.arrows & G.d.preimage(V)))


def subobject_inclusion(A: SiteObject, V: Iterable[Point]) -> TSet:
    G, V = A.groupoid, frozenset(V)
    return TSet(subobject_site_object(A, V), A, A.arrows & G.c.preimage(V))


def partial_tset(src: SiteObject, tgt: SiteObject, T: Iterable[Point]) -> TSet:
    """A T-set with ``c(T)`` inside U, as a morphism out of the subobject over ``c(T)``."""
    G, T = src.groupoid, frozenset(T)
    failed = [name for name in is_valid_tset(src, tgt, T) if name != "ii"]
    if T <= G.arrows and not G.c.image(T) <= src.objects:
        failed.append("ii'")
    if failed:
        raise ConditionViolated(failed)
    return TSet(subobject_site_object(src, G.c.image(T)), tgt, T)


class BijectionReport(NamedTuple):
    holds: bool
    tsets: int
    maps: int
    problems: Tuple[str, ...] = ()


def check_tset_bijection(A: SiteObject, B: SiteObject) -> BijectionReport:
    """Compare the T-sets ``A -> B`` with the brute-force equivariant maps."""
    tsets = enumerate_tsets(A, B)
    maps = enumerate_eq_maps(A.sheaf, B.sheaf)
    problems = []
    graphs = []
    for t in tsets:
        try:
            graphs.append(frozenset(t.graph.graph.items()))
        except (InconsistentTSet, NoComposableWitness) as exc:
            problems.append(f"{t!r}: {exc}")
    if len(set(graphs)) != len(graphs):
        problems.append("distinct T-sets induce the same map")
    if set(graphs) != {frozenset(phi.graph.items()) for phi in maps}:
        problems.append("T-set graphs differ from the equivariant maps")
    return BijectionReport(not problems, len(tsets), len(maps), tuple(problems))


def check_composition_law(first: TSet, second: TSet) -> bool:
    """The product formula agrees with composing the induced maps."""
    composite = tset_compose(first, second)
    if is_valid_tset(composite.source, composite.target, composite.arrows):
        return False
    expected = compose_eq_maps(second.graph, first.graph)
    return composite.graph.graph == expected.graph
