"""Groupoid objects in finite spaces.

Arrows compose as ``m(g2, g1) = g2 o g1``, defined exactly when
``d(g2) == c(g1)``.
"""

from dataclasses import dataclass
from functools import cached_property, lru_cache
from typing import Dict, FrozenSet, Iterable, List, Mapping, NamedTuple, Optional, Tuple

import networkx as nx
from sphinx.util import logging

from gpdsite.errors import (
    InvalidSubgroupoid,
    InvalidSubset,
    NotOpenGroupoid,
    NotReplete,
)
from gpdsite.fintop import (
    CtsMap,
    FinSpace,
    Point,
    PointSet,
    fiber_product,
    inclusion_map,
    is_continuous,
    is_open_map,
    lex_key,
    ordered,
    subspace,
)

logger = logging.getLogger(__name__)

Pair = Tuple[Point, Point]


@dataclass(frozen=True)
class FinGroupoid:
    obj_space: FinSpace
    arr_space: FinSpace
    d: CtsMap
    c: CtsMap
    e: CtsMap
    i: CtsMap
    m: Mapping[Pair, Point]

    def __post_init__(self) -> None:
        object.__setattr__(self, "m", dict(self.m))

    def __hash__(self) -> int:
        return hash(
            (
                self.obj_space,
                self.arr_space,
                self.d,
                self.c,
                self.e,
                self.i,
                frozenset(self.m.items()),
            )
        )

    @property
    def objects(self) -> PointSet:
        return self.obj_space.points

    @property
    def arrows(self) -> PointSet:
        return self.arr_space.points

    def compose(self, second: Point, first: Point) -> Point:
        return self.m[(second, first)]

    @cached_property
    def _by_codomain(self) -> Dict[Point, PointSet]:
        grouped = {x: set() for x in self.objects}
        for g in self.arrows:
            grouped[self.c(g)].add(g)
        return {x: frozenset(arrows) for x, arrows in grouped.items()}

    @cached_property
    def _by_domain(self) -> Dict[Point, PointSet]:
        grouped = {x: set() for x in self.objects}
        for g in self.arrows:
            grouped[self.d(g)].add(g)
        return {x: frozenset(arrows) for x, arrows in grouped.items()}

    def arrows_into(self, y: Point) -> PointSet:
        return self._by_codomain.get(y, frozenset())

    def arrows_from(self, x: Point) -> PointSet:
        return self._by_domain.get(x, frozenset())

    def hom(self, x: Point, y: Point) -> PointSet:
        return self.arrows_from(x) & self.arrows_into(y)

    @cached_property
    def composable(self) -> FrozenSet[Pair]:
        return frozenset(
            (second, first)
            for first in self.arrows
            for second in self.arrows_from(self.c(first))
        )

    @cached_property
    def composable_space(self) -> FinSpace:
        space, _, _ = fiber_product(self.d, self.c)
        return space

    def compose_sets(self, seconds: Iterable[Point], firsts: Iterable[Point]) -> PointSet:
        """``m(A x_G0 B)``: every composite ``a o b`` with ``a`` in A, ``b`` in B."""
        seconds = frozenset(seconds)
        return frozenset(
            self.m[(second, first)]
            for first in firsts
            for second in self.arrows_from(self.c(first)) & seconds
        )

    def inverse_set(self, arrows: Iterable[Point]) -> PointSet:
        return self.i.image(arrows)

    @cached_property
    def iso_classes(self) -> List[PointSet]:
        graph = nx.Graph()
        graph.add_nodes_from(self.objects)
        graph.add_edges_from((self.d(g), self.c(g)) for g in self.arrows)
        return sorted(
            (frozenset(component) for component in nx.connected_components(graph)),
            key=lex_key,
        )


def build_groupoid(
    obj_space: FinSpace,
    arr_space: FinSpace,
    dom: Mapping[Point, Point],
    cod: Mapping[Point, Point],
    unit: Mapping[Point, Point],
    inverse: Mapping[Point, Point],
    compose: Mapping[Pair, Point],
) -> FinGroupoid:
    return FinGroupoid(
        obj_space,
        arr_space,
        CtsMap(arr_space, obj_space, dom),
        CtsMap(arr_space, obj_space, cod),
        CtsMap(obj_space, arr_space, unit),
        CtsMap(arr_space, arr_space, inverse),
        compose,
    )


class GroupoidReport(NamedTuple):
    axioms_ok: bool
    continuity_ok: bool
    is_open: bool
    composition_open: bool
    problems: Tuple[str, ...] = ()


def _axiom_problems(G: FinGroupoid) -> List[str]:
    d, c, e, i, m = G.d, G.c, G.e, G.i, G.m
    problems = []
    for x in ordered(G.objects):
        if d(e(x)) != x or c(e(x)) != x:
            problems.append(f"identity of {x} is not an endo-arrow of {x}")
    missing = G.composable - set(m)
    extra = set(m) - G.composable
    for second, first in sorted(missing):
        problems.append(f"composite {second} o {first} is missing")
    for second, first in sorted(extra):
        problems.append(f"composite {second} o {first} is not composable")
    for (second, first), h in sorted(m.items()):
        if (second, first) in extra:
            continue
        if h not in G.arrows or d(h) != d(first) or c(h) != c(second):
            problems.append(f"composite {second} o {first} has wrong endpoints")
    for g in ordered(G.arrows):
        if m.get((g, e(d(g)))) != g or m.get((e(c(g)), g)) != g:
            problems.append(f"unit law fails at {g}")
        if i(i(g)) != g:
            problems.append(f"inverse of the inverse of {g} is not {g}")
        if d(i(g)) != c(g) or c(i(g)) != d(g):
            problems.append(f"inverse of {g} has wrong endpoints")
        elif m.get((i(g), g)) != e(d(g)) or m.get((g, i(g))) != e(c(g)):
            problems.append(f"inverse law fails at {g}")
    if missing or extra:
        return problems
    for second, first in sorted(G.composable):
        inner = m[(second, first)]
        for third in ordered(G.arrows_from(c(second))):
            left = m.get((m[(third, second)], first))
            if left is None or left != m.get((third, inner)):
                problems.append(f"associativity fails at {third}, {second}, {first}")
    return problems


@lru_cache(maxsize=None)
def validate_groupoid(G: FinGroupoid) -> GroupoidReport:
    problems = _axiom_problems(G)
    continuity_ok = all(is_continuous(f) for f in (G.d, G.c, G.e, G.i))
    composition_open = False
    if set(G.m) == G.composable and set(G.m.values()) <= G.arrows:
        space = G.composable_space
        composition = CtsMap(space, G.arr_space, {p: G.m[p] for p in space.points})
        continuity_ok = continuity_ok and is_continuous(composition)
        composition_open = is_open_map(composition)
    else:
        continuity_ok = False
    is_open = is_open_map(G.d) and is_open_map(G.c)
    if is_open and not composition_open:
        logger.warning("open groupoid with a composition that is not open")
    return GroupoidReport(
        axioms_ok=not problems,
        continuity_ok=continuity_ok,
        is_open=is_open,
        composition_open=composition_open,
        problems=tuple(problems),
    )


def require_open(G: FinGroupoid) -> None:
    report = validate_groupoid(G)
    if not report.axioms_ok:
        raise NotOpenGroupoid(
            "groupoid axioms fail: " + "; ".join(report.problems[:3])
        )
    if not report.continuity_ok:
        raise NotOpenGroupoid("structure maps are not continuous")
    if not report.is_open:
        raise NotOpenGroupoid("domain and codomain maps are not open")


@dataclass(frozen=True)
class OpenSubgroupoid:
    """A pair ``(U, N)``: an open arrow set closed under m and i over U."""

    objects: PointSet
    arrows: PointSet

    @property
    def sort_key(self):
        return lex_key(self.arrows), lex_key(self.objects)

    def __lt__(self, other: "OpenSubgroupoid") -> bool:
        return self.sort_key < other.sort_key

    def __repr__(self) -> str:
        return f"OpenSubgroupoid({lex_key(self.objects)}, {lex_key(self.arrows)})"


def subgroupoid_problems(
    G: FinGroupoid, objects: Iterable[Point], arrows: Iterable[Point]
) -> List[str]:
    objects, arrows = frozenset(objects), frozenset(arrows)
    problems = []
    if not arrows <= G.arrows or not objects <= G.objects:
        return ["not a subset of the groupoid"]
    if not G.arr_space.is_open(arrows):
        problems.append("arrow set is not open")
    if not G.compose_sets(arrows, arrows) <= arrows:
        problems.append("arrow set is not closed under composition")
    if not G.inverse_set(arrows) <= arrows:
        problems.append("arrow set is not closed under inverse")
    if G.d.image(arrows) != objects or G.c.image(arrows) != objects:
        problems.append("objects are not the domains and codomains of the arrows")
    return problems


def open_subgroupoid(
    G: FinGroupoid, objects: Iterable[Point], arrows: Iterable[Point]
) -> OpenSubgroupoid:
    problems = subgroupoid_problems(G, objects, arrows)
    if problems:
        raise InvalidSubgroupoid("; ".join(problems))
    return OpenSubgroupoid(frozenset(objects), frozenset(arrows))


def subgroupoid_on(G: FinGroupoid, arrows: Iterable[Point]) -> OpenSubgroupoid:
    """The open subgroupoid ``(d(N), N)``."""
    arrows = frozenset(arrows)
    return open_subgroupoid(G, G.d.image(arrows), arrows)


@lru_cache(maxsize=None)
def _open_subgroupoids(G: FinGroupoid) -> Tuple[OpenSubgroupoid, ...]:
    found = []
    for arrows in G.arr_space.sorted_opens:
        if G.compose_sets(arrows, arrows) <= arrows and G.inverse_set(arrows) <= arrows:
            found.append(OpenSubgroupoid(G.d.image(arrows), arrows))
    logger.debug(
        f"{len(found)} open subgroupoid(s) among {len(G.arr_space.opens)} open arrow sets"
    )
    return tuple(found)


def enumerate_open_subgroupoids(G: FinGroupoid) -> List[OpenSubgroupoid]:
    require_open(G)
    return list(_open_subgroupoids(G))


@dataclass(frozen=True)
class GroupoidMorphism:
    source: FinGroupoid
    target: FinGroupoid
    f0: CtsMap
    f1: CtsMap


def identity_morphism(G: FinGroupoid) -> GroupoidMorphism:
    return GroupoidMorphism(
        G,
        G,
        CtsMap(G.obj_space, G.obj_space, {x: x for x in G.objects}),
        CtsMap(G.arr_space, G.arr_space, {g: g for g in G.arrows}),
    )


def check_functor(f: GroupoidMorphism) -> List[str]:
    H, G, f0, f1 = f.source, f.target, f.f0, f.f1
    problems = []
    if f0.source != H.obj_space or f0.target != G.obj_space:
        return ["object map has the wrong spaces"]
    if f1.source != H.arr_space or f1.target != G.arr_space:
        return ["arrow map has the wrong spaces"]
    if not is_continuous(f0) or not is_continuous(f1):
        problems.append("component maps are not continuous")
    for g in ordered(H.arrows):
        if G.d(f1(g)) != f0(H.d(g)) or G.c(f1(g)) != f0(H.c(g)):
            problems.append(f"endpoints of {g} are not preserved")
        if f1(H.i(g)) != G.i(f1(g)):
            problems.append(f"inverse of {g} is not preserved")
    for x in ordered(H.objects):
        if f1(H.e(x)) != G.e(f0(x)):
            problems.append(f"identity of {x} is not preserved")
    for second, first in sorted(H.composable):
        image = G.m.get((f1(second), f1(first)))
        if image != f1(H.m[(second, first)]):
            problems.append(f"composite {second} o {first} is not preserved")
    return problems


class FibrationReport(NamedTuple):
    holds: bool
    witness: Optional[Tuple[Point, Point]] = None


def is_fibration(f: GroupoidMorphism) -> FibrationReport:
    """Every ambient arrow into ``f0(y)`` lifts to an arrow into ``y``."""
    H, G = f.source, f.target
    for y in ordered(H.objects):
        lifts = {f.f1(g) for g in H.arrows_into(y)}
        for h in ordered(G.arrows_into(f.f0(y))):
            if h not in lifts:
                return FibrationReport(False, (y, h))
    return FibrationReport(True)


def pullback_subgroupoid(f: GroupoidMorphism, sub: OpenSubgroupoid) -> OpenSubgroupoid:
    return OpenSubgroupoid(f.f0.preimage(sub.objects), f.f1.preimage(sub.arrows))


def full_subgroupoid(G: FinGroupoid, objects: Iterable[Point]) -> GroupoidMorphism:
    """The full subgroupoid on ``objects`` with subspace topologies."""
    objects = frozenset(objects)
    if not objects <= G.objects:
        raise InvalidSubset(f"objects {ordered(objects - G.objects)} are unknown")
    arrows = G.d.preimage(objects) & G.c.preimage(objects)
    obj_space = subspace(G.obj_space, objects)
    arr_space = subspace(G.arr_space, arrows)
    H = build_groupoid(
        obj_space,
        arr_space,
        {g: G.d(g) for g in arrows},
        {g: G.c(g) for g in arrows},
        {x: G.e(x) for x in objects},
        {g: G.i(g) for g in arrows},
        {
            (second, first): h
            for (second, first), h in G.m.items()
            if second in arrows and first in arrows
        },
    )
    return GroupoidMorphism(
        H, G, inclusion_map(obj_space, G.obj_space), inclusion_map(arr_space, G.arr_space)
    )


@dataclass(frozen=True)
class RepleteInclusion:
    ambient: FinGroupoid
    carrier: PointSet
    morphism: GroupoidMorphism

    @property
    def sub(self) -> FinGroupoid:
        return self.morphism.source

    @property
    def objects(self) -> PointSet:
        return self.carrier

    @property
    def arrows(self) -> PointSet:
        return self.sub.arrows


def replete_subgroupoid(G: FinGroupoid, objects: Iterable[Point]) -> RepleteInclusion:
    objects = frozenset(objects)
    if not objects <= G.objects:
        raise InvalidSubset(f"objects {ordered(objects - G.objects)} are unknown")
    for g in ordered(G.arrows):
        if G.d(g) in objects and G.c(g) not in objects:
            raise NotReplete(
                g, f"arrow '{g}': {G.d(g)} -> {G.c(g)} leaves {list(lex_key(objects))}"
            )
    inclusion = full_subgroupoid(G, objects)
    # holds whenever G is open
    require_open(inclusion.source)
    return RepleteInclusion(G, objects, inclusion)


def is_replete(G: FinGroupoid, objects: Iterable[Point]) -> bool:
    objects = frozenset(objects)
    return all(
        (G.d(g) in objects) == (G.c(g) in objects) for g in G.arrows
    )


def replete_closure(G: FinGroupoid, objects: Iterable[Point]) -> PointSet:
    objects = frozenset(objects)
    if not objects <= G.objects:
        raise InvalidSubset(f"objects {ordered(objects - G.objects)} are unknown")
    return frozenset().union(
        *(component for component in G.iso_classes if component & objects)
    )


def replete_subsets(G: FinGroupoid) -> List[PointSet]:
    """Every union of isomorphism classes, in lexicographic order."""
    found = {frozenset()}
    for component in G.iso_classes:
        found |= {subset | component for subset in found}
    return sorted(found, key=lex_key)


def composition_restriction_failures(
    inclusion: RepleteInclusion,
) -> List[Tuple[PointSet, PointSet]]:
    """Basic opens ``V, W`` of G1 where ``m(VxW) & H1 != m((V&H1)x(W&H1))``.

    Both sides commute with unions in each argument, so testing the basis of
    smallest neighbourhoods covers every pair of opens.
    """
    G, H1 = inclusion.ambient, inclusion.arrows
    failures = []
    basis = sorted(G.arr_space.basis, key=lex_key)
    for left in basis:
        for right in basis:
            ambient = G.compose_sets(left, right) & H1
            restricted = G.compose_sets(left & H1, right & H1)
            if ambient != restricted:
                failures.append((left, right))
    return failures
