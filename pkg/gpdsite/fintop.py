"""Finite topological spaces and continuous maps.

Finite spaces are Alexandrov, so every point has a smallest open
neighbourhood. A topology is kept as those neighbourhoods, which form a
basis. The full family of opens is only built when something enumerates it.
Open sets and continuous or open maps are recognised from the basis alone.
"""

from dataclasses import dataclass
from functools import cached_property
from itertools import chain, combinations
from typing import (
    FrozenSet,
    Hashable,
    Iterable,
    Iterator,
    List,
    Mapping,
    NamedTuple,
    Tuple,
)

from sphinx.util import logging

from gpdsite.errors import (
    InvalidMap,
    InvalidPartition,
    InvalidSubbasis,
    InvalidSubset,
    TargetMismatch,
)

logger = logging.getLogger(__name__)

Point = Hashable
PointSet = FrozenSet[Point]


def ordered(points: Iterable[Point]) -> List[Point]:
    return sorted(points)


def lex_key(points: Iterable[Point]) -> Tuple[Point, ...]:
    return tuple(ordered(points))


def size_key(points: Iterable[Point]) -> Tuple[int, Tuple[Point, ...]]:
    key = lex_key(points)
    return len(key), key


def powerset(points: Iterable[Point]) -> Iterator[PointSet]:
    items = ordered(points)
    for subset in chain.from_iterable(
        combinations(items, size) for size in range(len(items) + 1)
    ):
        yield frozenset(subset)


@dataclass(frozen=True)
class FinSpace:
    """A finite topology, kept as the smallest open neighbourhood of each point."""

    points: PointSet
    neighbourhoods: Mapping[Point, PointSet]

    def __post_init__(self) -> None:
        object.__setattr__(self, "points", frozenset(self.points))
        object.__setattr__(
            self,
            "neighbourhoods",
            {x: frozenset(nbhd) for x, nbhd in self.neighbourhoods.items()},
        )

    def __hash__(self) -> int:
        return hash((self.points, frozenset(self.neighbourhoods.items())))

    @cached_property
    def basis(self) -> FrozenSet[PointSet]:
        return frozenset(self.neighbourhoods.values())

    @cached_property
    def opens(self) -> FrozenSet[PointSet]:
        """Every open set. Exponential in the width of the space."""
        opens = {frozenset(), self.points}
        for basic in self.basis:
            opens |= {open_set | basic for open_set in opens}
        logger.debug(f"topology on {len(self.points)} point(s) has {len(opens)} open(s)")
        return frozenset(opens)

    @cached_property
    def sorted_opens(self) -> List[PointSet]:
        return sorted(self.opens, key=lex_key)

    def is_open(self, subset: Iterable[Point]) -> bool:
        subset = frozenset(subset)
        return subset <= self.points and all(
            self.neighbourhoods[x] <= subset for x in subset
        )

    def is_closed(self, subset: Iterable[Point]) -> bool:
        return self.is_open(self.points - frozenset(subset))

    def opens_within(self, subset: Iterable[Point]) -> List[PointSet]:
        subset = frozenset(subset)
        return [open_set for open_set in self.sorted_opens if open_set <= subset]

    def interior(self, subset: Iterable[Point]) -> PointSet:
        subset = frozenset(subset)
        return frozenset(
            x for x in subset if self.neighbourhoods[x] <= subset
        )

    @property
    def is_discrete(self) -> bool:
        return all(len(nbhd) == 1 for nbhd in self.neighbourhoods.values())

    @property
    def is_indiscrete(self) -> bool:
        return all(nbhd == self.points for nbhd in self.neighbourhoods.values())

    def __len__(self) -> int:
        return len(self.points)


def topology_problems(space: FinSpace) -> List[str]:
    problems = []
    if set(space.neighbourhoods) != space.points:
        problems.append("neighbourhoods are not given for exactly the points")
    for x, nbhd in space.neighbourhoods.items():
        if x not in nbhd:
            problems.append(f"{x!r} is not in its own neighbourhood")
        if not nbhd <= space.points:
            problems.append(f"neighbourhood of {x!r} has stray points")
            continue
        for y in ordered(nbhd - {x}):
            if not space.neighbourhoods.get(y, frozenset()) <= nbhd:
                problems.append(f"neighbourhood of {y!r} is not inside that of {x!r}")
    return problems


def make_space(
    points: Iterable[Point], subbasis: Iterable[Iterable[Point]]
) -> FinSpace:
    """Least topology on ``points`` containing every subbasis member."""
    points = frozenset(points)
    members = [frozenset(member) for member in subbasis]
    for member in members:
        if not member <= points:
            raise InvalidSubbasis(
                f"subbasis member {lex_key(member)} is not contained in the points"
            )
    # the smallest neighbourhood is the meet of the members around a point
    neighbourhoods = {}
    for x in points:
        nbhd = points
        for member in members:
            if x in member:
                nbhd = nbhd & member
        neighbourhoods[x] = nbhd
    return FinSpace(points, neighbourhoods)


def discrete_space(points: Iterable[Point]) -> FinSpace:
    points = frozenset(points)
    return make_space(points, [{x} for x in points])


def indiscrete_space(points: Iterable[Point]) -> FinSpace:
    return make_space(points, [])


@dataclass(frozen=True)
class CtsMap:
    source: FinSpace
    target: FinSpace
    graph: Mapping[Point, Point]

    def __post_init__(self) -> None:
        graph = dict(self.graph)
        if set(graph) != self.source.points:
            raise InvalidMap("map graph is not total on its source")
        stray = set(graph.values()) - self.target.points
        if stray:
            raise InvalidMap(f"map sends points outside its target: {ordered(stray)}")
        object.__setattr__(self, "graph", graph)

    def __hash__(self) -> int:
        return hash((self.source, self.target, frozenset(self.graph.items())))

    def __call__(self, x: Point) -> Point:
        return self.graph[x]

    def image(self, subset: Iterable[Point]) -> PointSet:
        return frozenset(self.graph[x] for x in subset)

    def preimage(self, subset: Iterable[Point]) -> PointSet:
        subset = frozenset(subset)
        return frozenset(x for x, y in self.graph.items() if y in subset)


def identity_map(space: FinSpace) -> CtsMap:
    return CtsMap(space, space, {x: x for x in space.points})


def inclusion_map(sub: FinSpace, space: FinSpace) -> CtsMap:
    return CtsMap(sub, space, {x: x for x in sub.points})


def compose_maps(second: CtsMap, first: CtsMap) -> CtsMap:
    return CtsMap(
        first.source, second.target, {x: second(first(x)) for x in first.source.points}
    )


class MapReport(NamedTuple):
    continuous: bool
    open_map: bool
    local_homeo: bool


def is_continuous(f: CtsMap) -> bool:
    return all(f.source.is_open(f.preimage(basic)) for basic in f.target.basis)


def is_open_map(f: CtsMap) -> bool:
    return all(f.target.is_open(f.image(basic)) for basic in f.source.basis)


def check_map(f: CtsMap) -> MapReport:
    continuous = is_continuous(f)
    open_map = is_open_map(f)
    # homeomorphic on the smallest neighbourhood of every point
    locally_injective = all(
        len(f.image(nbhd)) == len(nbhd) for nbhd in f.source.basis
    )
    return MapReport(continuous, open_map, continuous and open_map and locally_injective)


def class_name(block: Iterable[Point]) -> str:
    return f"[{min(block)}]"


def quotient_space(
    space: FinSpace, classes: Iterable[Iterable[Point]]
) -> Tuple[FinSpace, CtsMap]:
    blocks = [frozenset(block) for block in classes]
    covered = frozenset().union(*blocks)
    if (
        any(not block for block in blocks)
        or sum(len(block) for block in blocks) != len(covered)
        or covered != space.points
    ):
        raise InvalidPartition("classes do not partition the points")

    names = {}
    for block in blocks:
        for x in block:
            names[x] = class_name(block)

    def saturation(subset: PointSet) -> PointSet:
        image = {names[x] for x in subset}
        return frozenset(x for x in space.points if names[x] in image)

    # a class's neighbourhood is the image of the smallest saturated open around it
    neighbourhoods = {}
    for block in blocks:
        nbhd = block
        while True:
            grown = saturation(nbhd.union(*(space.neighbourhoods[x] for x in nbhd)))
            if grown == nbhd:
                break
            nbhd = grown
        neighbourhoods[class_name(block)] = frozenset(names[x] for x in nbhd)
    quotient = FinSpace(frozenset(names.values()), neighbourhoods)
    return quotient, CtsMap(space, quotient, names)


def subspace(space: FinSpace, subset: Iterable[Point]) -> FinSpace:
    subset = frozenset(subset)
    if not subset <= space.points:
        raise InvalidSubset(
            f"points {ordered(subset - space.points)} are not in the space"
        )
    return FinSpace(subset, {x: space.neighbourhoods[x] & subset for x in subset})


def fiber_product(f: CtsMap, g: CtsMap) -> Tuple[FinSpace, CtsMap, CtsMap]:
    """The pullback ``X x_Z Y`` with the subspace of the product topology.

    The smallest neighbourhood of ``(x, y)`` is the product of those of ``x``
    and ``y`` cut down to the pullback.
    """
    if f.target != g.target:
        raise TargetMismatch("maps of a fibre product must share their target")
    points = frozenset(
        (x, y) for x in f.source.points for y in g.source.points if f(x) == g(y)
    )
    neighbourhoods = {
        (x, y): frozenset(
            (u, v)
            for u in f.source.neighbourhoods[x]
            for v in g.source.neighbourhoods[y]
            if (u, v) in points
        )
        for x, y in points
    }
    product = FinSpace(points, neighbourhoods)
    first = CtsMap(product, f.source, {p: p[0] for p in points})
    second = CtsMap(product, g.source, {p: p[1] for p in points})
    return product, first, second
