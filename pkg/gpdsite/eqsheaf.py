"""Equivariant sheaves ``<r: R -> G0, rho>`` and the quotient sheaves ``<G,U,N>``."""

from dataclasses import dataclass
from functools import cached_property
from itertools import permutations, product
from typing import (
    Dict,
    Iterable,
    Iterator,
    List,
    Mapping,
    NamedTuple,
    Optional,
    Tuple,
)

from sphinx.util import logging

from gpdsite.errors import (
    AmbientMismatch,
    InvalidSubgroupoid,
    InvalidSubset,
    NotASection,
    NotContinuous,
    NotReplete,
    UnknownPoint,
)
from gpdsite.fintop import (
    CtsMap,
    FinSpace,
    Point,
    PointSet,
    check_map,
    fiber_product,
    inclusion_map,
    is_continuous,
    is_open_map,
    make_space,
    ordered,
    quotient_space,
    subspace,
)
from gpdsite.groupoid import (
    FinGroupoid,
    GroupoidMorphism,
    OpenSubgroupoid,
    is_replete,
    open_subgroupoid,
    require_open,
    subgroupoid_problems,
)

logger = logging.getLogger(__name__)

ActionKey = Tuple[Point, Point]


@dataclass(frozen=True)
class EqSheaf:
    groupoid: FinGroupoid
    total_space: FinSpace
    r: CtsMap
    action: Mapping[ActionKey, Point]

    def __post_init__(self) -> None:
        object.__setattr__(self, "action", dict(self.action))

    def __hash__(self) -> int:
        return hash(
            (self.groupoid, self.total_space, self.r, frozenset(self.action.items()))
        )

    @property
    def points(self) -> PointSet:
        return self.total_space.points

    def act(self, g: Point, x: Point) -> Point:
        return self.action[(g, x)]

    def fibre(self, x: Point) -> PointSet:
        return self.r.preimage({x})

    @cached_property
    def action_space(self) -> FinSpace:
        space, _, _ = fiber_product(self.groupoid.d, self.r)
        return space

    @cached_property
    def orbits(self) -> List[PointSet]:
        seen, found = set(), []
        for x in ordered(self.points):
            if x in seen:
                continue
            orbit = frozenset(
                self.act(g, x) for g in self.groupoid.arrows_from(self.r(x))
            )
            seen |= orbit
            found.append(orbit)
        return found


@dataclass(frozen=True)
class GunSheaf(EqSheaf):
    """``d^-1(U)`` modulo ``f ~ g`` iff ``c(f) == c(g)`` and ``g^-1 o f`` is in N."""

    base: OpenSubgroupoid
    classes: Mapping[Point, PointSet]
    quotient: CtsMap

    def __post_init__(self) -> None:
        super().__post_init__()
        object.__setattr__(self, "classes", dict(self.classes))

    def __hash__(self) -> int:
        return hash((super().__hash__(), self.base))

    def class_of(self, f: Point) -> Point:
        return self.quotient(f)

    def representative(self, element: Point) -> Point:
        return min(self.classes[element])

    @cached_property
    def canonical_section(self) -> Dict[Point, Point]:
        return {x: self.class_of(self.groupoid.e(x)) for x in self.base.objects}


def _classes(G: FinGroupoid, sub: OpenSubgroupoid) -> List[List[Point]]:
    blocks = []
    for f in ordered(G.d.preimage(sub.objects)):
        for block in blocks:
            g = block[0]
            if G.c(g) == G.c(f) and G.m[(G.i(g), f)] in sub.arrows:
                block.append(f)
                break
        else:
            blocks.append([f])
    return blocks


def build_gun(G: FinGroupoid, sub: OpenSubgroupoid) -> GunSheaf:
    require_open(G)
    problems = subgroupoid_problems(G, sub.objects, sub.arrows)
    if problems:
        raise InvalidSubgroupoid("; ".join(problems))
    domain = subspace(G.arr_space, G.d.preimage(sub.objects))
    blocks = _classes(G, sub)
    total, quotient = quotient_space(domain, blocks)
    classes = {quotient(block[0]): frozenset(block) for block in blocks}
    r = CtsMap(total, G.obj_space, {name: G.c(block[0]) for name, block in zip(classes, blocks)})
    action = {}
    for name, block in classes.items():
        f = min(block)
        for h in G.arrows_from(G.c(f)):
            action[(h, name)] = quotient(G.m[(h, f)])
    return GunSheaf(G, total, r, action, sub, classes, quotient)


class SheafReport(NamedTuple):
    local_homeo: bool
    action_total: bool
    action_fibres: bool
    unit: bool
    composition: bool
    action_continuous: bool
    action_open: bool
    # only reported for quotient sheaves
    quotient_open_surjection: Optional[bool] = None
    classes_correct: Optional[bool] = None
    action_is_composition: Optional[bool] = None
    problems: Tuple[str, ...] = ()

    @property
    def ok(self) -> bool:
        return all(
            flag is not False for flag in self[:-1]
        )


def _gun_checks(R: GunSheaf, problems: List[str]) -> Tuple[bool, bool, bool]:
    G, N = R.groupoid, R.base.arrows
    q = R.quotient
    surjective = q.image(q.source.points) == R.points
    open_surjection = surjective and is_open_map(q)
    if not open_surjection:
        problems.append("quotient map is not an open surjection")
    domain = ordered(q.source.points)
    classes_correct = all(
        (q(f) == q(g)) == (G.c(f) == G.c(g) and G.m[(G.i(g), f)] in N)
        for f in domain
        for g in domain
        if G.c(f) == G.c(g)
    ) and all(
        q(f) != q(g) for f in domain for g in domain if G.c(f) != G.c(g)
    )
    if not classes_correct:
        problems.append("classes are not the equivalence classes of the subgroupoid")
    by_composition = all(
        R.action.get((h, q(f))) == q(G.m[(h, f)])
        for f in domain
        for h in G.arrows_from(G.c(f))
    )
    if not by_composition:
        problems.append("action is not composition of arrows")
    return open_surjection, classes_correct, by_composition


def validate_eqsheaf(G: FinGroupoid, R: EqSheaf) -> SheafReport:
    problems = []
    if R.groupoid != G or R.r.target != G.obj_space or R.r.source != R.total_space:
        problems.append("sheaf is not over this groupoid")
        return SheafReport(*([False] * 7), problems=tuple(problems))
    local_homeo = check_map(R.r).local_homeo
    if not local_homeo:
        problems.append("projection is not a local homeomorphism")

    expected = {(g, x) for x in R.points for g in G.arrows_from(R.r(x))}
    action_total = set(R.action) == expected and set(R.action.values()) <= R.points
    if not action_total:
        problems.append("action is not defined exactly on the arrow-element pairs")
    action_fibres = all(
        R.r(y) == G.c(g) for (g, _), y in R.action.items() if y in R.points
    )
    if not action_fibres:
        problems.append("action does not land over the codomain")
    unit = all(R.action.get((G.e(R.r(x)), x)) == x for x in R.points)
    if not unit:
        problems.append("identities do not act trivially")
    composition = True
    for second, first in G.composable:
        for x in R.fibre(G.d(first)):
            inner = R.action.get((first, x))
            if R.action.get((second, inner)) != R.action.get((G.m[(second, first)], x)):
                composition = False
    if not composition:
        problems.append("action does not respect composition")

    action_continuous = action_open = False
    if action_total:
        action_map = CtsMap(R.action_space, R.total_space, R.action)
        action_continuous = is_continuous(action_map)
        action_open = is_open_map(action_map)
    if not action_continuous:
        problems.append("action is not continuous")
    if not action_open:
        problems.append("action is not open")

    extra = (None, None, None)
    if isinstance(R, GunSheaf):
        extra = _gun_checks(R, problems)
    return SheafReport(
        local_homeo,
        action_total,
        action_fibres,
        unit,
        composition,
        action_continuous,
        action_open,
        *extra,
        problems=tuple(problems),
    )


def stalk(R: EqSheaf, x: Point) -> PointSet:
    if x not in R.groupoid.objects:
        raise UnknownPoint(f"'{x}' is not an object of the groupoid")
    return R.fibre(x)


@dataclass(frozen=True)
class EqMap:
    source: EqSheaf
    target: EqSheaf
    graph: Mapping[Point, Point]

    def __post_init__(self) -> None:
        object.__setattr__(self, "graph", dict(self.graph))

    def __hash__(self) -> int:
        return hash((self.source, self.target, frozenset(self.graph.items())))

    def __call__(self, x: Point) -> Point:
        return self.graph[x]

    @property
    def image(self) -> PointSet:
        return frozenset(self.graph.values())

    @property
    def is_injective(self) -> bool:
        return len(self.image) == len(self.graph)


def eq_map_problems(phi: EqMap) -> List[str]:
    A, B = phi.source, phi.target
    if set(phi.graph) != A.points or not phi.image <= B.points:
        return ["graph is not a function between the total spaces"]
    problems = []
    if not is_continuous(CtsMap(A.total_space, B.total_space, phi.graph)):
        problems.append("map is not continuous")
    if any(B.r(phi(x)) != A.r(x) for x in A.points):
        problems.append("map does not preserve fibres")
    if any(phi(y) != B.act(g, phi(x)) for (g, x), y in A.action.items()):
        problems.append("map does not commute with the actions")
    return problems


def is_eq_map(phi: EqMap) -> bool:
    return not eq_map_problems(phi)


def compose_eq_maps(second: EqMap, first: EqMap) -> EqMap:
    return EqMap(
        first.source, second.target, {x: second(y) for x, y in first.graph.items()}
    )


def identity_eq_map(R: EqSheaf) -> EqMap:
    return EqMap(R, R, {x: x for x in R.points})


def _orbit_extensions(A: EqSheaf, B: EqSheaf, x: Point) -> List[Dict[Point, Point]]:
    """Equivariant assignments on the orbit of ``x``, one per choice of ``x``'s image."""
    G = A.groupoid
    extensions = []
    for y in ordered(B.fibre(A.r(x))):
        assignment = {}
        for g in G.arrows_from(A.r(x)):
            source, image = A.act(g, x), B.act(g, y)
            if assignment.setdefault(source, image) != image:
                break
        else:
            extensions.append(assignment)
    return extensions


def enumerate_eq_maps(A: EqSheaf, B: EqSheaf) -> List[EqMap]:
    """Every morphism ``A -> B`` of equivariant sheaves.

    A map commuting with the actions is fixed by its value on one element of
    each orbit, so the search ranges over those values only.
    """
    if A.groupoid != B.groupoid:
        raise AmbientMismatch("sheaves live over different groupoids")
    per_orbit = [_orbit_extensions(A, B, min(orbit)) for orbit in A.orbits]
    found = []
    for choice in product(*per_orbit):
        graph = {}
        for assignment in choice:
            graph.update(assignment)
        phi = EqMap(A, B, graph)
        if is_eq_map(phi):
            found.append(phi)
    points = ordered(A.points)
    return sorted(found, key=lambda phi: tuple(phi(x) for x in points))


def inverse_eq_map(phi: EqMap) -> Optional[EqMap]:
    if not phi.is_injective or phi.image != phi.target.points:
        return None
    inverse = EqMap(phi.target, phi.source, {y: x for x, y in phi.graph.items()})
    return inverse if is_eq_map(inverse) else None


def isomorphism(A: EqSheaf, B: EqSheaf) -> Optional[EqMap]:
    if len(A.points) != len(B.points):
        return None
    for phi in enumerate_eq_maps(A, B):
        if inverse_eq_map(phi) is not None:
            return phi
    return None


def is_isomorphic(A: EqSheaf, B: EqSheaf) -> bool:
    return isomorphism(A, B) is not None


@dataclass(frozen=True)
class SectionLift:
    section: Mapping[Point, Point]
    sub: OpenSubgroupoid
    gun: GunSheaf
    t_hat: EqMap

    def __hash__(self) -> int:
        return hash((frozenset(self.section.items()), self.t_hat))


def section_to_morphism(
    R: EqSheaf, U: Iterable[Point], t: Mapping[Point, Point]
) -> SectionLift:
    """Lift a continuous local section ``t: U -> R`` to ``<G,U,N_t> -> R``."""
    G = R.groupoid
    U, t = frozenset(U), dict(t)
    if set(t) != U or not U <= G.objects:
        raise NotASection("section is not defined exactly on its domain")
    if any(y not in R.points or R.r(y) != x for x, y in t.items()):
        raise NotASection("section does not split the projection")
    if not G.obj_space.is_open(U):
        raise NotContinuous("domain of the section is not open")
    if not is_continuous(CtsMap(subspace(G.obj_space, U), R.total_space, t)):
        raise NotContinuous("section is not continuous")

    arrows = frozenset(
        f
        for f in G.d.preimage(U) & G.c.preimage(U)
        if R.act(f, t[G.d(f)]) == t[G.c(f)]
    )
    sub = open_subgroupoid(G, U, arrows)
    gun = build_gun(G, sub)
    graph = {}
    for name, block in gun.classes.items():
        f = min(block)
        graph[name] = R.act(f, t[G.d(f)])
    return SectionLift(t, sub, gun, EqMap(gun, R, graph))


def enumerate_sections(R: EqSheaf) -> Iterator[Tuple[PointSet, Dict[Point, Point]]]:
    """Every continuous local section over every open of G0."""
    G = R.groupoid
    for U in G.obj_space.sorted_opens:
        domain = ordered(U)
        sub = subspace(G.obj_space, U)
        for values in product(*(ordered(R.fibre(x)) for x in domain)):
            t = dict(zip(domain, values))
            if is_continuous(CtsMap(sub, R.total_space, t)):
                yield U, t


def uncovered_points(R: EqSheaf) -> PointSet:
    covered = set()
    for U, t in enumerate_sections(R):
        covered |= section_to_morphism(R, U, t).t_hat.image
    return R.points - covered


def gun_cover_check(R: EqSheaf) -> bool:
    """Whether the images of all lifted sections jointly cover ``R``."""
    return not uncovered_points(R)


def inverse_image(f: GroupoidMorphism, R: EqSheaf) -> EqSheaf:
    """``f*(R)``: the fibre product ``H0 x_G0 R`` acted on through ``f1``."""
    if R.groupoid != f.target:
        raise AmbientMismatch("sheaf does not live over the target of the morphism")
    H = f.source
    total, first, _ = fiber_product(f.f0, R.r)
    action = {}
    for y, p in total.points:
        for g in H.arrows_from(y):
            action[(g, (y, p))] = (H.c(g), R.act(f.f1(g), p))
    return EqSheaf(H, total, CtsMap(total, H.obj_space, first.graph), action)


def subterminal_sheaf(G: FinGroupoid, U: Iterable[Point]) -> EqSheaf:
    """The subterminal sheaf of an open replete set of objects."""
    U = frozenset(U)
    if not U <= G.objects or not G.obj_space.is_open(U):
        raise InvalidSubset("subterminal sheaves need an open set of objects")
    if not is_replete(G, U):
        leaving = min(g for g in G.arrows if (G.d(g) in U) != (G.c(g) in U))
        raise NotReplete(leaving)
    total = subspace(G.obj_space, U)
    action = {(g, x): G.c(g) for x in U for g in G.arrows_from(x)}
    return EqSheaf(G, total, inclusion_map(total, G.obj_space), action)


class _Conflict(Exception):
    pass


def _merge(closed: Dict[Point, Dict[Point, Point]], arrow: Point, perm) -> bool:
    known = closed.get(arrow)
    if known is None:
        closed[arrow] = perm
        return True
    if known != perm:
        raise _Conflict(arrow)
    return False


def _saturate(G: FinGroupoid, assigned):
    closed = dict(assigned)
    changed = True
    try:
        while changed:
            changed = False
            for g, perm in list(closed.items()):
                inverse = {q: p for p, q in perm.items()}
                changed |= _merge(closed, G.i(g), inverse)
            for second, first in G.composable:
                if second in closed and first in closed:
                    outer, inner = closed[second], closed[first]
                    composite = {p: outer[q] for p, q in inner.items()}
                    changed |= _merge(closed, G.m[(second, first)], composite)
    except _Conflict:
        return None
    return closed


def _functorial_actions(G: FinGroupoid, fibres: Mapping[Point, Tuple[Point, ...]]):
    """Every functorial action with the given fibres, as permutations per arrow."""

    def extend(assigned):
        closed = _saturate(G, assigned)
        if closed is None:
            return
        free = [g for g in ordered(G.arrows) if g not in closed]
        if not free:
            yield {
                (g, p): q for g, perm in closed.items() for p, q in perm.items()
            }
            return
        g = free[0]
        source, target = fibres[G.d(g)], fibres[G.c(g)]
        for image in permutations(target):
            trial = dict(closed)
            trial[g] = dict(zip(source, image))
            yield from extend(trial)

    yield from extend({G.e(x): {p: p for p in fibres[x]} for x in G.objects})


def _etale_topologies(G: FinGroupoid, fibres: Mapping[Point, Tuple[Point, ...]]):
    """Topologies making the projection a local homeomorphism.

    The smallest neighbourhood of a point over ``x`` holds exactly one point
    over each object of the smallest neighbourhood of ``x``.
    """
    points = frozenset(p for fibre in fibres.values() for p in fibre)
    slots = [
        (p, y)
        for x in ordered(G.objects)
        for p in fibres[x]
        for y in ordered(G.obj_space.neighbourhoods[x] - {x})
    ]
    seen = set()
    for combo in product(*(fibres[y] for _, y in slots)):
        generators = {p: {p} for p in points}
        for (p, _), q in zip(slots, combo):
            generators[p].add(q)
        space = make_space(points, generators.values())
        if space not in seen:
            seen.add(space)
            yield space


def _fibre_sizes(G: FinGroupoid, max_points: int) -> Iterator[Dict[Point, int]]:
    classes = G.iso_classes
    for sizes in product(range(max_points + 1), repeat=len(classes)):
        if sum(n * len(cls) for n, cls in zip(sizes, classes)) > max_points:
            continue
        yield {x: n for n, cls in zip(sizes, classes) for x in cls}


def enumerate_eqsheaves(G: FinGroupoid, max_points: int) -> Iterator[EqSheaf]:
    """Every equivariant sheaf whose total space has at most ``max_points`` elements."""
    require_open(G)
    count = 0
    for sizes in _fibre_sizes(G, max_points):
        fibres = {
            x: tuple(f"{x}.{k}" for k in range(sizes[x])) for x in ordered(G.objects)
        }
        r = {p: x for x, fibre in fibres.items() for p in fibre}
        topologies = list(_etale_topologies(G, fibres))
        for action in _functorial_actions(G, fibres):
            for space in topologies:
                sheaf = EqSheaf(G, space, CtsMap(space, G.obj_space, r), action)
                if validate_eqsheaf(G, sheaf).ok:
                    count += 1
                    yield sheaf
    logger.debug(f"{count} equivariant sheaf/sheaves with at most {max_points} point(s)")
