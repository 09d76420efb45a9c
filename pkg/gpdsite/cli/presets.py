"""Named groupoids and seeded generators.

``Z2``, ``D2``, ``I2`` and ``P2`` are fixed instances. Families are written
``cyclic:N``, ``identity:N:discrete|indiscrete``, ``pair:N:discrete|indiscrete``,
``action:N:K:SEED`` (Z_K acting on N points) and ``random`` or ``random:SEED``,
which draws one or two action, pair or identity components.
``A+B`` is the disjoint union, atoms of the k-th summand get the suffix ``_k``.
"""

import random
from itertools import product
from string import ascii_lowercase
from typing import List, Optional, Sequence, Tuple

from sphinx.util import logging

from gpdsite.config import Settings
from gpdsite.errors import GpdsiteError, UnknownPreset
from gpdsite.fintop import (
    FinSpace,
    discrete_space,
    indiscrete_space,
    make_space,
    ordered,
)
from gpdsite.groupoid import FinGroupoid, build_groupoid, require_open, validate_groupoid

logger = logging.getLogger(__name__)

ALIASES = {
    "D2": "identity:2:discrete",
    "I2": "identity:2:indiscrete",
    "P2": "pair:2:discrete",
}
TOPOLOGIES = ("discrete", "indiscrete")


def object_names(n: int) -> List[str]:
    if n <= len(ascii_lowercase):
        return list(ascii_lowercase[:n])
    return [f"x{k}" for k in range(n)]


def _space(points, kind: str) -> FinSpace:
    return discrete_space(points) if kind == "discrete" else indiscrete_space(points)


def cyclic_group(n: int) -> FinGroupoid:
    """Z_n as a groupoid on the single object ``*``; ``s`` generates."""
    names = ["1", "s"] + [f"s{k}" for k in range(2, n)]
    names = names[:n]
    objects = discrete_space(["*"])
    arrows = discrete_space(names)
    return build_groupoid(
        objects,
        arrows,
        {g: "*" for g in names},
        {g: "*" for g in names},
        {"*": "1"},
        {names[k]: names[-k % n] for k in range(n)},
        {(names[a], names[b]): names[(a + b) % n] for a in range(n) for b in range(n)},
    )


def identity_groupoid(n: int, kind: str) -> FinGroupoid:
    """Only identities; arrows carry the same topology as the objects."""
    objects = object_names(n)
    units = {x: f"1{x}" for x in objects}
    flip = {g: x for x, g in units.items()}
    return build_groupoid(
        _space(objects, kind),
        _space(units.values(), kind),
        flip,
        flip,
        units,
        {g: g for g in flip},
        {(g, g): g for g in flip},
    )


def pair_groupoid(n: int, kind: str) -> FinGroupoid:
    """One arrow ``xy: x -> y`` for every pair, identities named ``1x``."""
    objects = object_names(n)

    def name(x, y):
        return f"1{x}" if x == y else f"{x}{y}"

    pairs = {name(x, y): (x, y) for x, y in product(objects, repeat=2)}
    obj_space = _space(objects, kind)
    rectangles = [
        [g for g, (x, y) in pairs.items() if x in left and y in right]
        for left in obj_space.basis
        for right in obj_space.basis
    ]
    return build_groupoid(
        obj_space,
        make_space(pairs, rectangles),
        {g: x for g, (x, _) in pairs.items()},
        {g: y for g, (_, y) in pairs.items()},
        {x: name(x, x) for x in objects},
        {g: name(y, x) for g, (x, y) in pairs.items()},
        {
            (name(y, z), name(x, y)): name(x, z)
            for x, y, z in product(objects, repeat=3)
        },
    )


def _cycle_permutation(points: Sequence[str], order: int, rng: random.Random):
    """A random permutation whose cycle lengths all divide ``order``."""
    lengths = [k for k in range(1, order + 1) if order % k == 0]
    remaining = list(points)
    rng.shuffle(remaining)
    sigma = {}
    while remaining:
        length = rng.choice([k for k in lengths if k <= len(remaining)])
        cycle, remaining = remaining[:length], remaining[length:]
        for k, x in enumerate(cycle):
            sigma[x] = cycle[(k + 1) % length]
    return sigma


def _invariant_topology(points: Sequence[str], sigma, rng: random.Random) -> FinSpace:
    members = []
    for _ in range(rng.randint(0, len(points))):
        member = frozenset(x for x in points if rng.random() < 0.5)
        orbit = member
        while True:
            members.append(orbit)
            orbit = frozenset(sigma[x] for x in orbit)
            if orbit == member:
                break
    return make_space(points, members)


def action_groupoid(n: int, order: int, seed: int) -> FinGroupoid:
    """Z_order acting on n points through a seeded permutation and topology.

    The arrow ``s{k}_{x}`` is ``x -> sigma^k(x)``. The arrow space carries the
    product of the discrete group with the object space, so d and c are open.
    """
    rng = random.Random(seed)
    points = [f"p{k}" for k in range(n)]
    sigma = _cycle_permutation(points, order, rng)
    obj_space = _invariant_topology(points, sigma, rng)

    def power(k, x):
        for _ in range(k):
            x = sigma[x]
        return x

    def name(k, x):
        return f"s{k}_{x}"

    arrows = {name(k, x): (k, x) for k in range(order) for x in points}
    subbasis = [
        [name(k, y) for y in nbhd] for k in range(order) for nbhd in obj_space.basis
    ]
    return build_groupoid(
        obj_space,
        make_space(arrows, subbasis),
        {g: x for g, (_, x) in arrows.items()},
        {g: power(k, x) for g, (k, x) in arrows.items()},
        {x: name(0, x) for x in points},
        {g: name(-k % order, power(k, x)) for g, (k, x) in arrows.items()},
        {
            (name(j, power(k, x)), g): name((k + j) % order, x)
            for g, (k, x) in arrows.items()
            for j in range(order)
        },
    )


COMPONENTS = ("action", "action", "pair", "identity")


def _random_component(
    rng: random.Random, max_objects: int, max_arrows: int
) -> Optional[FinGroupoid]:
    """A single summand, or None when the draw exceeds the bounds."""
    n = rng.randint(1, max_objects)
    kind = rng.choice(COMPONENTS)
    if kind == "pair":
        if n * n > max_arrows:
            return None
        return pair_groupoid(n, rng.choice(TOPOLOGIES))
    if kind == "identity":
        if n > max_arrows:
            return None
        return identity_groupoid(n, rng.choice(TOPOLOGIES))
    order = rng.randint(1, 3)
    if n * order > max_arrows:
        return None
    return action_groupoid(n, order, rng.randrange(2**32))


def random_groupoid(seed: int, settings: Optional[Settings] = None) -> FinGroupoid:
    """A seeded open groupoid within the configured size bounds.

    It is an action groupoid, a pair groupoid, an identity groupoid or the
    disjoint union of two of them.
    """
    settings = settings or Settings()
    rng = random.Random(seed)
    for attempt in range(settings.random_retries):
        parts = []
        objects_left = settings.random_max_objects
        arrows_left = settings.random_max_arrows
        for _ in range(rng.randint(1, 2)):
            if objects_left < 1:
                break
            part = _random_component(rng, objects_left, arrows_left)
            if part is None:
                break
            parts.append(part)
            objects_left -= len(part.objects)
            arrows_left -= len(part.arrows)
        if not parts:
            continue
        G = parts[0] if len(parts) == 1 else disjoint_union(parts)
        report = validate_groupoid(G)
        if report.axioms_ok and report.continuity_ok and report.is_open:
            logger.debug(
                f"random groupoid {seed} found after {attempt + 1} attempt(s)"
                f" with {len(parts)} component(s)"
            )
            return G
    raise UnknownPreset(f"no open groupoid found for seed {seed}")



def disjoint_union(groupoids: Sequence[FinGroupoid]) -> FinGroupoid:
    def tag(x, k):
        return f"{x}_{k}"

    objects, arrows, obj_opens, arr_opens = [], [], [], []
    dom, cod, unit, inverse, compose = {}, {}, {}, {}, {}
    for k, G in enumerate(groupoids):
        objects += [tag(x, k) for x in G.objects]
        arrows += [tag(g, k) for g in G.arrows]
        obj_opens += [[tag(x, k) for x in nbhd] for nbhd in G.obj_space.basis]
        arr_opens += [[tag(g, k) for g in nbhd] for nbhd in G.arr_space.basis]
        for g in G.arrows:
            dom[tag(g, k)] = tag(G.d(g), k)
            cod[tag(g, k)] = tag(G.c(g), k)
            inverse[tag(g, k)] = tag(G.i(g), k)
        for x in G.objects:
            unit[tag(x, k)] = tag(G.e(x), k)
        for (second, first), composite in G.m.items():
            compose[(tag(second, k), tag(first, k))] = tag(composite, k)
    return build_groupoid(
        make_space(objects, obj_opens),
        make_space(arrows, arr_opens),
        dom,
        cod,
        unit,
        inverse,
        compose,
    )


def _integers(parts: Sequence[str], spec: str) -> Tuple[int, ...]:
    try:
        values = tuple(int(part) for part in parts)
    except ValueError:
        raise UnknownPreset(f"preset '{spec}' expects integer parameters")
    if any(value < 0 for value in values):
        raise UnknownPreset(f"preset '{spec}' expects non-negative parameters")
    return values


def _single(spec: str, settings: Settings) -> FinGroupoid:
    spec = ALIASES.get(spec, spec)
    if spec == "Z2":
        return cyclic_group(2)
    family, *params = spec.split(":")
    if family == "cyclic" and len(params) == 1:
        (n,) = _integers(params, spec)
        if n >= 1:
            return cyclic_group(n)
    elif family in ("identity", "pair") and len(params) == 2 and params[1] in TOPOLOGIES:
        (n,) = _integers(params[:1], spec)
        build = identity_groupoid if family == "identity" else pair_groupoid
        return build(n, params[1])
    elif family == "action" and len(params) == 3:
        n, order, seed = _integers(params, spec)
        if order >= 1:
            return action_groupoid(n, order, seed)
    elif family == "random" and len(params) <= 1:
        seed = _integers(params, spec)[0] if params else settings.seed
        return random_groupoid(seed, settings)
    raise UnknownPreset(f"unknown preset '{spec}'")


def generate_preset(spec: str, settings: Optional[Settings] = None) -> FinGroupoid:
    settings = settings or Settings()
    parts = [part.strip() for part in spec.split("+")]
    if not all(parts):
        raise UnknownPreset(f"unknown preset '{spec}'")
    if len(parts) == 1:
        G = _single(parts[0], settings)
    else:
        G = disjoint_union([_single(part, settings) for part in parts])
    try:
        require_open(G)
    except GpdsiteError as exc:
        raise UnknownPreset(f"preset '{spec}' is not an open groupoid: {exc}")
    return G


def corpus(settings: Optional[Settings] = None) -> List[Tuple[str, FinGroupoid]]:
    """The fixed presets followed by ``corpus_size`` seeded random groupoids."""
    settings = settings or Settings()
    named = [(name, generate_preset(name, settings)) for name in ("Z2", "D2", "I2", "P2")]
    seeds = range(settings.seed, settings.seed + settings.corpus_size)
    return named + [(f"random:{seed}", random_groupoid(seed, settings)) for seed in seeds]


def preset_names() -> List[str]:
    return ordered(["Z2", *ALIASES])
