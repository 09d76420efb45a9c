"""Line-oriented groupoid description files.

::

    # two objects and an isomorphism between them
    objects: a b
    arrows:
      1a: a -> a
      1b: b -> b
      ab: a -> b
      ba: b -> a
    identity:
      a = 1a
      b = 1b
    inverse:
      ab = ba
    compose:
      ba . ab = 1a
      ab . ba = 1b
    topology_objects: indiscrete
    topology_arrows:
      basis 1a 1b
      basis ab ba

Inverses are symmetric, so listing one direction is enough, and identities
are their own inverses. Composites with an identity may be left out. A
topology is ``discrete``, ``indiscrete`` or a list of ``basis`` lines whose
members generate it.
"""

import re
from typing import Dict, List, Tuple

from gpdsite.errors import ParseError, ValidationError
from gpdsite.fintop import (
    FinSpace,
    discrete_space,
    indiscrete_space,
    lex_key,
    make_space,
    ordered,
    size_key,
)
from gpdsite.groupoid import FinGroupoid, build_groupoid, validate_groupoid

SECTIONS = (
    "objects",
    "arrows",
    "identity",
    "inverse",
    "compose",
    "topology_objects",
    "topology_arrows",
)

ATOM = r"[^\s:=.#]+"
ARROW_LINE = re.compile(rf"^({ATOM})\s*:\s*({ATOM})\s*->\s*({ATOM})$")
ASSIGN_LINE = re.compile(rf"^({ATOM})\s*=\s*({ATOM})$")
COMPOSE_LINE = re.compile(rf"^({ATOM})\s*\.\s*({ATOM})\s*=\s*({ATOM})$")
ATOM_RE = re.compile(rf"^{ATOM}$")

Entry = Tuple[int, str]


def _split_sections(text: str) -> Tuple[Dict[str, List[Entry]], Dict[str, int]]:
    sections = {name: [] for name in SECTIONS}
    headers = {}
    current = None
    lineno = 0
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        head, sep, rest = line.partition(":")
        if sep and head.strip() in SECTIONS:
            current = head.strip()
            if current in headers:
                raise ParseError(lineno, f"section '{current}' appears twice")
            headers[current] = lineno
            if rest.strip():
                sections[current].append((lineno, rest.strip()))
            continue
        if current is None:
            raise ParseError(lineno, "expected a section header")
        sections[current].append((lineno, line))
    for name in SECTIONS:
        if name not in headers:
            raise ParseError(lineno, f"missing section '{name}'")
    return sections, headers


def _atoms(entries: List[Entry], kind: str) -> List[str]:
    found = []
    for lineno, line in entries:
        for token in line.split():
            if not ATOM_RE.match(token):
                raise ParseError(lineno, f"'{token}' is not a valid {kind} name")
            if token in found:
                raise ParseError(lineno, f"{kind} '{token}' is declared twice")
            found.append(token)
    return found


def _topology(entries: List[Entry], points: List[str], header: int, kind: str) -> FinSpace:
    if len(entries) == 1 and entries[0][1] in ("discrete", "indiscrete"):
        if entries[0][1] == "discrete":
            return discrete_space(points)
        return indiscrete_space(points)
    if not entries and not points:
        return discrete_space(points)
    if not entries:
        raise ParseError(header, f"topology of the {kind} is empty")
    members = []
    for lineno, line in entries:
        keyword, *tokens = line.split()
        if keyword != "basis":
            raise ParseError(
                lineno, f"expected 'discrete', 'indiscrete' or 'basis', got '{keyword}'"
            )
        unknown = [token for token in tokens if token not in points]
        if unknown:
            raise ParseError(lineno, f"unknown {kind} in basis: {' '.join(unknown)}")
        members.append(tokens)
    return make_space(points, members)


def _assignments(
    entries: List[Entry], keys: List[str], values: List[str], kind: str
) -> Dict[str, str]:
    found = {}
    for lineno, line in entries:
        match = ASSIGN_LINE.match(line)
        if not match:
            raise ParseError(lineno, f"expected 'name = name' in {kind}")
        key, value = match.groups()
        if key not in keys or value not in values:
            raise ParseError(lineno, f"unknown name in {kind}: {line}")
        if found.get(key, value) != value:
            raise ParseError(lineno, f"{kind} of '{key}' is given twice")
        found[key] = value
    return found


def parse_groupoid(text: str) -> FinGroupoid:
    sections, headers = _split_sections(text)
    objects = _atoms(sections["objects"], "object")

    arrows, dom, cod = [], {}, {}
    for lineno, line in sections["arrows"]:
        match = ARROW_LINE.match(line)
        if not match:
            raise ParseError(lineno, "expected 'arrow: source -> target'")
        name, source, target = match.groups()
        if name in dom:
            raise ParseError(lineno, f"arrow '{name}' is declared twice")
        for obj in (source, target):
            if obj not in objects:
                raise ParseError(lineno, f"unknown object '{obj}'")
        arrows.append(name)
        dom[name], cod[name] = source, target

    unit = _assignments(sections["identity"], objects, arrows, "identity")
    inverse = {}
    for lineno, line in sections["inverse"]:
        for key, value in _assignments([(lineno, line)], arrows, arrows, "inverse").items():
            for first, second in ((key, value), (value, key)):
                if inverse.get(first, second) != second:
                    raise ParseError(lineno, f"inverse of '{first}' is given twice")
                inverse[first] = second

    compose = {}
    for lineno, line in sections["compose"]:
        match = COMPOSE_LINE.match(line)
        if not match:
            raise ParseError(lineno, "expected 'second . first = composite'")
        second, first, composite = match.groups()
        if not {second, first, composite} <= set(arrows):
            raise ParseError(lineno, f"unknown arrow in composite: {line}")
        if (second, first) in compose:
            raise ParseError(lineno, f"composite {second} . {first} is given twice")
        compose[(second, first)] = composite

    for g in unit.values():
        inverse.setdefault(g, g)
    problems = [f"object '{x}' has no identity" for x in objects if x not in unit]
    problems += [f"arrow '{g}' has no inverse" for g in arrows if g not in inverse]
    if problems:
        raise ValidationError(problems)
    for g in arrows:
        compose.setdefault((g, unit[dom[g]]), g)
        compose.setdefault((unit[cod[g]], g), g)

    obj_space = _topology(
        sections["topology_objects"], objects, headers["topology_objects"], "objects"
    )
    arr_space = _topology(
        sections["topology_arrows"], arrows, headers["topology_arrows"], "arrows"
    )
    G = build_groupoid(obj_space, arr_space, dom, cod, unit, inverse, compose)
    report = validate_groupoid(G)
    if not report.axioms_ok:
        raise ValidationError(report.problems)
    return G


def _topology_lines(space: FinSpace) -> List[str]:
    if space.is_discrete:
        return ["topology: discrete"]
    if space.is_indiscrete:
        return ["topology: indiscrete"]
    return ["topology:"] + [
        "  basis " + " ".join(map(str, lex_key(nbhd)))
        for nbhd in sorted(space.basis, key=size_key)
    ]


def serialize_groupoid(G: FinGroupoid) -> str:
    """Canonical text for ``G``: atoms, assignments and composites sorted."""
    lines = ["objects: " + " ".join(map(str, ordered(G.objects))), "arrows:"]
    lines += [f"  {g}: {G.d(g)} -> {G.c(g)}" for g in ordered(G.arrows)]
    lines.append("identity:")
    lines += [f"  {x} = {G.e(x)}" for x in ordered(G.objects)]
    lines.append("inverse:")
    lines += [f"  {g} = {G.i(g)}" for g in ordered(G.arrows)]
    lines.append("compose:")
    lines += [
        f"  {second} . {first} = {composite}"
        for (second, first), composite in sorted(G.m.items())
    ]
    for name, space in (("objects", G.obj_space), ("arrows", G.arr_space)):
        first, *rest = _topology_lines(space)
        lines.append(first.replace("topology", f"topology_{name}", 1))
        lines += rest
    return "\n".join(lines) + "\n"


def read_groupoid(path) -> FinGroupoid:
    with open(path, "r") as f:
        return parse_groupoid(f.read())


def write_groupoid(G: FinGroupoid, path) -> None:
    with open(path, "w") as f:
        f.write(serialize_groupoid(G))
