import pytest
from hypothesis import given

from gpdsite.errors import ConditionViolated, InvalidSubset, ObjectMismatch, UnknownPoint
from gpdsite.eqsheaf import enumerate_eq_maps
from gpdsite.groupoid import OpenSubgroupoid
from gpdsite.site import (
    SiteObject,
    TSet,
    check_composition_law,
    check_tset_bijection,
    closed_opens,
    enumerate_site_objects,
    enumerate_tsets,
    identity_tset,
    is_valid_tset,
    partial_tset,
    sheaf_subobjects,
    subobject_inclusion,
    subobject_lattice,
    subobject_site_object,
    tset_apply,
    tset_compose,
    verify_frame_isomorphism,
)
from strategies import tset_paths


def obj(G, objects, arrows):
    return SiteObject(G, OpenSubgroupoid(frozenset(objects), frozenset(arrows)))


@pytest.fixture()
def regular(Z2):
    return obj(Z2, "*", ["1"])


@pytest.fixture()
def terminal(Z2):
    return obj(Z2, "*", ["1", "s"])


def test_tset_counts(regular, terminal):
    assert [t.arrows for t in enumerate_tsets(regular, terminal)] == [{"1", "s"}]
    assert enumerate_tsets(terminal, regular) == []
    assert [t.sort_key for t in enumerate_tsets(regular, regular)] == [("1",), ("s",)]


def test_failed_conditions(regular, terminal):
    assert is_valid_tset(terminal, regular, {"s"}) == ["iv"]
    assert is_valid_tset(regular, terminal, {"1"}) == ["i"]
    assert is_valid_tset(regular, regular, {"1", "s"}) == ["iii"]
    assert is_valid_tset(regular, regular, set()) == ["ii"]
    assert is_valid_tset(regular, regular, {"q"}) == ["open"]


def test_tset_apply(regular):
    flip = TSet(regular, regular, {"s"})
    assert tset_apply(flip, "[1]") == "[s]"
    assert flip("[s]") == "[1]"
    with pytest.raises(UnknownPoint):
        tset_apply(flip, "[q]")


def test_tset_graph_is_an_eq_map(regular, terminal):
    (collapse,) = enumerate_tsets(regular, terminal)
    assert collapse.graph.graph == {"[1]": "[1]", "[s]": "[1]"}


def test_tset_compose(regular, terminal):
    flip = TSet(regular, regular, {"s"})
    assert tset_compose(flip, flip).arrows == {"1"}
    assert tset_compose(flip, flip) == identity_tset(regular)
    (collapse,) = enumerate_tsets(regular, terminal)
    assert tset_compose(flip, collapse).arrows == {"1", "s"}
    assert check_composition_law(flip, collapse)
    with pytest.raises(ObjectMismatch):
        tset_compose(collapse, flip)


def test_identity_tset_is_identity(P2):
    for A in enumerate_site_objects(P2):
        graph = identity_tset(A).graph.graph
        assert graph == {x: x for x in A.sheaf.points}


@pytest.mark.parametrize("name", ["Z2", "D2", "I2", "P2"])
def test_tsets_match_equivariant_maps(name, request):
    G = request.getfixturevalue(name)
    objects = enumerate_site_objects(G)
    for A in objects:
        for B in objects:
            report = check_tset_bijection(A, B)
            assert report.holds, report.problems
            assert report.tsets == len(enumerate_eq_maps(A.sheaf, B.sheaf))


def test_closed_opens(P2, D2):
    assert closed_opens(P2, OpenSubgroupoid(frozenset("ab"), frozenset(P2.arrows))) == [
        frozenset(),
        frozenset("ab"),
    ]
    identities = OpenSubgroupoid(frozenset("ab"), frozenset(["1a", "1b"]))
    assert len(closed_opens(P2, identities)) == 4
    assert closed_opens(D2, identities) == [
        frozenset(),
        frozenset("a"),
        frozenset("b"),
        frozenset("ab"),
    ]


def test_subobject_lattice(P2):
    A = obj(P2, "ab", ["1a", "1b"])
    lattice = subobject_lattice(A)
    assert len(lattice) == 4
    assert lattice.sub_from_open("a") == {"[1a]", "[ab]"}
    assert lattice.open_from_sub({"[1a]", "[ab]"}) == {"a"}
    assert lattice.subobjects == sheaf_subobjects(A.sheaf)
    with pytest.raises(InvalidSubset):
        subobject_lattice(obj(P2, "ab", P2.arrows)).sub_from_open("a")


@pytest.mark.parametrize("name", ["Z2", "D2", "I2", "P2"])
def test_frame_isomorphism(name, request):
    G = request.getfixturevalue(name)
    for A in enumerate_site_objects(G):
        assert verify_frame_isomorphism(A).holds


def test_subobject_inclusion(D2):
    A = obj(D2, "ab", ["1a", "1b"])
    inclusion = subobject_inclusion(A, "a")
    assert inclusion.source == obj(D2, "a", ["1a"])
    assert inclusion.arrows == {"1a"}
    assert not is_valid_tset(inclusion.source, A, inclusion.arrows)
    assert inclusion.graph.is_injective


def test_subobject_site_object_needs_closed_open(P2):
    with pytest.raises(InvalidSubset):
        subobject_site_object(obj(P2, "ab", P2.arrows), "a")


def test_partial_tset(D2):
    src = obj(D2, "ab", ["1a", "1b"])
    tgt = obj(D2, "a", ["1a"])
    t = partial_tset(src, tgt, {"1a"})
    assert t.source == obj(D2, "a", ["1a"])
    assert t.target == tgt
    assert t.graph.graph == {"[1a]": "[1a]"}


def test_partial_tset_violations(D2, regular, terminal):
    with pytest.raises(ConditionViolated) as exc:
        partial_tset(regular, terminal, {"1"})
    assert exc.value.conditions == ("i",)
    with pytest.raises(ConditionViolated) as exc:
        partial_tset(obj(D2, "a", ["1a"]), obj(D2, "ab", ["1a", "1b"]), {"1b"})
    assert exc.value.conditions == ("ii'",)


@given(tset_paths())
def test_tset_composition_is_associative_and_unital(case):
    _, (first, second, third) = case
    assert tset_compose(tset_compose(first, second), third) == tset_compose(
        first, tset_compose(second, third)
    )
    assert tset_compose(identity_tset(first.source), first) == first
    assert tset_compose(first, identity_tset(first.target)) == first
    assert check_composition_law(first, second)
