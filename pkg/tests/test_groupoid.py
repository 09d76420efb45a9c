import pytest
from hypothesis import given

from gpdsite.cli.presets import generate_preset
from gpdsite.cli.suite import subgroupoids_by_filtering
from gpdsite.errors import InvalidSubgroupoid, InvalidSubset, NotOpenGroupoid, NotReplete
from gpdsite.fintop import discrete_space, make_space, powerset
from gpdsite.groupoid import (
    OpenSubgroupoid,
    build_groupoid,
    check_functor,
    composition_restriction_failures,
    enumerate_open_subgroupoids,
    full_subgroupoid,
    identity_morphism,
    is_fibration,
    is_replete,
    open_subgroupoid,
    pullback_subgroupoid,
    replete_closure,
    replete_subgroupoid,
    replete_subsets,
    require_open,
    subgroupoid_on,
    validate_groupoid,
)
from strategies import groupoids_with_objects


def sub(objects, arrows):
    return OpenSubgroupoid(frozenset(objects), frozenset(arrows))


@pytest.mark.parametrize(
    "name, count", [("Z2", 3), ("D2", 4), ("I2", 2), ("P2", 5), ("pair:2:indiscrete", 2)]
)
def test_open_subgroupoid_counts(name, count):
    G = generate_preset(name)
    subs = enumerate_open_subgroupoids(G)
    assert len(subs) == count
    assert {s.arrows for s in subs} == set(subgroupoids_by_filtering(G))


def test_open_subgroupoids_are_sorted(Z2):
    assert enumerate_open_subgroupoids(Z2) == [
        sub([], []),
        sub("*", ["1"]),
        sub("*", ["1", "s"]),
    ]


def test_validate_presets(Z2, D2, I2, P2):
    for G in (Z2, D2, I2, P2):
        report = validate_groupoid(G)
        assert report.axioms_ok
        assert report.continuity_ok
        assert report.is_open
        assert report.composition_open
        assert report.problems == ()


def test_broken_composition_is_reported():
    arrows = discrete_space(["1", "s"])
    G = build_groupoid(
        discrete_space("*"),
        arrows,
        {"1": "*", "s": "*"},
        {"1": "*", "s": "*"},
        {"*": "1"},
        {"1": "1", "s": "s"},
        {("1", "1"): "1", ("1", "s"): "s", ("s", "1"): "s", ("s", "s"): "s"},
    )
    report = validate_groupoid(G)
    assert not report.axioms_ok
    assert "inverse law fails at s" in report.problems
    with pytest.raises(NotOpenGroupoid):
        require_open(G)


def test_missing_composite_is_reported():
    G = build_groupoid(
        discrete_space("*"),
        discrete_space(["1"]),
        {"1": "*"},
        {"1": "*"},
        {"*": "1"},
        {"1": "1"},
        {},
    )
    report = validate_groupoid(G)
    assert not report.axioms_ok
    assert not report.continuity_ok
    assert "composite 1 o 1 is missing" in report.problems


def sierpinski_identities():
    """Sierpinski objects under discrete identities."""
    units = {"1a": "a", "1b": "b"}
    return build_groupoid(
        make_space("ab", [{"b"}]),
        discrete_space(["1a", "1b"]),
        units,
        units,
        {"a": "1a", "b": "1b"},
        {g: g for g in units},
        {(g, g): g for g in units},
    )


def test_domain_map_that_is_not_open():
    G = sierpinski_identities()
    assert not validate_groupoid(G).is_open
    with pytest.raises(NotOpenGroupoid):
        enumerate_open_subgroupoids(G)


def test_replete_subgroupoid_must_be_open():
    G = sierpinski_identities()
    assert replete_subgroupoid(G, "b").arrows == {"1b"}
    with pytest.raises(NotOpenGroupoid):
        replete_subgroupoid(G, "ab")


def test_subgroupoid_on(P2):
    assert subgroupoid_on(P2, ["1a"]) == sub("a", ["1a"])
    with pytest.raises(InvalidSubgroupoid):
        subgroupoid_on(P2, ["1a", "ab"])


def test_open_subgroupoid_checks_objects(P2):
    with pytest.raises(InvalidSubgroupoid, match="domains and codomains"):
        open_subgroupoid(P2, "ab", ["1a"])


def test_iso_classes(D2, P2, Z2):
    assert D2.iso_classes == [frozenset("a"), frozenset("b")]
    assert P2.iso_classes == [frozenset("ab")]
    assert Z2.iso_classes == [frozenset("*")]


def test_composable_space(P2):
    space = P2.composable_space
    assert len(space) == 8
    assert ("ab", "1a") in space.points
    assert ("1a", "ab") not in space.points
    assert space.is_discrete
    assert space.points == P2.composable


def test_compose_sets(P2):
    assert P2.compose_sets({"ab"}, {"ba"}) == {"1b"}
    assert P2.compose_sets({"ab"}, {"ab"}) == frozenset()
    assert P2.compose_sets({"ab", "1b"}, {"1a"}) == {"ab"}


def test_replete_subgroupoid(D2):
    inclusion = replete_subgroupoid(D2, "a")
    assert inclusion.objects == {"a"}
    assert inclusion.arrows == {"1a"}
    assert check_functor(inclusion.morphism) == []
    assert is_fibration(inclusion.morphism).holds
    assert composition_restriction_failures(inclusion) == []


def test_replete_subgroupoid_rejects_leaving_arrow(P2):
    with pytest.raises(NotReplete) as exc:
        replete_subgroupoid(P2, "a")
    assert exc.value.arrow == "ab"


def test_replete_subgroupoid_rejects_unknown_objects(P2):
    with pytest.raises(InvalidSubset):
        replete_subgroupoid(P2, "q")


def test_replete_helpers(I2, P2):
    assert is_replete(I2, "a")
    assert not is_replete(P2, "a")
    assert replete_closure(P2, "a") == {"a", "b"}
    assert replete_subsets(P2) == [frozenset(), frozenset("ab")]
    assert len(replete_subsets(I2)) == 4


def test_full_subgroupoid_topology(I2):
    H = full_subgroupoid(I2, "a").source
    assert H.objects == {"a"}
    assert H.arr_space.opens == {frozenset(), frozenset(["1a"])}


def test_identity_morphism(P2):
    f = identity_morphism(P2)
    assert check_functor(f) == []
    assert pullback_subgroupoid(f, sub("a", ["1a"])) == sub("a", ["1a"])


def test_non_replete_full_inclusion_is_not_a_fibration(P2):
    f = full_subgroupoid(P2, "a")
    assert is_fibration(f) == (False, ("a", "ba"))


@given(groupoids_with_objects())
def test_replete_closure_laws(case):
    G, objects = case
    closure = replete_closure(G, objects)
    assert objects <= closure
    assert is_replete(G, closure)
    assert replete_closure(G, closure) == closure
    for smaller in powerset(objects):
        assert replete_closure(G, smaller) <= closure


@given(groupoids_with_objects())
def test_replete_subgroupoids_are_open(case):
    G, objects = case
    inclusion = replete_subgroupoid(G, replete_closure(G, objects))
    assert validate_groupoid(inclusion.sub).is_open
    assert inclusion.arrows == G.d.preimage(inclusion.objects)
