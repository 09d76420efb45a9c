import pytest

from gpdsite.errors import InvalidMap, InvalidPartition, InvalidSubbasis, TargetMismatch
from gpdsite.fintop import (
    CtsMap,
    FinSpace,
    check_map,
    compose_maps,
    discrete_space,
    fiber_product,
    identity_map,
    indiscrete_space,
    make_space,
    powerset,
    quotient_space,
    subspace,
    topology_problems,
)


@pytest.fixture()
def chain():
    return make_space("xyz", [{"x"}, {"x", "y"}])


def test_make_space_generates_unions_and_meets(chain):
    assert chain.sorted_opens == [
        frozenset(),
        frozenset("x"),
        frozenset("xy"),
        frozenset("xyz"),
    ]
    assert chain.neighbourhoods["y"] == frozenset("xy")
    assert topology_problems(chain) == []


def test_make_space_meets_overlapping_members():
    space = make_space("abc", [{"a", "b"}, {"b", "c"}])
    assert space.is_open({"b"})
    assert space.basis == {frozenset("ab"), frozenset("b"), frozenset("bc")}


def test_make_space_rejects_stray_member():
    with pytest.raises(InvalidSubbasis):
        make_space("ab", [{"a", "q"}])


def test_extreme_topologies():
    assert discrete_space("ab").is_discrete
    assert indiscrete_space("ab").is_indiscrete
    assert len(discrete_space("abc").opens) == 8
    assert indiscrete_space("abc").opens == {frozenset(), frozenset("abc")}


def test_closed_sets_and_interior(chain):
    assert chain.is_closed({"z"})
    assert chain.is_closed({"y", "z"})
    assert not chain.is_closed({"x"})
    assert chain.interior({"y", "z"}) == frozenset()
    assert chain.opens_within({"x", "y"}) == [frozenset(), frozenset("x"), frozenset("xy")]


def test_powerset_is_sorted_by_size():
    subsets = list(powerset("ba"))
    assert subsets == [frozenset(), frozenset("a"), frozenset("b"), frozenset("ab")]


def test_map_must_be_total():
    with pytest.raises(InvalidMap):
        CtsMap(discrete_space("ab"), discrete_space("c"), {"a": "c"})
    with pytest.raises(InvalidMap):
        CtsMap(discrete_space("a"), discrete_space("c"), {"a": "q"})


def test_check_map_identity(chain):
    assert check_map(identity_map(chain)) == (True, True, True)


def test_collapsing_an_indiscrete_pair_is_not_local_homeo():
    f = CtsMap(indiscrete_space("pq"), discrete_space("*"), {"p": "*", "q": "*"})
    report = check_map(f)
    assert report.continuous
    assert report.open_map
    assert not report.local_homeo


def test_collapsing_a_discrete_pair_is_local_homeo():
    f = CtsMap(discrete_space("pq"), discrete_space("*"), {"p": "*", "q": "*"})
    assert check_map(f).local_homeo


def test_inclusion_of_closed_point_is_not_open(chain):
    point = subspace(chain, {"z"})
    f = CtsMap(point, chain, {"z": "z"})
    assert check_map(f) == (True, False, False)


def test_compose_maps(chain):
    collapse = CtsMap(chain, discrete_space("*"), {x: "*" for x in "xyz"})
    composed = compose_maps(collapse, identity_map(chain))
    assert composed.graph == collapse.graph


def test_quotient_space_names_classes_by_minimum():
    space, q = quotient_space(discrete_space("xyz"), [{"x", "y"}, {"z"}])
    assert space.points == {"[x]", "[z]"}
    assert space.is_discrete
    assert q("y") == "[x]"


def test_quotient_space_keeps_saturated_opens_only(chain):
    space, _ = quotient_space(chain, [{"x", "z"}, {"y"}])
    # {x} and {x, y} are not saturated
    assert space.is_indiscrete


@pytest.mark.parametrize(
    "classes", [[{"x"}, {"x", "y"}], [{"x"}], [set(), {"x", "y", "z"}]]
)
def test_quotient_space_rejects_non_partitions(chain, classes):
    with pytest.raises(InvalidPartition):
        quotient_space(chain, classes)


def test_fiber_product():
    base = discrete_space("*")
    f = CtsMap(discrete_space("xy"), base, {"x": "*", "y": "*"})
    g = CtsMap(indiscrete_space("u"), base, {"u": "*"})
    space, first, second = fiber_product(f, g)
    assert space.points == {("x", "u"), ("y", "u")}
    assert space.is_discrete
    assert first(("y", "u")) == "y"
    assert second(("y", "u")) == "u"


def test_fiber_product_needs_shared_target():
    f = identity_map(discrete_space("a"))
    g = identity_map(discrete_space("b"))
    with pytest.raises(TargetMismatch):
        fiber_product(f, g)


def test_space_is_kept_as_neighbourhoods(chain):
    assert chain == FinSpace(
        frozenset("xyz"),
        {"x": frozenset("x"), "y": frozenset("xy"), "z": frozenset("xyz")},
    )
    assert chain.is_open({"x", "y"})
    assert not chain.is_open({"y"})
    assert not chain.is_open({"x", "q"})
    # deciding openness does not list the opens
    assert "opens" not in chain.__dict__


@pytest.mark.parametrize(
    "neighbourhoods, problem",
    [
        ({"a": {"a"}, "b": {"a"}}, "'b' is not in its own neighbourhood"),
        (
            {"a": {"a", "b"}, "b": {"b", "c"}, "c": {"c"}},
            "neighbourhood of 'b' is not inside that of 'a'",
        ),
        ({"a": {"a", "q"}, "b": {"b"}}, "neighbourhood of 'a' has stray points"),
    ],
)
def test_topology_problems(neighbourhoods, problem):
    points = frozenset(neighbourhoods)
    assert problem in topology_problems(FinSpace(points, neighbourhoods))


def test_fiber_product_neighbourhoods_are_products():
    base = discrete_space("*")
    f = CtsMap(make_space("xy", [{"x"}]), base, {"x": "*", "y": "*"})
    g = CtsMap(make_space("uv", [{"u"}]), base, {"u": "*", "v": "*"})
    space, _, _ = fiber_product(f, g)
    assert space.neighbourhoods[("y", "v")] == space.points
    assert space.neighbourhoods[("x", "v")] == {("x", "u"), ("x", "v")}
    assert space.neighbourhoods[("x", "u")] == {("x", "u")}
    assert len(space.opens) == 6
    assert topology_problems(space) == []
