import pytest
from hypothesis import given

from gpdsite.config import Settings
from gpdsite.errors import NotReplete, UnknownPoint
from gpdsite.galois import (
    DominationWitness,
    dominates,
    dominates_by_stalks,
    gd_closure,
    is_definable,
    verify_galois_laws,
    witness_problems,
)
from gpdsite.groupoid import OpenSubgroupoid, is_replete
from strategies import groupoids, groupoids_with_objects


def test_discrete_pair_witness(D2):
    query = dominates(D2, "b", {"a"})
    assert not query.result
    assert query.witness == DominationWitness(
        OpenSubgroupoid(frozenset("ab"), frozenset(["1a", "1b"])),
        frozenset("b"),
        frozenset(),
        "1b",
    )
    assert witness_problems(D2, query) == []


def test_tampered_witness_is_caught(D2):
    query = dominates(D2, "b", {"a"})
    forged = query._replace(witness=query.witness._replace(W=frozenset("b")))
    assert witness_problems(D2, forged) != []
    assert witness_problems(D2, query._replace(witness=None)) == [
        "negative answer has no witness"
    ]


@pytest.mark.parametrize(
    "name, objects, closure",
    [
        ("D2", "a", "a"),
        ("I2", "a", "ab"),
        ("P2", "a", "ab"),
        ("Z2", "", ""),
        ("Z2", "*", "*"),
    ],
)
def test_closures(name, objects, closure, request):
    G = request.getfixturevalue(name)
    assert gd_closure(G, objects) == frozenset(closure)


def test_is_definable(D2, I2, P2):
    assert is_definable(D2, "a")
    assert not is_definable(I2, "a")
    assert is_definable(I2, "ab")
    with pytest.raises(NotReplete) as exc:
        is_definable(P2, "a")
    assert exc.value.arrow == "ab"


def test_unknown_objects(D2):
    with pytest.raises(UnknownPoint):
        dominates(D2, "q", "a")
    with pytest.raises(UnknownPoint):
        gd_closure(D2, "q")


@pytest.mark.parametrize("name", ["Z2", "D2", "I2", "P2"])
def test_stalk_formulation_agrees(name, request):
    G = request.getfixturevalue(name)
    for x in sorted(G.objects):
        for H in ("", "a", "b", "ab", "*"):
            if set(H) <= G.objects:
                assert dominates_by_stalks(G, x, H) == dominates(G, x, H).result


@pytest.mark.parametrize("name", ["Z2", "D2", "I2", "P2"])
def test_laws_on_presets(name, request):
    report = verify_galois_laws(request.getfixturevalue(name))
    assert report.holds, report.failures
    assert report.subsets_scanned == 2 ** len(request.getfixturevalue(name).objects)
    assert not report.sampled


def test_laws_sampled(P2):
    report = verify_galois_laws(P2, Settings(sample_threshold=1, sample_count=8))
    assert report.sampled
    assert report.holds
    assert report.subsets_scanned <= 4


@given(groupoids_with_objects())
def test_closure_is_extensive_idempotent_replete(case):
    G, objects = case
    closure = gd_closure(G, objects)
    assert objects <= closure
    assert gd_closure(G, closure) == closure
    assert is_replete(G, closure)


@given(groupoids_with_objects())
def test_negative_answers_carry_sound_witnesses(case):
    G, objects = case
    for x in sorted(G.objects):
        assert witness_problems(G, dominates(G, x, objects)) == []


@given(groupoids_with_objects())
def test_stalk_formulation_agrees_on_random_groupoids(case):
    G, objects = case
    for x in sorted(G.objects):
        assert dominates_by_stalks(G, x, objects) == dominates(G, x, objects).result


@given(groupoids())
def test_open_replete_sets_are_definable(G):
    for U in G.obj_space.opens:
        if is_replete(G, U):
            assert is_definable(G, U)
