import pytest

from gpdsite.cli.fileformat import parse_groupoid, read_groupoid, serialize_groupoid, write_groupoid
from gpdsite.cli.presets import generate_preset
from gpdsite.errors import ParseError, ValidationError
from gpdsite.groupoid import validate_groupoid

PAIR = """\
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
"""


def test_parse_pair():
    G = parse_groupoid(PAIR)
    assert G.objects == {"a", "b"}
    assert G.i("ab") == "ba"
    assert G.i("1a") == "1a"
    assert G.compose("ba", "ab") == "1a"
    assert G.compose("ab", "1a") == "ab"
    assert G.obj_space.is_indiscrete
    assert len(G.arr_space.opens) == 4
    report = validate_groupoid(G)
    assert report.axioms_ok and report.continuity_ok and report.is_open


@pytest.mark.parametrize("name", ["Z2", "I2", "P2", "cyclic:3", "random:5"])
def test_serialize_is_canonical(name):
    G = generate_preset(name)
    text = serialize_groupoid(G)
    assert parse_groupoid(text) == G
    assert serialize_groupoid(parse_groupoid(text)) == text


def test_read_and_write(tmp_path, P2):
    path = tmp_path / "p2.gpd"
    write_groupoid(P2, path)
    assert read_groupoid(path) == P2


def test_missing_composite():
    text = PAIR.replace("  ba . ab = 1a\n", "")
    with pytest.raises(ValidationError) as exc:
        parse_groupoid(text)
    assert "composite ba o ab is missing" in exc.value.problems


def test_missing_inverse():
    text = PAIR.replace("inverse:\n  ab = ba\n", "inverse:\n")
    with pytest.raises(ValidationError) as exc:
        parse_groupoid(text)
    assert exc.value.problems == ("arrow 'ab' has no inverse", "arrow 'ba' has no inverse")


@pytest.mark.parametrize(
    "old, new, line, message",
    [
        ("  ab: a -> b\n", "  ab a -> b\n", 6, "expected 'arrow: source -> target'"),
        ("  ab: a -> b\n", "  ab: a -> q\n", 6, "unknown object 'q'"),
        ("  1b: b -> b\n", "  1a: b -> b\n", 5, "arrow '1a' is declared twice"),
        ("  ba . ab = 1a\n", "  ba ab 1a\n", 14, "expected 'second . first = composite'"),
        ("  basis ab ba\n", "  block ab ba\n", 19, "expected 'discrete', 'indiscrete' or 'basis', got 'block'"),
        ("objects: a b\n", "objects: a a\n", 2, "object 'a' is declared twice"),
        ("# two", "junk\n# two", 1, "expected a section header"),
    ],
)
def test_parse_errors(old, new, line, message):
    with pytest.raises(ParseError) as exc:
        parse_groupoid(PAIR.replace(old, new))
    assert exc.value.line == line
    assert exc.value.message == message


def test_missing_section():
    with pytest.raises(ParseError, match="missing section 'topology_arrows'"):
        parse_groupoid(PAIR.split("topology_arrows")[0])


def test_repeated_section():
    with pytest.raises(ParseError, match="section 'objects' appears twice"):
        parse_groupoid(PAIR + "objects: c\n")
