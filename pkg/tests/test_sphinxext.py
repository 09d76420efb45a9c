import json
from typing import List

import pytest
from bs4 import Tag
from sphinx.application import Sphinx

from gpdsite.errors import ParseError


@pytest.mark.sphinx("html", testroot="report")
def test_report(reports: List[Tag], report_texts: List[str]):
    assert len(reports) == 2
    pair, preset = report_texts
    assert pair.startswith("check pair.gpd\n")
    assert "[ok] groupoid\n" in pair
    assert "[ok] subgroupoids\n" in pair
    assert "[ok] frames\n" in pair
    assert "3 passed, 0 failed" in pair
    # no timings in built documents
    assert "s)" not in pair
    assert preset.startswith("check D2\n")
    assert "[ok] domination" in preset


@pytest.mark.sphinx("html", testroot="report")
def test_report_tracks_the_file(content: Sphinx):
    dependencies = content.env.dependencies["index"]
    assert any(str(path).endswith("pair.gpd") for path in dependencies)


@pytest.mark.sphinx("html", testroot="report")
def test_docs_use_a_smaller_sheaf_bound(content: Sphinx):
    assert content.config.gpdsite_sheaf_points == 4


@pytest.mark.sphinx("html", testroot="missing")
def test_missing_file(content: Sphinx, reports: List[Tag]):
    assert len(reports) == 1
    warnings = content._warning.getvalue()
    assert "groupoid file not readable: missing.gpd" in warnings


@pytest.mark.sphinx("html", testroot="bad-file")
def test_bad_file(app_with_local_user_config):
    with pytest.raises(ParseError) as exc:
        app_with_local_user_config.build()
    assert exc.value.line == 9
    assert exc.value.message == "expected 'discrete', 'indiscrete' or 'basis', got 'sparse'"


@pytest.mark.sphinx("html", testroot="config")
def test_config_values(content: Sphinx, report_texts: List[str]):
    assert content.config.gpdsite_sheaf_points == 2
    machine, human = report_texts
    data = json.loads(machine)
    assert data["passed"] is True
    assert [check["name"] for check in data["checks"]] == ["groupoid", "generation"]
    assert human.startswith("check I2\n")
