from dataclasses import fields
from pathlib import Path
from typing import Any, Dict, List

from docutils import nodes
from docutils.nodes import Node
from docutils.parsers.rst import directives
from sphinx.application import Sphinx
from sphinx.config import ENUM
from sphinx.util import logging
from sphinx.util.docutils import SphinxDirective

from gpdsite import __version__
from gpdsite.cli.fileformat import parse_groupoid
from gpdsite.cli.presets import generate_preset
from gpdsite.cli.report import RunReport
from gpdsite.cli.suite import CHECKS, run_suite
from gpdsite.config import (
    CONFIG_DEFAULTS,
    CONFIG_PREFIX,
    REPORT_FORMATS,
    Settings,
    settings_from_config,
)

logger = logging.getLogger(__name__)


def format_spec(argument: Any) -> str:
    return directives.choice(argument, REPORT_FORMATS)


def checks_spec(argument: Any) -> List[str]:
    if argument is None or argument.strip() == "all":
        return list(CHECKS)
    names = [name.strip() for name in argument.split(",") if name.strip()]
    for name in names:
        directives.choice(name, list(CHECKS))
    return names


class GroupoidReport(SphinxDirective):
    """Run the verification suite on a groupoid file and show the report."""

    optional_arguments = 1
    option_spec = {
        "checks": checks_spec,
        "format": format_spec,
        "preset": directives.unchanged_required,
    }

    def run(self) -> List[Node]:
        settings = settings_from_config(self.config)
        if "format" in self.options:
            settings = settings.updated(report_format=self.options["format"])

        if "preset" in self.options:
            label = self.options["preset"]
            G = generate_preset(label, settings)
        elif self.arguments:
            label, abspath = self.env.relfn2path(self.arguments[0])
            try:
                text = Path(abspath).read_text()
            except OSError:
                logger.warning(
                    f"groupoid file not readable: {label}",
                    location=(self.env.docname, self.lineno),
                )
                return []
            self.env.note_dependency(label)
            G = parse_groupoid(text)
        else:
            raise self.error("groupoid-report needs a file argument or a :preset: option")

        report = RunReport(f"check {label}", settings.report_format)
        run_suite(G, settings, self.options.get("checks"), report)
        # timings would make rebuilds differ
        text = report.render(timings=False)
        block = nodes.literal_block(text, text)
        block["language"] = "text"
        block["classes"].append("gpdsite-report")
        return [block]


def setup(app: Sphinx) -> Dict[str, Any]:
    app.add_directive("groupoid-report", GroupoidReport)
    for field in fields(Settings):
        name = CONFIG_PREFIX + field.name
        default = CONFIG_DEFAULTS.get(field.name, field.default)
        if field.name == "report_format":
            # noinspection PyTypeChecker
            app.add_config_value(name, default, "env", ENUM(*REPORT_FORMATS))
        else:
            app.add_config_value(name, default, "env")
    return {"version": __version__, "parallel_read_safe": True}
