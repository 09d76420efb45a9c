"""Run settings shared by the command line and the Sphinx extension."""

from dataclasses import dataclass, fields, replace
from typing import Any

from sphinx.config import Config

REPORT_FORMATS = ("human", "machine")


@dataclass(frozen=True)
class Settings:
    seed: int = 0
    # subsets of G0 are scanned exhaustively up to this many objects
    sample_threshold: int = 12
    sample_count: int = 512
    # total-space bound when enumerating equivariant sheaves
    sheaf_points: int = 6
    random_max_objects: int = 3
    random_max_arrows: int = 10
    random_retries: int = 50
    corpus_size: int = 25
    report_format: str = "human"

    def __post_init__(self) -> None:
        if self.report_format not in REPORT_FORMATS:
            raise ValueError(
                f"unexpected report format '{self.report_format}'. "
                f"human or machine expected"
            )

    def updated(self, **changes: Any) -> "Settings":
        return replace(
            self, **{key: value for key, value in changes.items() if value is not None}
        )


CONFIG_PREFIX = "gpdsite_"

# documentation builds enumerate fewer sheaves than the command line
CONFIG_DEFAULTS = {"sheaf_points": 4}


def settings_from_config(config: Config) -> Settings:
    values = {
        field.name: getattr(config, CONFIG_PREFIX + field.name)
        for field in fields(Settings)
    }
    return Settings(**values)
