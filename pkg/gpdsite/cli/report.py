"""Check results in a human and a machine rendering.

The machine rendering is canonical JSON without timings, so rerunning a
command on the same input reproduces it byte for byte.
"""

import json
import time
from contextlib import contextmanager
from dataclasses import dataclass, field
from typing import Any, Dict, Iterator, List, Optional

from gpdsite.config import REPORT_FORMATS
from gpdsite.fintop import lex_key
from gpdsite.groupoid import OpenSubgroupoid


def jsonable(value: Any) -> Any:
    if isinstance(value, (str, int, float, bool)) or value is None:
        return value
    if isinstance(value, (set, frozenset)):
        return [jsonable(item) for item in lex_key(value)]
    if isinstance(value, OpenSubgroupoid):
        return {"objects": jsonable(value.objects), "arrows": jsonable(value.arrows)}
    if hasattr(value, "sub") and isinstance(value.sub, OpenSubgroupoid):
        return jsonable(value.sub)
    if isinstance(value, dict):
        return {str(key): jsonable(item) for key, item in value.items()}
    if isinstance(value, (list, tuple)):
        return [jsonable(item) for item in value]
    return str(value)


@dataclass
class Check:
    name: str
    passed: bool
    witness: Any = None
    seconds: float = 0.0


@dataclass
class RunReport:
    command: str
    report_format: str = "human"
    checks: List[Check] = field(default_factory=list)
    results: Dict[str, Any] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(check.passed for check in self.checks)

    def add(self, name: str, passed: bool, witness: Any = None, seconds: float = 0.0) -> Check:
        check = Check(name, bool(passed), witness, seconds)
        self.checks.append(check)
        return check

    @contextmanager
    def timed(self, name: str) -> Iterator[Check]:
        """Add a check that passes unless the body sets ``passed`` to False."""
        check = self.add(name, True)
        start = time.perf_counter()
        try:
            yield check
        finally:
            check.seconds = time.perf_counter() - start

    def machine(self) -> str:
        data = {
            "command": self.command,
            "passed": self.passed,
            "checks": [
                {"name": c.name, "passed": c.passed, "witness": jsonable(c.witness)}
                for c in self.checks
            ],
            "results": jsonable(self.results),
        }
        return json.dumps(data, sort_keys=True, indent=2) + "\n"

    def human(self, timings: bool = True) -> str:
        lines = [self.command]
        for key in sorted(self.results):
            lines.append(f"  {key}: {_human_value(self.results[key])}")
        for check in self.checks:
            status = "ok" if check.passed else "FAILED"
            line = f"  [{status}] {check.name}"
            if timings:
                line += f" ({check.seconds:.3f}s)"
            lines.append(line)
            if not check.passed and check.witness is not None:
                lines.append(f"      witness: {_human_value(check.witness)}")
        if self.checks:
            failed = sum(not check.passed for check in self.checks)
            lines.append(f"{len(self.checks) - failed} passed, {failed} failed")
        return "\n".join(lines) + "\n"

    def render(self, format: Optional[str] = None, timings: bool = True) -> str:
        format = format or self.report_format
        if format not in REPORT_FORMATS:
            raise ValueError(f"unexpected report format '{format}'")
        return self.machine() if format == "machine" else self.human(timings)


def _human_value(value: Optional[Any]) -> str:
    return json.dumps(jsonable(value), sort_keys=True)
