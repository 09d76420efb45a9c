from typing import Any, Iterable, Optional, Sequence

from sphinx.errors import SphinxError


class GpdsiteError(SphinxError):
    category = "Groupoid Site Error"


# fintop


class InvalidSubbasis(GpdsiteError):
    pass


class InvalidPartition(GpdsiteError):
    pass


class InvalidSubset(GpdsiteError):
    pass


class InvalidMap(GpdsiteError):
    pass


class TargetMismatch(GpdsiteError):
    pass


# groupoid


class NotOpenGroupoid(GpdsiteError):
    pass


class InvalidSubgroupoid(GpdsiteError):
    pass


class NotReplete(GpdsiteError):
    def __init__(self, arrow: str, message: Optional[str] = None) -> None:
        super().__init__(message or f"arrow '{arrow}' leaves the carrier")
        self.arrow = arrow


# eqsheaf


class UnknownPoint(GpdsiteError):
    pass


class AmbientMismatch(GpdsiteError):
    pass


class NotASection(GpdsiteError):
    pass


class NotContinuous(GpdsiteError):
    pass


# site


class NoComposableWitness(GpdsiteError):
    pass


class InconsistentTSet(GpdsiteError):
    pass


class ObjectMismatch(GpdsiteError):
    pass


class ConditionViolated(GpdsiteError):
    def __init__(self, conditions: Iterable[str]) -> None:
        self.conditions = tuple(conditions)
        super().__init__(
            "arrow set violates condition(s): " + ", ".join(self.conditions)
        )


# restrict


class InvalidInput(GpdsiteError):
    pass


# cli


class ParseError(GpdsiteError):
    category = "Groupoid File Error"

    def __init__(self, line: int, message: str) -> None:
        super().__init__(f"line {line}: {message}")
        self.line = line
        self.message = message


class ValidationError(GpdsiteError):
    category = "Groupoid File Error"

    def __init__(self, problems: Sequence[Any]) -> None:
        self.problems = tuple(str(p) for p in problems)
        super().__init__("groupoid axioms fail: " + "; ".join(self.problems))


class UnknownPreset(GpdsiteError):
    pass
