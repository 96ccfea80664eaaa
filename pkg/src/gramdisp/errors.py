"""Exception hierarchy shared by every pipeline stage."""
from typing import Iterable, Optional


class GramDispError(ValueError):
    """Base class for all errors raised by gramdisp."""


class MalformedLine(GramDispError):
    def __init__(self, line_no: int, source: Optional[str] = None, detail: str = ""):
        self.line_no = line_no
        self.source = source
        where = f"{source}:{line_no}" if source else f"line {line_no}"
        super().__init__(f"Malformed line at {where}" + (f": {detail}" if detail else ""))


class InvalidEncoding(GramDispError):
    def __init__(self, line_no: int, source: Optional[str] = None):
        self.line_no = line_no
        self.source = source
        where = f"{source}:{line_no}" if source else f"line {line_no}"
        super().__init__(f"Input is not valid UTF-8 at {where}")


class BadDegree(GramDispError):
    def __init__(self, value: object, line_no: Optional[int] = None, source: Optional[str] = None):
        self.value = value
        self.line_no = line_no
        where = ""
        if line_no is not None:
            where = f" at {source}:{line_no}" if source else f" at line {line_no}"
        super().__init__(f"Degree must be an integer in 1-4, got {value!r}{where}")


class DuplicateForm(GramDispError):
    def __init__(self, form: str):
        self.form = form
        super().__init__(f"Duplicate gold form: {form!r}")


class EmptyGoldSet(GramDispError):
    def __init__(self, source: Optional[str] = None):
        super().__init__(f"Gold set is empty{f': {source}' if source else ''}")


class ConfigError(GramDispError):
    """Invalid or unknown configuration value."""


class FingerprintMismatch(GramDispError):
    def __init__(self, expected: str, found: str, what: str = "artifact"):
        self.expected = expected
        self.found = found
        super().__init__(
            f"{what} was produced under config {found[:12]}, current config is {expected[:12]}"
        )


class NoContexts(GramDispError):
    """Entropy requested for an empty context distribution."""


class UnknownTarget(GramDispError):
    def __init__(self, target_id: str):
        self.target_id = target_id
        super().__init__(f"Unknown target: {target_id!r}")


class DomainError(GramDispError):
    """Argument outside the domain of a statistical function."""


class DegenerateSample(GramDispError):
    """A correlation input has a constant side."""


class NoPositives(GramDispError):
    """Average precision over a ranking without positive items."""


class EmptyClass(GramDispError):
    def __init__(self, degree: int):
        self.degree = degree
        super().__init__(f"No evaluated items with degree {degree}")


class MissingScores(GramDispError):
    def __init__(self, missing: Iterable[str]):
        self.missing = sorted(missing)
        preview = ", ".join(self.missing[:10])
        more = f" (+{len(self.missing) - 10} more)" if len(self.missing) > 10 else ""
        super().__init__(f"{len(self.missing)} gold items have no score row: {preview}{more}")


class CorruptArtifact(GramDispError):
    def __init__(self, source: str, detail: str = ""):
        self.source = source
        super().__init__(f"Corrupt artifact {source}" + (f": {detail}" if detail else ""))
