import json
from collections.abc import Sequence
from pathlib import Path
from typing import IO, TYPE_CHECKING, Any, override

import click
from click._compat import get_text_stderr

if TYPE_CHECKING:
    from isacase.netmodel import Violation


class IsacError(click.ClickException):
    ERROR_TYPE = "Error"
    exit_code = 1

    def __init__(self, message: str) -> None:
        super().__init__(message)

    @override
    def show(self, file: IO[Any] | None = None) -> None:
        if file is None:
            file = get_text_stderr()

        click.echo(f"{self.ERROR_TYPE}: {self.format_message()}", file=file)


class DomainError(IsacError):
    ERROR_TYPE = "DomainError"


class NonConvergence(IsacError):
    ERROR_TYPE = "NonConvergence"

    def __init__(self, value: float, error: float, message: str) -> None:
        super().__init__(f"{message} (value={value!r}, error estimate={error!r})")
        self.value = value
        self.error = error


class RankDeficiency(IsacError):
    ERROR_TYPE = "RankDeficiency"


class EmptyRealization(IsacError):
    ERROR_TYPE = "EmptyRealization"


class AcceptanceFailure(IsacError):
    ERROR_TYPE = "AcceptanceFailure"


class ConfigError(IsacError):
    ERROR_TYPE = "ConfigError"
    exit_code = 2

    def __init__(self, path: Path | None, message: str) -> None:
        super().__init__(f"{path or '<config>'}: {message}")
        self.path = path


class AllocationError(IsacError):
    ERROR_TYPE = "AllocationError"
    exit_code = 2

    def __init__(self, violations: Sequence["Violation"]) -> None:
        super().__init__(f"{len(violations)} constraint(s) violated")
        self.violations = tuple(violations)

    @override
    def show(self, file: IO[Any] | None = None) -> None:
        if file is None:
            file = get_text_stderr()

        for violation in self.violations:
            click.echo(json.dumps(violation.as_dict(), sort_keys=True), file=file)


class CacheError(IsacError):
    ERROR_TYPE = "CacheError"

    def __init__(self, path: Path | None, message: str) -> None:
        super().__init__(f"{path or '<memory>'}: {message}")
        self.path = path
