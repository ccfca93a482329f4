from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any


@dataclass(frozen=True)
class Violation:
    law: str
    element: Any
    detail: str

    def __str__(self):
        return f"{self.law}: {self.element}: {self.detail}"


@dataclass
class Report:
    """Per-law outcome of a validation; every violated instance is kept."""

    laws: tuple[str, ...]
    violations: list[Violation] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def __bool__(self):
        return self.ok

    def add(self, law, element, detail):
        self.violations.append(Violation(law, element, detail))

    def failed(self, law) -> list[Violation]:
        return [v for v in self.violations if v.law == law]

    def summary(self) -> str:
        return ", ".join(f"{law}: {'FAIL' if self.failed(law) else 'ok'}" for law in self.laws)

    def __str__(self):
        return "\n".join([self.summary(), *map(str, self.violations)])
