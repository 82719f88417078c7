from __future__ import annotations

from dataclasses import dataclass, field


@dataclass
class ValidationReport:
    """Collects violations found by a validator; empty means valid."""

    subject: str
    failures: list[str] = field(default_factory=list)

    def fail(self, message: str) -> None:
        self.failures.append(message)

    @property
    def ok(self) -> bool:
        return not self.failures

    def __bool__(self) -> bool:
        return self.ok

    def __str__(self) -> str:
        if self.ok:
            return f"{self.subject}: valid"
        lines = [f"{self.subject}: {len(self.failures)} violation(s)"]
        lines += [f"  - {f}" for f in self.failures]
        return "\n".join(lines)
