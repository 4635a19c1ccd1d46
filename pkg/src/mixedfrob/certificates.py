"""Machine-checkable certificates: named exact residual checks."""

from __future__ import annotations

from dataclasses import dataclass, field


@dataclass(frozen=True)
class Check:
    """One verified identity; residual is '0' on success, else a witness."""

    name: str
    ok: bool
    residual: str = "0"

    def as_dict(self) -> dict:
        return {"name": self.name, "ok": self.ok, "residual": self.residual}


@dataclass
class Certificate:
    """Ordered list of checks with an overall verdict."""

    title: str
    checks: list[Check] = field(default_factory=list)
    notes: list[str] = field(default_factory=list)

    def add(self, name: str, ok: bool, residual: str = "") -> None:
        self.checks.append(Check(name, ok, "0" if ok else (residual or "nonzero")))

    def require(self, name: str, ok: bool, residual: str = "") -> None:
        self.add(name, ok, residual)

    def note(self, text: str) -> None:
        self.notes.append(text)

    def extend(self, other: "Certificate", prefix: str = "") -> None:
        for c in other.checks:
            self.checks.append(Check(prefix + c.name, c.ok, c.residual))
        self.notes.extend(other.notes)

    @property
    def ok(self) -> bool:
        return all(c.ok for c in self.checks)

    def failures(self) -> list[Check]:
        return [c for c in self.checks if not c.ok]

    def as_dict(self) -> dict:
        return {
            "title": self.title,
            "ok": self.ok,
            "checks": [c.as_dict() for c in self.checks],
            "notes": list(self.notes),
        }

    def summary(self) -> str:
        status = "PASS" if self.ok else "FAIL"
        lines = [f"[{status}] {self.title} ({len(self.checks)} checks)"]
        for c in self.failures():
            lines.append(f"  FAIL {c.name}: {c.residual}")
        return "\n".join(lines)
