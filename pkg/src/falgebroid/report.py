"""Check reports: the uniform result type for all verification operations."""

from __future__ import annotations

from dataclasses import dataclass, field


@dataclass
class Check:
    """Outcome of one verified instance of a law."""

    law: str
    instance: str
    passed: bool
    witness: str | None = None

    def to_dict(self) -> dict:
        d = {"law": self.law, "instance": self.instance, "pass": self.passed}
        if self.witness is not None:
            d["witness"] = self.witness
        return d


@dataclass
class Report:
    subject: str
    checks: list[Check] = field(default_factory=list)

    @property
    def overall(self) -> bool:
        return all(c.passed for c in self.checks)

    def add(self, law: str, instance: str, passed: bool, witness: str | None = None):
        self.checks.append(Check(law, instance, passed, witness if not passed else None))

    def extend_from(self, other: "Report"):
        self.checks.extend(other.checks)

    def failures(self) -> list[Check]:
        return [c for c in self.checks if not c.passed]

    def to_dict(self) -> dict:
        return {
            "subject": self.subject,
            "overall": "pass" if self.overall else "fail",
            "checks": [c.to_dict() for c in self.checks],
        }

    def summary(self) -> str:
        lines = [f"subject: {self.subject}"]
        for c in self.checks:
            status = "pass" if c.passed else "FAIL"
            line = f"  [{status}] {c.law} @ {c.instance}"
            if c.witness:
                line += f"  witness: {c.witness}"
            lines.append(line)
        lines.append(f"overall: {'pass' if self.overall else 'fail'}")
        return "\n".join(lines)
