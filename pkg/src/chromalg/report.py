"""Report objects shared by the verification suites and the CLI."""

from __future__ import annotations

from dataclasses import dataclass, field


@dataclass
class Check:
    id: str
    ok: bool
    witness: str | None = None

    def to_json(self):
        out = {"id": self.id, "status": "pass" if self.ok else "fail"}
        if self.witness is not None:
            out["witness"] = self.witness
        return out


@dataclass
class Report:
    suite: str
    checks: list = field(default_factory=list)

    def record(self, id: str, ok: bool, witness: str | None = None) -> bool:
        self.checks.append(Check(id, bool(ok), None if ok else witness))
        return bool(ok)

    @property
    def ok(self) -> bool:
        return all(c.ok for c in self.checks)

    def failures(self):
        return [c for c in self.checks if not c.ok]

    def to_json(self):
        return {
            "suite": self.suite,
            "ok": self.ok,
            "checks": [c.to_json() for c in self.checks],
        }

    def merge(self, other: "Report"):
        self.checks.extend(other.checks)
        return self
