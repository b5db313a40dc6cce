from __future__ import annotations

from dataclasses import dataclass, field


@dataclass
class InvariantReport:
    """Pass/fail tally for one predicate over a corpus (or one exhaustive walk)."""

    predicate: str
    corpus: str
    passed: int = 0
    failed: int = 0
    counterexamples: list[dict] = field(default_factory=list)
    seconds: float = 0.0
    notes: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return self.failed == 0

    def record(self, ok: bool, witness: dict | None = None) -> None:
        if ok:
            self.passed += 1
        else:
            self.failed += 1
            self.counterexamples.append(witness or {})

    def merge(self, other: InvariantReport) -> None:
        self.passed += other.passed
        self.failed += other.failed
        self.counterexamples.extend(other.counterexamples)
        self.seconds += other.seconds
        for key, value in other.notes.items():
            if isinstance(value, int) and isinstance(self.notes.get(key), int):
                self.notes[key] += value
            else:
                self.notes.setdefault(key, value)

    def to_json(self, timings: bool = True) -> dict:
        out = {
            "predicate": self.predicate,
            "corpus": self.corpus,
            "passed": self.passed,
            "failed": self.failed,
            "counterexamples": self.counterexamples,
            "notes": self.notes,
        }
        if timings:
            out["seconds"] = round(self.seconds, 3)
        return out
