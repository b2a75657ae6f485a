from __future__ import annotations

from dataclasses import dataclass, field


@dataclass
class Report:
    """Outcome of a sampled check: the worst residual seen and extra details."""

    check: str
    samples: int
    max_violation: float
    passed: bool
    details: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        out = {
            "check": self.check,
            "samples": self.samples,
            "max_violation": float(self.max_violation),
            "passed": bool(self.passed),
        }
        if self.details:
            out["details"] = self.details
        return out


class ViolationTracker:
    """Running maximum of named residuals."""

    def __init__(self):
        self.worst: dict[str, float] = {}

    def add(self, name: str, value: float) -> None:
        v = float(value)
        if v != v:  # NaN must fail loudly
            v = float("inf")
        self.worst[name] = max(self.worst.get(name, 0.0), v)

    @property
    def max(self) -> float:
        return max(self.worst.values(), default=0.0)

    def report(self, check: str, samples: int, tol: float, **details) -> Report:
        details = {"tolerance": tol, "residuals": dict(sorted(self.worst.items())), **details}
        return Report(check, samples, self.max, self.max <= tol, details)
