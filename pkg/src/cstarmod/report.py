from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any

from .module import DEFAULT_TOLERANCES, ToleranceConfig


@dataclass
class VerificationReport:
    """Outcome of a verification campaign.

    ``failures`` holds one entry per violated check with enough inputs to
    replay it; ``passed`` is true exactly when there are none.
    """

    suite_id: str
    theorem_ref: str
    trials: int = 0
    failures: list[dict[str, Any]] = field(default_factory=list)
    witnesses: list[dict[str, Any]] = field(default_factory=list)
    elapsed: float = 0.0
    seed: int = 0
    config: ToleranceConfig = DEFAULT_TOLERANCES
    details: dict[str, Any] = field(default_factory=dict)
    status: str | None = None

    @property
    def passed(self) -> bool:
        return not self.failures

    def fail(self, kind: str, **info):
        self.failures.append({"kind": kind, **info})

    def to_dict(self, timing: bool = True) -> dict[str, Any]:
        from .fixtures import to_jsonable

        out = {
            "suite_id": self.suite_id,
            "theorem_ref": self.theorem_ref,
            "passed": self.passed,
            "status": self.status or ("passed" if self.passed else "violated"),
            "trials": self.trials,
            "seed": self.seed,
            "config": self.config.to_dict(),
            "failures": to_jsonable(self.failures),
            "witnesses": to_jsonable(self.witnesses),
            "details": to_jsonable(self.details),
        }
        if timing:
            out["elapsed"] = self.elapsed
        return out
