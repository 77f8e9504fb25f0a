"""Check report entity produced by every verifier."""

from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, List, Optional


class CheckStatus(Enum):
    """Outcome of a verification check."""
    PASS = "pass"
    FAIL = "fail"
    INCONCLUSIVE = "inconclusive"


@dataclass
class CheckReport:
    """
    Result of one numerical check.

    ``estimates`` and ``stderrs`` share keys; ``threshold`` is the bound the
    estimates were compared against (after any sigma allowance is applied the
    comparison itself is recorded in ``details``).
    """

    name: str
    status: CheckStatus
    trials: int
    seed: int
    estimates: Dict[str, float] = field(default_factory=dict)
    stderrs: Dict[str, float] = field(default_factory=dict)
    threshold: Optional[float] = None
    parameters: Dict[str, Any] = field(default_factory=dict)
    details: List[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return self.status is CheckStatus.PASS

    @classmethod
    def from_outcome(
        cls,
        name: str,
        ok: bool,
        trials: int,
        seed: int,
        inconclusive: bool = False,
        **kwargs: Any,
    ) -> "CheckReport":
        if inconclusive:
            status = CheckStatus.INCONCLUSIVE
        else:
            status = CheckStatus.PASS if ok else CheckStatus.FAIL
        return cls(name=name, status=status, trials=trials, seed=seed, **kwargs)

    def add_estimate(self, key: str, value: float, stderr: float = 0.0) -> None:
        self.estimates[key] = float(value)
        self.stderrs[key] = float(stderr)

    def to_rows(self) -> List[Dict[str, Any]]:
        """One flat row per estimate, in insertion order."""
        base = {
            "check": self.name,
            "status": self.status.value,
            "threshold": self.threshold,
            "trials": self.trials,
            "seed": self.seed,
        }
        if not self.estimates:
            return [{**base, "quantity": None, "estimate": None, "stderr": None,
                     "details": "; ".join(self.details)}]
        rows = []
        for i, (key, value) in enumerate(self.estimates.items()):
            rows.append({
                **base,
                "quantity": key,
                "estimate": value,
                "stderr": self.stderrs.get(key),
                "details": "; ".join(self.details) if i == 0 else "",
            })
        return rows

    def __str__(self) -> str:
        return (
            f"CheckReport({self.name}: {self.status.value}, "
            f"trials={self.trials}, seed={self.seed})"
        )
