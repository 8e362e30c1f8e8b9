"""Property-check result containers.

Every verifier in the package returns a :class:`SuiteReport`, a named bundle
of :class:`PropertyReport` items.  Failures are recorded, never raised.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Any

import numpy as np


def _jsonable(obj: Any) -> Any:
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    if isinstance(obj, float) and not np.isfinite(obj):
        return str(obj)
    return obj


@dataclass
class PropertyReport:
    """Outcome of one checked property.

    ``worst_violation`` is the largest amount by which the property was
    missed (0.0 when nothing failed); ``witness`` describes that worst case.
    """

    item: str
    trials: int = 0
    failures: int = 0
    worst_violation: float = 0.0
    witness: dict[str, Any] | None = None

    @property
    def passed(self) -> bool:
        return self.failures == 0

    def record(self, ok: bool, violation: float = 0.0, witness: dict | None = None) -> None:
        self.trials += 1
        if ok:
            return
        self.failures += 1
        if self.witness is None or violation > self.worst_violation:
            self.worst_violation = float(violation)
            self.witness = witness

    def record_batch(self, ok: np.ndarray, violation: np.ndarray, witness) -> None:
        """Record a vector of trials at once.

        ``witness`` is called with the index of the worst failing trial and
        must return the witness dict for it.
        """
        ok = np.asarray(ok, dtype=bool)
        self.trials += int(ok.size)
        bad = ~ok
        n_bad = int(bad.sum())
        if n_bad == 0:
            return
        self.failures += n_bad
        viol = np.where(bad, np.asarray(violation, dtype=float), -np.inf)
        i = int(np.argmax(viol))
        if self.witness is None or viol[i] > self.worst_violation:
            self.worst_violation = float(viol[i])
            self.witness = witness(i)

    def to_dict(self) -> dict[str, Any]:
        return _jsonable(
            {
                "item": self.item,
                "trials": self.trials,
                "failures": self.failures,
                "worst_violation": self.worst_violation,
                "witness": self.witness or {},
            }
        )


@dataclass
class SuiteReport:
    name: str
    items: list[PropertyReport] = field(default_factory=list)
    extra: dict[str, Any] = field(default_factory=dict)

    def add(self, item: str) -> PropertyReport:
        rep = PropertyReport(item)
        self.items.append(rep)
        return rep

    def __getitem__(self, item: str) -> PropertyReport:
        for rep in self.items:
            if rep.item == item:
                return rep
        raise KeyError(item)

    def __contains__(self, item: str) -> bool:
        return any(rep.item == item for rep in self.items)

    @property
    def passed(self) -> bool:
        return all(rep.passed for rep in self.items)

    def failed_items(self) -> list[str]:
        return [rep.item for rep in self.items if not rep.passed]

    def to_dict(self) -> dict[str, Any]:
        return _jsonable(
            {
                "name": self.name,
                "passed": self.passed,
                "items": [rep.to_dict() for rep in self.items],
                **({"extra": self.extra} if self.extra else {}),
            }
        )

    def to_json(self, **kw) -> str:
        return json.dumps(self.to_dict(), **kw)

    def summary(self) -> str:
        lines = [f"{self.name}: {'PASS' if self.passed else 'FAIL'}"]
        for rep in self.items:
            status = "ok" if rep.passed else "FAIL"
            line = f"  [{status:>4}] {rep.item}: {rep.failures}/{rep.trials} failures"
            if not rep.passed:
                line += f", worst violation {rep.worst_violation:.3g}"
            lines.append(line)
        return "\n".join(lines)
