from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Optional


class Status(str, Enum):
    PROVED = "proved"
    REFUTED = "refuted"
    UNKNOWN = "unknown"


@dataclass(frozen=True)
class Verdict:
    """Three-valued answer.  Proved/Refuted carry a certificate dict that a
    verifier can re-check; Unknown records the horizon that was exhausted."""

    status: Status
    certificate: dict = field(default_factory=dict)
    horizon: Optional[int] = None

    @classmethod
    def proved(cls, **cert: Any) -> "Verdict":
        return cls(Status.PROVED, cert)

    @classmethod
    def refuted(cls, **cert: Any) -> "Verdict":
        return cls(Status.REFUTED, cert)

    @classmethod
    def unknown(cls, horizon: int = 0, **info: Any) -> "Verdict":
        return cls(Status.UNKNOWN, info, horizon)

    @property
    def proved_(self) -> bool:
        return self.status is Status.PROVED

    @property
    def refuted_(self) -> bool:
        return self.status is Status.REFUTED

    @property
    def unknown_(self) -> bool:
        return self.status is Status.UNKNOWN

    def negated(self) -> "Verdict":
        flip = {Status.PROVED: Status.REFUTED, Status.REFUTED: Status.PROVED}
        return Verdict(flip.get(self.status, self.status), self.certificate, self.horizon)

    def to_json(self) -> dict:
        out = {"status": self.status.value, "certificate": jsonable(self.certificate)}
        if self.horizon is not None:
            out["horizon"] = self.horizon
        return out


def jsonable(x: Any) -> Any:
    """Convert certificate payloads to JSON-safe values (sets render as
    expressions, fractions as strings)."""
    from fractions import Fraction
    import math

    if hasattr(x, "render"):
        return x.render()
    if isinstance(x, Verdict):
        return x.to_json()
    if isinstance(x, dict):
        return {str(k): jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [jsonable(v) for v in x]
    if isinstance(x, (set, frozenset)):
        return sorted(jsonable(v) for v in x)
    if isinstance(x, Fraction):
        return f"{x.numerator}/{x.denominator}"
    if isinstance(x, float) and math.isinf(x):
        return "inf"
    if isinstance(x, Enum):
        return x.value
    return x
