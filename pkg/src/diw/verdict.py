"""Three-valued prefix judgments with exact margins."""

from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
import json


class Status(str, Enum):
    HOLDS = "HOLDS_AT_HORIZON"
    FAILS = "FAILS_AT_HORIZON"
    INCONCLUSIVE = "INCONCLUSIVE"

    def __str__(self):
        return self.value


def _jsonable(x):
    if isinstance(x, Fraction):
        return {"num": x.numerator, "den": x.denominator}
    if isinstance(x, Enum):
        return x.value
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, Verdict):
        return x.to_dict()
    if hasattr(x, "to_json"):
        return x.to_json()
    return x


@dataclass
class Verdict:
    status: Status
    margin: Fraction | None = None
    witnesses: list = field(default_factory=list)
    certificate: dict = field(default_factory=dict)
    label: str = ""
    details: dict = field(default_factory=dict)

    def __post_init__(self):
        self.status = Status(self.status)
        if self.margin is not None:
            self.margin = Fraction(self.margin)
        if self.status is Status.FAILS and not self.witnesses:
            raise ValueError("a FAILS verdict needs at least one witness checkpoint")

    @property
    def holds(self):
        return self.status is Status.HOLDS

    @property
    def fails(self):
        return self.status is Status.FAILS

    def to_dict(self, with_details=False):
        out = {
            "status": self.status.value,
            "margin": _jsonable(self.margin),
            "witnesses": _jsonable(self.witnesses),
            "certificate": _jsonable(self.certificate),
            "label": self.label,
        }
        if with_details:
            out["details"] = _jsonable(self.details)
        return out

    def to_json(self, with_details=False):
        return json.dumps(self.to_dict(with_details), sort_keys=True)

    def __str__(self):
        margin = "-" if self.margin is None else f"{self.margin} (~{float(self.margin):.6f})"
        text = f"{self.status.value} margin={margin}"
        if self.label:
            text += f" [{self.label}]"
        return text
