"""Named check results shared by the spray and certificate modules."""

from __future__ import annotations

from dataclasses import dataclass

PASS = "pass"
FAIL = "fail"
INCONCLUSIVE = "inconclusive"


@dataclass(frozen=True)
class Check:
    name: str
    status: str
    detail: str = ""
    mandatory: bool = True

    @property
    def passed(self) -> bool:
        return self.status == PASS

    def to_json(self) -> dict:
        return {"name": self.name, "status": self.status, "detail": self.detail, "mandatory": self.mandatory}


def check(name: str, ok: bool, detail: str = "", mandatory: bool = True) -> Check:
    return Check(name, PASS if ok else FAIL, detail, mandatory)
