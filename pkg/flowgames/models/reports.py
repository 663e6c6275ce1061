from typing import Any, Literal

from pydantic import BaseModel

Verdict = Literal["equilibrium", "not_equilibrium"]


class WitnessEntry(BaseModel):
    player: str
    level: int | None = None
    detail: str = ""


class VerificationReport(BaseModel):
    kind: str
    verdict: Verdict
    witnesses: list[WitnessEntry] = []
    seed: int
    source: str | None = None

    @property
    def ok(self) -> bool:
        return self.verdict == "equilibrium"


class BatchReport(BaseModel):
    seed: int
    results: list[VerificationReport]

    @property
    def ok(self) -> bool:
        return all(r.ok for r in self.results)


class SolveReport(BaseModel):
    kind: str
    method: str
    seed: int
    converged: bool | None = None
    rounds: int | None = None
    lp_count: int | None = None
    incomplete: bool | None = None
    profiles: list[dict[str, dict[str, str]]] = []
    details: dict[str, Any] = {}


class FixtureEntry(BaseModel):
    fixture: str
    profile: str
    expected: Verdict
    verdict: Verdict
    witness: str | None = None


class FixtureReport(BaseModel):
    seed: int
    entries: list[FixtureEntry]

    @property
    def ok(self) -> bool:
        """Every entry got the verdict its fixture documents."""
        return all(e.verdict == e.expected for e in self.entries)
