"""Static checking results and pipeline outcomes"""
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, FrozenSet, Mapping, Optional, Tuple

from app.models.automata import Verdict
from app.models.formula import Formula


class Tag(str, Enum):
    NEGATIVE = "n"
    POSITIVE = "p"


@dataclass(frozen=True)
class CheckedFormula:
    """
    A strategic subformula handled by the static checker.

    `checked_form` is the subformula with nested checked subformulas already
    replaced by their atoms for the same tag.
    """

    subformula: Formula
    checked_form: Formula
    tag: Tag
    atom: str


@dataclass(frozen=True)
class CheckEntry:
    state: str
    subformula: Formula
    tag: Tag
    atom: str


@dataclass(frozen=True)
class CheckResult:
    entries: Tuple[CheckEntry, ...] = ()
    checked: Tuple[CheckedFormula, ...] = ()

    def result(self, state: str) -> FrozenSet[str]:
        """Atoms attached to `state`"""
        return frozenset(e.atom for e in self.entries if e.state == state)

    @property
    def atoms(self) -> Tuple[str, ...]:
        """Every result atom, in checking order"""
        return tuple(c.atom for c in self.checked)

    @property
    def checked_subformulas(self) -> FrozenSet[Formula]:
        return frozenset(c.subformula for c in self.checked)

    def for_tag(self, tag: Tag) -> Tuple[CheckedFormula, ...]:
        return tuple(c for c in self.checked if c.tag == tag)

    def states_for(self, atom: str) -> FrozenSet[str]:
        return frozenset(e.state for e in self.entries if e.atom == atom)


@dataclass(frozen=True)
class Outcome:
    """
    Result of runtime verification for one candidate.

    `verdict` is the combined verdict; `negative_verdict` and
    `positive_verdict` are the raw outputs of the two monitors, and
    `literal_verdict` is what evaluating the two checks in sequence, with
    the bottom check last, would have produced.
    """

    verdict: Verdict
    phi_mc: Tuple[Formula, ...]
    phi_rv: Tuple[Formula, ...]
    phi_unchk: Tuple[Formula, ...]
    negative_formula: Formula
    positive_formula: Formula
    negative_verdict: Verdict
    positive_verdict: Verdict
    literal_verdict: Verdict
    conflict: bool = False
    generated: bool = True
    renamed_atoms: Mapping[str, str] = field(default_factory=dict)
    subformula_verdicts: Tuple[Tuple[Formula, Verdict], ...] = ()


@dataclass(frozen=True)
class CandidateReport:
    index: int
    core_states: Tuple[str, ...]
    check_result: CheckResult
    outcome: Outcome
    static_ms: float
    rv_ms: float


@dataclass(frozen=True)
class PipelineReport:
    """Merged result of the full procedure over all candidates"""

    verdict: Verdict
    formula: Formula
    preprocessed: Formula
    candidates: Tuple[CandidateReport, ...]
    static_ms: float
    rv_ms: float
    total_ms: float
    conflict: bool = False
    error: Optional[str] = None

    @property
    def candidate_count(self) -> int:
        return len(self.candidates)

    def timing(self) -> Dict[str, float]:
        return {"static_ms": self.static_ms, "rv_ms": self.rv_ms, "total_ms": self.total_ms}
