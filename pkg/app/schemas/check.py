"""Static checking and full-procedure schemas"""
from typing import Any, Dict, List, Optional

from pydantic import BaseModel, Field

from app.models.automata import Verdict
from app.models.results import Tag
from app.schemas.model import ModelDocument, TracePayload


class CheckRequest(BaseModel):
    model: ModelDocument
    formula: str
    max_candidates: Optional[int] = Field(default=None, ge=1)


class CandidateCheckDocument(BaseModel):
    """Where a formula surely / possibly holds, for one candidate core"""

    index: int
    core_states: List[str]
    surely: List[str]
    possibly: List[str]


class CheckResponse(BaseModel):
    formula: str
    perfect_information: bool
    verdict: Verdict
    satisfying: Optional[List[str]] = None
    candidates: List[CandidateCheckDocument] = []


class CheckEntryDocument(BaseModel):
    state: str
    subformula: str
    tag: Tag
    atom: str


class CheckedFormulaDocument(BaseModel):
    subformula: Dict[str, Any]
    checked_form: Dict[str, Any]
    tag: Tag
    atom: str


class CheckResultDocument(BaseModel):
    """Replayable static results of one candidate; formulas are JSON ASTs"""

    index: int = 0
    core_states: List[str] = []
    checked: List[CheckedFormulaDocument]
    entries: List[CheckEntryDocument]


class CheckResultFile(BaseModel):
    formula: str
    candidates: List[CheckResultDocument]


class VerifyRequest(BaseModel):
    model: ModelDocument
    formula: str
    trace: TracePayload
    max_candidates: Optional[int] = Field(default=None, ge=1)


class OutcomeDocument(BaseModel):
    verdict: Verdict
    phi_mc: List[str]
    phi_rv: List[str]
    phi_unchk: List[str]
    negative_formula: str
    positive_formula: str
    negative_verdict: Verdict
    positive_verdict: Verdict
    literal_verdict: Verdict
    conflict: bool
    generated: bool
    renamed_atoms: Dict[str, str] = {}


class CandidateDocument(BaseModel):
    index: int
    core_states: List[str]
    outcome: OutcomeDocument
    static_ms: Optional[float] = None
    rv_ms: Optional[float] = None


class TimingDocument(BaseModel):
    static_ms: float
    rv_ms: float
    total_ms: float


class VerifyResponse(BaseModel):
    formula: str
    preprocessed: str
    verdict: Verdict
    conflict: bool
    candidate_count: int
    candidates: List[CandidateDocument]
    timing: Optional[TimingDocument] = None
