"""Wire formats for monitors"""
from typing import List, Optional

from pydantic import BaseModel, Field

from app.models.automata import Verdict
from app.schemas.model import ModelDocument, TracePayload


class MonitorStateDocument(BaseModel):
    id: int
    verdict: Verdict


class MonitorTransitionDocument(BaseModel):
    source: int = Field(serialization_alias="from")
    letter: List[str]
    target: int = Field(serialization_alias="to")


class MonitorDocument(BaseModel):
    """Moore machine export: states, outputs and one transition per letter"""

    formula: str
    atoms: List[str]
    initial: int
    states: List[MonitorStateDocument]
    transitions: List[MonitorTransitionDocument]


class MonitorRequest(BaseModel):
    formula: str
    trace: TracePayload
    model: Optional[ModelDocument] = None
    include_monitor: bool = False


class MonitorResponse(BaseModel):
    formula: str
    verdict: Verdict
    verdicts: List[Verdict]
    steps: int
    monitor_states: int
    monitor: Optional[MonitorDocument] = None
