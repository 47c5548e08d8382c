"""Wire formats for game structures and traces"""
from typing import Dict, List, Optional, Union

from pydantic import BaseModel, ConfigDict, Field


class TransitionSpec(BaseModel):
    """One entry of `transitions`: a joint action given agent by agent"""

    model_config = ConfigDict(extra="forbid", populate_by_name=True)

    from_: str = Field(alias="from")
    act: Dict[str, str]
    to: str


class ModelDocument(BaseModel):
    """
    JSON model schema.

    `indistinguishability` lists groups of states per agent; overlapping
    groups are merged into equivalence classes when loading. A missing
    protocol entry for (agent, state) means every action of the agent.
    """

    model_config = ConfigDict(extra="forbid")

    agents: List[str]
    atoms: List[str] = []
    states: List[str]
    initial: str
    actions: Dict[str, List[str]]
    indistinguishability: Dict[str, List[List[str]]] = {}
    protocol: Dict[str, Dict[str, List[str]]] = {}
    transitions: List[TransitionSpec]
    labeling: Dict[str, List[str]] = {}


class TraceDocument(BaseModel):
    """Object form of a trace; `states` is the visited history when known"""

    model_config = ConfigDict(extra="forbid")

    events: List[List[str]]
    states: Optional[List[str]] = None


TracePayload = Union[List[List[str]], TraceDocument]


class ViolationResponse(BaseModel):
    kind: str
    message: str
    agent: Optional[str] = None
    state: Optional[str] = None
    action: Optional[str] = None


class ValidationResponse(BaseModel):
    valid: bool
    violations: List[ViolationResponse]
    imperfect_information_degree: Optional[float] = None


class SimulateRequest(BaseModel):
    model: ModelDocument
    steps: int = Field(default=32, ge=0, le=10000)
    seed: int = 0


class ExportIsplRequest(BaseModel):
    model: ModelDocument
    formula: Optional[str] = None
