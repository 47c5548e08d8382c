"""Random generation and sweep schemas"""
from typing import List, Optional

from pydantic import BaseModel, ConfigDict, Field


class GeneratorConfig(BaseModel):
    """Knobs of the random model generator"""

    model_config = ConfigDict(frozen=True)

    state_count: int = Field(default=5, ge=1, le=500)
    agent_count: int = Field(default=2, ge=1, le=8)
    actions_per_agent: int = Field(default=2, ge=1, le=8)
    density: float = Field(default=0.5, ge=0.0, le=1.0)
    info_ratio: float = Field(default=0.0, ge=0.0, le=1.0)
    atom_count: int = Field(default=3, ge=1, le=26)
    seed: int = 0


class SweepRow(BaseModel):
    """Aggregated results for one imperfect-information ratio"""

    info_ratio: float
    models_run: int
    conclusive_count: int
    conclusive_rate: float
    mean_static_ms: float
    mean_rv_ms: float
    static_time_share: float
    failures: int = 0
    top_count: int = 0
    bottom_count: int = 0
    mean_candidates: float = 0.0


class TrendCheck(BaseModel):
    mean_conclusive_rate: float
    conclusive_rate_ok: bool
    static_share_low: Optional[float] = None
    static_share_high: Optional[float] = None
    static_share_trend_ok: Optional[bool] = None
    warnings: List[str] = []


class SweepRequest(BaseModel):
    ratios: str = "0:1:0.5"
    models_per_ratio: int = Field(default=5, ge=1)
    states: int = Field(default=6, ge=1, le=50)
    agents: int = Field(default=2, ge=1, le=4)
    actions: int = Field(default=2, ge=1, le=4)
    atoms: int = Field(default=3, ge=1, le=26)
    density: float = Field(default=0.5, ge=0.0, le=1.0)
    steps: int = Field(default=32, ge=1, le=1000)
    seed: int = 0


class SweepResponse(BaseModel):
    rows: List[SweepRow]
    trends: TrendCheck
    csv: str
