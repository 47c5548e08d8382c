"""Small conclusive-rate sweeps over HTTP"""
from fastapi import APIRouter, HTTPException, Request, status

from app.config import settings
from app.core.dependencies import translate_errors
from app.core.rate_limit import limiter
from app.schemas.experiment import GeneratorConfig, SweepRequest, SweepResponse
from app.services.experiment_service import check_sweep_trends, parse_ratios, run_sweep, sweep_csv

router = APIRouter(prefix="/experiments", tags=["experiments"])


@router.post("/sweep", response_model=SweepResponse)
@limiter.limit(settings.RATE_LIMIT_VERIFY)
def sweep(request: Request, body: SweepRequest):
    """Sweep over imperfect-information ratios; large sweeps belong to the command line"""
    with translate_errors("running sweep"):
        ratios = parse_ratios(body.ratios)
    total = len(ratios) * body.models_per_ratio
    if total > settings.SWEEP_MAX_MODELS_HTTP:
        raise HTTPException(
            status_code=status.HTTP_400_BAD_REQUEST,
            detail=f"Sweep of {total} models exceeds the limit of {settings.SWEEP_MAX_MODELS_HTTP}",
        )
    template = GeneratorConfig(
        state_count=body.states,
        agent_count=body.agents,
        actions_per_agent=body.actions,
        atom_count=body.atoms,
        density=body.density,
    )
    with translate_errors("running sweep"):
        rows = run_sweep(template, ratios, body.models_per_ratio, steps=body.steps, seed=body.seed)
    return SweepResponse(rows=rows, trends=check_sweep_trends(rows), csv=sweep_csv(rows))
