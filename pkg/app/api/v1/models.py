"""Model endpoints: validation, simulation, random generation and ISPL export"""
import logging

from fastapi import APIRouter
from fastapi.responses import PlainTextResponse

from app.core.dependencies import request_model, translate_errors
from app.schemas.experiment import GeneratorConfig
from app.schemas.model import (
    ExportIsplRequest, ModelDocument, SimulateRequest, TraceDocument, ValidationResponse, ViolationResponse,
)
from app.services.formula_service import parse
from app.services.generator_service import generate_random_icgs
from app.services.icgs_service import imperfect_information_degree, simulate, to_document, validate_model
from app.services.ispl_service import export_ispl

logger = logging.getLogger(__name__)

router = APIRouter(prefix="/models", tags=["models"])


@router.post("/validate", response_model=ValidationResponse)
def validate(doc: ModelDocument):
    """
    Check the structural conditions of a game structure

    Returns every violation instead of failing on the first one.
    """
    with translate_errors("loading model"):
        m = request_model(doc, validate=False)
    report = validate_model(m)
    return ValidationResponse(
        valid=report.valid,
        violations=[
            ViolationResponse(kind=v.kind, message=v.message, agent=v.agent, state=v.state, action=v.action)
            for v in report.violations
        ],
        imperfect_information_degree=imperfect_information_degree(m) if report.valid else None,
    )


@router.post("/simulate", response_model=TraceDocument)
def simulate_model(request: SimulateRequest):
    """Random run from the initial state under uniformly chosen enabled joint actions"""
    with translate_errors("simulating model"):
        m = request_model(request.model)
        trace = simulate(m, request.steps, seed=request.seed)
    return TraceDocument(
        events=[sorted(e, key=m.atoms.index) for e in trace.events],
        states=list(trace.states),
    )


@router.post("/generate", response_model=ModelDocument, response_model_by_alias=True)
def generate(cfg: GeneratorConfig):
    """Random model; the same configuration and seed always give the same model"""
    with translate_errors("generating model"):
        m = generate_random_icgs(cfg)
    logger.info(f"[API] Generated model with {len(m.states)} states (seed={cfg.seed})")
    return to_document(m)


@router.post("/export-ispl", response_class=PlainTextResponse)
def export(request: ExportIsplRequest):
    """ISPL rendering of a perfect-information model and an optional ATL formula"""
    with translate_errors("exporting model"):
        m = request_model(request.model)
        f = parse(request.formula) if request.formula else None
        return PlainTextResponse(export_ispl(m, f))
