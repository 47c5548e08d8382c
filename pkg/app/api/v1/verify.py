"""Full procedure endpoint: static checking on candidates plus runtime verification"""
import logging

from fastapi import APIRouter, Request

from app.config import settings
from app.core.dependencies import request_model, translate_errors
from app.core.rate_limit import limiter
from app.schemas.check import VerifyRequest, VerifyResponse
from app.services.formula_service import parse
from app.services.trace_service import trace_from_data
from app.services.verification_service import model_checking_procedure, report_to_response

logger = logging.getLogger(__name__)

router = APIRouter(tags=["verify"])


@router.post("/verify", response_model=VerifyResponse)
@limiter.limit(settings.RATE_LIMIT_VERIFY)
def verify(request: Request, body: VerifyRequest):
    """
    Verdict of an ATL* formula given a model and an observed trace

    - **verdict**: `top` / `bottom` when some candidate concluded, else `unknown`
    - **candidates**: per-candidate statically checked, monitored and
      unchecked subformulas
    """
    with translate_errors("verifying formula"):
        m = request_model(body.model)
        f = parse(body.formula)
        trace = trace_from_data(body.trace)
        report = model_checking_procedure(m, f, trace, limit=body.max_candidates)
    logger.info(f"[API] verify {f}: {report.verdict.value} over {report.candidate_count} candidate(s)")
    return report_to_response(report)
