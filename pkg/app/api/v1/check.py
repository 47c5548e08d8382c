"""Static ATL checking endpoint"""
from fastapi import APIRouter

from app.core.dependencies import request_model, translate_errors
from app.schemas.check import CheckRequest, CheckResponse
from app.services.check_service import check_formula
from app.services.formula_service import parse

router = APIRouter(tags=["check"])


@router.post("/check", response_model=CheckResponse)
def check(request: CheckRequest):
    """
    States satisfying an ATL formula

    - **model**: perfect-information models are checked exactly; otherwise
      each candidate sub-model reports surely / possibly satisfying states
    - **max_candidates**: cap on candidate sub-models
    """
    with translate_errors("checking formula"):
        m = request_model(request.model)
        return check_formula(m, parse(request.formula), request.max_candidates)
