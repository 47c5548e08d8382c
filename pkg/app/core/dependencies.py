"""
Shared helpers for the HTTP routers
"""
import logging
from contextlib import contextmanager
from dataclasses import asdict
from typing import Iterator

from fastapi import HTTPException, status

from app.core.exceptions import (
    FragmentError, GenerationError, InputError, ModelValidationError, OracleScaleError, SoundnessError,
)
from app.models.icgs import ICGS
from app.schemas.model import ModelDocument, ViolationResponse
from app.services.icgs_service import load_model

logger = logging.getLogger(__name__)


@contextmanager
def translate_errors(action: str) -> Iterator[None]:
    """
    Map service errors to HTTP responses.

    Usage:
        with translate_errors("verifying formula"):
            report = model_checking_procedure(...)
    """
    try:
        yield
    except ModelValidationError as e:
        raise HTTPException(
            status_code=status.HTTP_400_BAD_REQUEST,
            detail={
                "message": str(e),
                "violations": [ViolationResponse(**asdict(v)).model_dump() for v in e.report.violations],
            },
        )
    except InputError as e:
        raise HTTPException(status_code=status.HTTP_400_BAD_REQUEST, detail=str(e))
    except (FragmentError, OracleScaleError, GenerationError) as e:
        raise HTTPException(status_code=status.HTTP_422_UNPROCESSABLE_ENTITY, detail=str(e))
    except SoundnessError as e:
        logger.error(f"[API] Soundness violation while {action}: {e}")
        raise HTTPException(
            status_code=status.HTTP_500_INTERNAL_SERVER_ERROR,
            detail=f"Internal soundness violation while {action}: {e}",
        )


def request_model(doc: ModelDocument, validate: bool = True) -> ICGS:
    return load_model(doc, validate=validate)
