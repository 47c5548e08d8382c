"""Runtime monitor endpoint"""
from fastapi import APIRouter

from app.core.dependencies import request_model, translate_errors
from app.schemas.monitor import MonitorRequest, MonitorResponse
from app.services.formula_service import parse
from app.services.monitor_service import build_monitor, monitor_run, monitor_to_document, monitorable
from app.services.trace_service import check_trace_atoms, trace_from_data

router = APIRouter(tags=["monitor"])


@router.post("/monitor", response_model=MonitorResponse, response_model_by_alias=True)
def monitor(request: MonitorRequest):
    """
    Verdict sequence of the three-valued monitor of an LTL formula on a trace

    When a model is given, events must only mention its atoms.
    """
    with translate_errors("monitoring trace"):
        f = monitorable(parse(request.formula))
        trace = trace_from_data(request.trace)
        mon = build_monitor(f)
        universe = None
        if request.model is not None:
            universe = set(request_model(request.model).atoms)
            check_trace_atoms(trace, universe)
        run = monitor_run(mon, trace, universe)
    return MonitorResponse(
        formula=str(f),
        verdict=run.verdict,
        verdicts=list(run.verdicts),
        steps=run.steps,
        monitor_states=mon.state_count,
        monitor=monitor_to_document(mon) if request.include_monitor else None,
    )
