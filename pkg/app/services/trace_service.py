"""Trace files: JSON arrays, JSON objects with recorded states, and `.trace` text"""
import json
import logging
from pathlib import Path
from typing import Any, Iterable, List, Optional, Union

from pydantic import TypeAdapter, ValidationError

from app.core.exceptions import InputError
from app.models.icgs import Trace
from app.schemas.model import TraceDocument, TracePayload

logger = logging.getLogger(__name__)

_payload_adapter = TypeAdapter(TracePayload)


def parse_event_line(line: str) -> frozenset:
    """One `.trace` line: comma-separated atoms, empty line = empty event"""
    return frozenset(a.strip() for a in line.split(",") if a.strip())


def parse_trace_text(text: str) -> Trace:
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines = lines[:-1]
    return Trace(events=tuple(parse_event_line(line) for line in lines))


def trace_from_data(data: Any) -> Trace:
    try:
        payload = _payload_adapter.validate_python(data)
    except ValidationError as e:
        raise InputError(f"Trace does not match the schema: {e}")
    if isinstance(payload, TraceDocument):
        states = tuple(payload.states) if payload.states is not None else None
        if states is not None and len(states) != len(payload.events):
            raise InputError(f"Trace has {len(payload.events)} events but {len(states)} recorded states")
        return Trace(events=tuple(frozenset(e) for e in payload.events), states=states)
    return Trace(events=tuple(frozenset(e) for e in payload))


def load_trace(source: Union[str, Path, List, dict]) -> Trace:
    """Load a trace; `.trace` files are read as text, anything else as JSON"""
    if not isinstance(source, (str, Path)):
        return trace_from_data(source)
    path = Path(source)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise InputError(f"Cannot read trace file {path}: {e}")
    if path.suffix == ".trace":
        return parse_trace_text(text)
    try:
        return trace_from_data(json.loads(text))
    except json.JSONDecodeError as e:
        raise InputError(f"Trace file {path} is not valid JSON: {e}")


def dump_trace(trace: Trace, fmt: str = "json", atom_order: Optional[Iterable[str]] = None) -> str:
    """Serialize a trace as `json` (object form when states are recorded) or `text`"""
    order = list(atom_order) if atom_order is not None else sorted(trace.atoms)

    def sort_event(event: frozenset) -> List[str]:
        return sorted(event, key=lambda a: (order.index(a) if a in order else len(order), a))

    events = [sort_event(e) for e in trace.events]
    if fmt == "text":
        return "".join(",".join(e) + "\n" for e in events)
    if fmt != "json":
        raise InputError(f"Unknown trace format: {fmt!r}")
    if trace.states is not None:
        doc = TraceDocument(events=events, states=list(trace.states))
        return doc.model_dump_json(indent=2) + "\n"
    return json.dumps(events, indent=2) + "\n"


def check_trace_atoms(trace: Trace, universe: Iterable[str]) -> None:
    """Reject events mentioning atoms outside `universe`"""
    allowed = set(universe)
    for j, event in enumerate(trace.events):
        unknown = sorted(event - allowed)
        if unknown:
            raise InputError(f"Event {j} mentions unknown atom {unknown[0]!r}")
