import json

import pytest

from app.core.exceptions import InputError
from app.models.icgs import Trace
from app.services.trace_service import (
    check_trace_atoms, dump_trace, load_trace, parse_event_line, parse_trace_text, trace_from_data,
)


def test_event_line():
    assert parse_event_line(" p, q ,") == frozenset({"p", "q"})
    assert parse_event_line("") == frozenset()


def test_text_format_keeps_empty_events():
    trace = parse_trace_text("\np\np,q\n")
    assert trace.events == (frozenset(), frozenset({"p"}), frozenset({"p", "q"}))


def test_sample_trace_file(samples_dir):
    assert load_trace(samples_dir / "confused.trace").events == (frozenset(), frozenset({"p"}))


def test_json_array_and_object_forms():
    assert trace_from_data([["p"], []]).states is None
    trace = trace_from_data({"events": [["p"], []], "states": ["s1", "s0"]})
    assert trace.states == ("s1", "s0")
    assert trace.atoms == frozenset({"p"})


def test_recorded_states_must_match_events():
    with pytest.raises(InputError, match="recorded states"):
        trace_from_data({"events": [["p"]], "states": ["s0", "s1"]})


def test_malformed_trace():
    with pytest.raises(InputError):
        trace_from_data({"events": "p"})


def test_json_file(tmp_path):
    path = tmp_path / "run.json"
    path.write_text(json.dumps([["q"], ["p", "q"]]))
    assert load_trace(path).events == (frozenset({"q"}), frozenset({"p", "q"}))


def test_missing_file(tmp_path):
    with pytest.raises(InputError, match="Cannot read"):
        load_trace(tmp_path / "absent.json")


def test_dump_orders_atoms():
    trace = Trace(events=(frozenset({"q", "p"}), frozenset()))
    assert dump_trace(trace, fmt="text", atom_order=["q", "p"]) == "q,p\n\n"
    assert json.loads(dump_trace(trace)) == [["p", "q"], []]


def test_dump_with_states_uses_object_form():
    trace = Trace(events=(frozenset({"p"}),), states=("s1",))
    assert json.loads(dump_trace(trace)) == {"events": [["p"]], "states": ["s1"]}


def test_unknown_format():
    with pytest.raises(InputError):
        dump_trace(Trace(events=()), fmt="xml")


def test_unknown_atoms_are_rejected():
    trace = Trace(events=(frozenset({"p"}), frozenset({"z"})))
    with pytest.raises(InputError, match="Event 1"):
        check_trace_atoms(trace, ["p", "q"])
