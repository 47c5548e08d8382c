"""
Command line interface: `python -m app <command>`

Results go to stdout as JSON (CSV for sweeps); logs go to stderr.
Exit codes: 0 = verdict top, 1 = verdict bottom, 2 = inconclusive,
3 = input error, 4 = internal soundness violation.
"""
import argparse
import json
import logging
import sys
from pathlib import Path
from typing import Callable, List, Optional

from pydantic import BaseModel, ValidationError

from app.config import settings
from app.core.exceptions import InputError, SoundnessError, StratmonError
from app.models.automata import Verdict
from app.schemas.experiment import GeneratorConfig
from app.services.check_service import (
    check_formula, check_result_from_document, collect_check_results, load_check_results,
)
from app.services.experiment_service import check_sweep_trends, parse_ratios, run_sweep, sweep_csv
from app.services.formula_service import parse, preprocess
from app.services.generator_service import generate_random_icgs
from app.services.icgs_service import (
    dumps_model, imperfect_information_degree, load_model, simulate, validate_model,
)
from app.services.ispl_service import export_ispl
from app.services.monitor_service import (
    OnlineMonitor, build_monitor, monitor_run, monitor_to_dot, monitor_to_json, monitorable,
)
from app.services.submodel_service import find_submodels
from app.services.trace_service import check_trace_atoms, dump_trace, load_trace, parse_event_line
from app.services.verification_service import (
    candidate_pairs, model_checking_procedure, replay_runtime_phase, report_to_response,
)
from app.utils.logging_setup import configure_logging

logger = logging.getLogger(__name__)

EXIT_CODES = {Verdict.TOP: 0, Verdict.BOTTOM: 1, Verdict.UNKNOWN: 2}
EXIT_INPUT_ERROR = 3
EXIT_INTERNAL_ERROR = 4


def _write(path: Optional[str], text: str) -> None:
    """Write to a file, or to stdout when no path (or `-`) is given"""
    if path is None or path == "-":
        sys.stdout.write(text)
        sys.stdout.flush()
        return
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    Path(path).write_text(text, encoding="utf-8")
    logger.info(f"[CLI] Wrote {path}")


def _json(doc) -> str:
    if isinstance(doc, BaseModel):
        return doc.model_dump_json(indent=2, by_alias=True) + "\n"
    return json.dumps(doc, indent=2) + "\n"


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------

def cmd_validate(args) -> int:
    m = load_model(args.model, validate=False)
    report = validate_model(m)
    _write(args.output, _json({
        "valid": report.valid,
        "violations": [
            {k: v for k, v in vars(violation).items() if v is not None} for violation in report.violations
        ],
        "imperfect_information_degree": imperfect_information_degree(m) if report.valid else None,
    }))
    return 0 if report.valid else EXIT_INPUT_ERROR


def cmd_check(args) -> int:
    m = load_model(args.model)
    f = parse(args.formula)
    response = check_formula(m, f, args.max_candidates)
    _write(args.output, _json(response))
    if args.emit_result:
        _write(args.emit_result, _json(collect_check_results(m, f, args.max_candidates)))
    if args.export_ispl:
        if m.is_perfect_information:
            _write(args.export_ispl, export_ispl(m, f))
        else:
            prepared_model, prepared = preprocess(m, f)
            pair = find_submodels(prepared_model, prepared, 1)[0]
            logger.info(f"[CLI] Exporting the negative sub-model over core {list(pair.ordered_core)}")
            _write(args.export_ispl, export_ispl(pair.negative, prepared))
    return EXIT_CODES[response.verdict]


def cmd_monitor(args) -> int:
    f = monitorable(parse(args.formula))
    mon = build_monitor(f)
    if args.emit_dot:
        _write(args.emit_dot, monitor_to_dot(mon))
    if args.emit_json:
        _write(args.emit_json, monitor_to_json(mon))

    universe = None
    if args.model:
        universe = set(load_model(args.model).atoms)

    if args.online:
        cursor = OnlineMonitor(mon, universe)
        for line in sys.stdin:
            event = parse_event_line(line.rstrip("\n"))
            print(cursor.step(event).value, flush=True)
        return EXIT_CODES[cursor.verdict]

    if not args.trace:
        raise InputError("Either --trace or --online is required")
    trace = load_trace(args.trace)
    if universe is not None:
        check_trace_atoms(trace, universe)
    run = monitor_run(mon, trace, universe)
    _write(args.output, _json({
        "formula": str(f),
        "verdict": run.verdict.value,
        "verdicts": [v.value for v in run.verdicts],
        "steps": run.steps,
        "monitor_states": mon.state_count,
    }))
    return EXIT_CODES[run.verdict]


def cmd_verify(args) -> int:
    m = load_model(args.model)
    f = parse(args.formula)
    trace = load_trace(args.trace)
    if args.replay:
        saved = load_check_results(args.replay)
        if parse(saved.formula) != f:
            raise InputError(f"Saved results are for {saved.formula}, not {f}")
        report = replay_runtime_phase(
            m, f, trace, [(doc.core_states, check_result_from_document(doc)) for doc in saved.candidates],
        )
    else:
        report = model_checking_procedure(m, f, trace, limit=args.max_candidates, workers=args.workers)

    response = report_to_response(report, timing=not args.no_timing)
    _write(args.output, _json(response))
    if args.report:
        _write(args.report, _json(response))
    if args.export_candidates:
        out = Path(args.export_candidates)
        for index, pair in enumerate(candidate_pairs(m, f, args.max_candidates)):
            _write(str(out / f"candidate_{index}_negative.json"), dumps_model(pair.negative))
            _write(str(out / f"candidate_{index}_positive.json"), dumps_model(pair.positive))
            _write(str(out / f"candidate_{index}.core.json"), _json({
                "index": index,
                "core_states": list(pair.ordered_core),
                "bottom_sink": pair.bottom_sink,
                "top_sink": pair.top_sink,
            }))
    return EXIT_CODES[report.verdict]


def cmd_simulate(args) -> int:
    m = load_model(args.model)
    trace = simulate(m, args.steps, seed=args.seed)
    _write(args.output, dump_trace(trace, fmt=args.format, atom_order=m.atoms))
    return 0


def cmd_gen(args) -> int:
    cfg = GeneratorConfig(
        state_count=args.states,
        agent_count=args.agents,
        actions_per_agent=args.actions,
        atom_count=args.atoms,
        density=args.density,
        info_ratio=args.info_ratio,
        seed=args.seed,
    )
    _write(args.output, dumps_model(generate_random_icgs(cfg)))
    return 0


def cmd_sweep(args) -> int:
    template = GeneratorConfig(
        state_count=args.states,
        agent_count=args.agents,
        actions_per_agent=args.actions,
        atom_count=args.atoms,
        density=args.density,
    )
    rows = run_sweep(
        template,
        parse_ratios(args.ratios),
        args.models_per_ratio,
        steps=args.steps,
        seed=args.seed,
        workers=args.workers,
    )
    _write(args.output, sweep_csv(rows, timing=not args.no_timing))
    print(_json(check_sweep_trends(rows)), end="", file=sys.stderr)
    return 0


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="stratmon", description="Strategic model checking with runtime verification")
    parser.add_argument("-v", "--verbose", action="store_true", help="Debug logging on stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name: str, handler: Callable, help_text: str) -> argparse.ArgumentParser:
        p = sub.add_parser(name, help=help_text)
        p.set_defaults(handler=handler)
        p.add_argument("-o", "--output", help="Output file (default stdout)")
        return p

    p = add("validate", cmd_validate, "List structural violations of a model")
    p.add_argument("--model", required=True)

    p = add("check", cmd_check, "Static ATL checking")
    p.add_argument("--model", required=True)
    p.add_argument("--formula", required=True)
    p.add_argument("--max-candidates", type=int, default=None)
    p.add_argument("--emit-result", help="Write replayable per-candidate results")
    p.add_argument("--export-ispl", help="Write an ISPL rendering of a perfect-information (sub-)model")

    p = add("monitor", cmd_monitor, "Run the three-valued monitor of an LTL formula")
    p.add_argument("--formula", required=True)
    p.add_argument("--trace")
    p.add_argument("--model", help="Restrict events to the atoms of this model")
    p.add_argument("--online", action="store_true", help="Read events from stdin, one per line")
    p.add_argument("--emit-dot")
    p.add_argument("--emit-json")

    p = add("verify", cmd_verify, "Full procedure: candidates, static checking and runtime verification")
    p.add_argument("--model", required=True)
    p.add_argument("--formula", required=True)
    p.add_argument("--trace", required=True)
    p.add_argument("--max-candidates", type=int, default=None)
    p.add_argument("--workers", type=int, default=None)
    p.add_argument("--report", help="Also write the report to this file")
    p.add_argument("--export-candidates", metavar="DIR", help="Write candidate sub-models with core sidecars")
    p.add_argument("--replay", metavar="RESULTS", help="Skip static checking, use results saved by check")
    p.add_argument("--no-timing", action="store_true", help="Leave timings out of the report")

    p = add("simulate", cmd_simulate, "Random run of a model")
    p.add_argument("--model", required=True)
    p.add_argument("--steps", type=int, default=settings.TRACE_LENGTH)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--format", choices=["json", "text"], default="json")

    p = add("gen", cmd_gen, "Random model")
    p.add_argument("--states", type=int, default=5)
    p.add_argument("--agents", type=int, default=2)
    p.add_argument("--actions", type=int, default=2)
    p.add_argument("--atoms", type=int, default=3)
    p.add_argument("--density", type=float, default=0.5)
    p.add_argument("--info-ratio", type=float, default=0.0)
    p.add_argument("--seed", type=int, default=0)

    p = add("sweep", cmd_sweep, "Conclusive-rate sweep over imperfect-information ratios (CSV)")
    p.add_argument("--ratios", default=settings.SWEEP_RATIOS)
    p.add_argument("--models-per-ratio", type=int, default=settings.MODELS_PER_RATIO)
    p.add_argument("--states", type=int, default=settings.SWEEP_STATES)
    p.add_argument("--agents", type=int, default=settings.SWEEP_AGENTS)
    p.add_argument("--actions", type=int, default=settings.SWEEP_ACTIONS)
    p.add_argument("--atoms", type=int, default=settings.SWEEP_ATOMS)
    p.add_argument("--density", type=float, default=settings.SWEEP_DENSITY)
    p.add_argument("--steps", type=int, default=settings.TRACE_LENGTH)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--workers", type=int, default=None)
    p.add_argument("--no-timing", action="store_true", help="Reproducible CSV without timing columns")

    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        # argparse exits with 2 on usage errors, which reads as "inconclusive" here
        return EXIT_INPUT_ERROR if e.code else 0
    configure_logging("DEBUG" if args.verbose else settings.LOG_LEVEL)
    try:
        return args.handler(args)
    except SoundnessError as e:
        logger.error(f"[CLI] Internal soundness violation: {e}")
        print(f"internal error: {e}", file=sys.stderr)
        return EXIT_INTERNAL_ERROR
    except StratmonError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INPUT_ERROR
    except ValidationError as e:
        print(f"error: invalid arguments: {e.errors()[0]['msg']}", file=sys.stderr)
        return EXIT_INPUT_ERROR


if __name__ == "__main__":
    sys.exit(main())
