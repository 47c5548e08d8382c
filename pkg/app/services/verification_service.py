"""
End-to-end procedure: preprocessing, candidate sub-models, static checking
and runtime verification, merged into one report
"""
import logging
import time
from concurrent.futures import ThreadPoolExecutor
from typing import List, Optional, Sequence, Tuple

from app.config import settings
from app.core.exceptions import SoundnessError
from app.models.automata import Verdict
from app.models.formula import Formula
from app.models.icgs import ICGS, Trace
from app.models.results import CandidateReport, CheckResult, PipelineReport
from app.models.submodel import SubmodelPair
from app.schemas.check import CandidateDocument, OutcomeDocument, TimingDocument, VerifyResponse
from app.services.atl_service import check_subformulas
from app.services.formula_service import bind_formula, eliminate_negated_atoms, negated_atom_names, to_nnf
from app.services.icgs_service import ensure_valid
from app.services.rv_service import runtime_verification
from app.services.submodel_service import find_submodels
from app.services.trace_service import check_trace_atoms
from app.utils.time_utils import Stopwatch

logger = logging.getLogger(__name__)


def merge_verdicts(verdicts: List[Verdict]) -> Verdict:
    """TOP if any candidate concluded TOP, else BOTTOM if any concluded BOTTOM"""
    if Verdict.TOP in verdicts:
        return Verdict.TOP
    if Verdict.BOTTOM in verdicts:
        return Verdict.BOTTOM
    return Verdict.UNKNOWN


def _merge(f: Formula, reports: Sequence[CandidateReport]) -> Tuple[Verdict, bool]:
    verdicts = [r.outcome.verdict for r in reports]
    conflict = any(r.outcome.conflict for r in reports)
    if Verdict.TOP in verdicts and Verdict.BOTTOM in verdicts:
        if all(r.outcome.generated for r in reports):
            raise SoundnessError(f"Candidates reached opposite verdicts for {f} on a run of the model")
        logger.warning(f"[Pipeline] Candidates disagree on a trace the model cannot produce; reporting unknown for {f}")
        return Verdict.UNKNOWN, True
    return merge_verdicts(verdicts), conflict


def model_checking_procedure(
    m: ICGS,
    f: Formula,
    h: Trace,
    limit: Optional[int] = None,
    workers: Optional[int] = None,
) -> PipelineReport:
    """
    Run the whole procedure for `f` on model `m` and the observed trace `h`.

    Each candidate is checked statically and then monitored; the merged
    verdict is TOP when some candidate concluded TOP and BOTTOM when some
    concluded BOTTOM. Candidates reaching opposite verdicts on a run of the
    model raise SoundnessError.
    """
    workers = settings.WORKERS if workers is None else workers
    clock = Stopwatch()
    started = time.perf_counter()

    with clock.phase("static"):
        ensure_valid(m)
        bind_formula(m, f)
        nnf = to_nnf(f)
        negations = {name: q for q, name in negated_atom_names(m, nnf).items()}
        prepared_model, prepared = eliminate_negated_atoms(m, nnf)
        candidates = find_submodels(prepared_model, prepared, limit)
    logger.info(f"[Pipeline] {len(candidates)} candidate(s) for {f}")

    observable = frozenset(m.atoms)

    def run_candidate(item) -> CandidateReport:
        index, pair = item
        local = Stopwatch()
        with local.phase("static"):
            results = check_subformulas(pair, prepared)
        with local.phase("rv"):
            check_trace_atoms(h, set(m.atoms) | set(results.atoms))
            outcome = runtime_verification(prepared_model, prepared, h, results, observable, negations)
        logger.debug(f"[Pipeline] Candidate {index}: {outcome.verdict.symbol}")
        return CandidateReport(
            index=index,
            core_states=pair.ordered_core,
            check_result=results,
            outcome=outcome,
            static_ms=local.ms("static"),
            rv_ms=local.ms("rv"),
        )

    items = list(enumerate(candidates))
    if workers > 1 and len(items) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            reports = list(pool.map(run_candidate, items))
    else:
        reports = [run_candidate(item) for item in items]

    verdict, conflict = _merge(f, reports)
    static_ms = clock.ms("static") + sum(r.static_ms for r in reports)
    rv_ms = sum(r.rv_ms for r in reports)
    wall_ms = (time.perf_counter() - started) * 1000.0
    logger.info(f"[Pipeline] Verdict {verdict.symbol} for {f} (static {static_ms:.1f} ms, rv {rv_ms:.1f} ms)")
    return PipelineReport(
        verdict=verdict,
        formula=f,
        preprocessed=prepared,
        candidates=tuple(reports),
        static_ms=static_ms,
        rv_ms=rv_ms,
        total_ms=max(wall_ms, static_ms + rv_ms),
        conflict=conflict,
    )


def candidate_pairs(m: ICGS, f: Formula, limit: Optional[int] = None) -> List[SubmodelPair]:
    """Candidates the procedure would check, on the preprocessed model"""
    prepared_model, prepared = eliminate_negated_atoms(m, to_nnf(f))
    return find_submodels(prepared_model, prepared, limit)


def replay_runtime_phase(
    m: ICGS, f: Formula, h: Trace, results: Sequence[Tuple[Sequence[str], CheckResult]],
) -> PipelineReport:
    """Runtime phase only, on (core states, static results) saved by an earlier check"""
    ensure_valid(m)
    bind_formula(m, f)
    nnf = to_nnf(f)
    negations = {name: q for q, name in negated_atom_names(m, nnf).items()}
    prepared_model, prepared = eliminate_negated_atoms(m, nnf)
    reports = []
    for index, (core, result) in enumerate(results):
        local = Stopwatch()
        with local.phase("rv"):
            check_trace_atoms(h, set(m.atoms) | set(result.atoms))
            outcome = runtime_verification(prepared_model, prepared, h, result, frozenset(m.atoms), negations)
        reports.append(CandidateReport(index, tuple(core), result, outcome, 0.0, local.ms("rv")))
    verdict, conflict = _merge(f, reports)
    rv_ms = sum(r.rv_ms for r in reports)
    return PipelineReport(
        verdict=verdict,
        formula=f,
        preprocessed=prepared,
        candidates=tuple(reports),
        static_ms=0.0,
        rv_ms=rv_ms,
        total_ms=rv_ms,
        conflict=conflict,
    )


def report_to_response(report: PipelineReport, timing: bool = True) -> VerifyResponse:
    """Wire form of a report; formulas pretty-printed"""
    candidates = []
    for c in report.candidates:
        o = c.outcome
        candidates.append(CandidateDocument(
            index=c.index,
            core_states=list(c.core_states),
            outcome=OutcomeDocument(
                verdict=o.verdict,
                phi_mc=[str(g) for g in o.phi_mc],
                phi_rv=[str(g) for g in o.phi_rv],
                phi_unchk=[str(g) for g in o.phi_unchk],
                negative_formula=str(o.negative_formula),
                positive_formula=str(o.positive_formula),
                negative_verdict=o.negative_verdict,
                positive_verdict=o.positive_verdict,
                literal_verdict=o.literal_verdict,
                conflict=o.conflict,
                generated=o.generated,
                renamed_atoms=dict(o.renamed_atoms),
            ),
            static_ms=c.static_ms if timing else None,
            rv_ms=c.rv_ms if timing else None,
        ))
    return VerifyResponse(
        formula=str(report.formula),
        preprocessed=str(report.preprocessed),
        verdict=report.verdict,
        conflict=report.conflict,
        candidate_count=report.candidate_count,
        candidates=candidates,
        timing=TimingDocument(**report.timing()) if timing else None,
    )
