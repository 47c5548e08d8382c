"""
Static checking of a whole formula, with replayable per-candidate results
"""
import json
import logging
from pathlib import Path
from typing import List, Optional, Union

from pydantic import ValidationError

from app.core.exceptions import InputError
from app.models.automata import Verdict
from app.models.formula import Formula
from app.models.icgs import ICGS
from app.models.results import CheckedFormula, CheckEntry, CheckResult
from app.schemas.check import (
    CandidateCheckDocument, CheckedFormulaDocument, CheckEntryDocument, CheckResponse, CheckResultDocument,
    CheckResultFile,
)
from app.services.atl_service import FixpointChecker, check_atl, check_subformulas
from app.services.formula_service import bind_formula, formula_from_json, formula_to_json, parse, preprocess
from app.services.icgs_service import ensure_valid
from app.services.submodel_service import find_submodels

logger = logging.getLogger(__name__)


def check_formula(m: ICGS, f: Formula, limit: Optional[int] = None) -> CheckResponse:
    """
    States where an ATL formula holds.

    Perfect-information models are checked directly. Otherwise every
    candidate reports where the formula surely holds (negative sub-model)
    and where it possibly holds (positive sub-model, plus the states outside
    the core). The verdict refers to the initial state.
    """
    ensure_valid(m)
    bind_formula(m, f)
    if m.is_perfect_information:
        satisfying = check_atl(m, f)
        verdict = Verdict.TOP if m.initial_state in satisfying else Verdict.BOTTOM
        return CheckResponse(
            formula=str(f),
            perfect_information=True,
            verdict=verdict,
            satisfying=[s for s in m.states if s in satisfying],
        )

    prepared_model, prepared = preprocess(m, f)
    candidates: List[CandidateCheckDocument] = []
    verdicts = []
    for index, pair in enumerate(find_submodels(prepared_model, prepared, limit)):
        core = pair.ordered_core
        surely = FixpointChecker(pair.negative).states(prepared)
        possibly = FixpointChecker(pair.positive).states(prepared)
        outside = [s for s in m.states if s not in pair.core_states]
        candidates.append(CandidateCheckDocument(
            index=index,
            core_states=list(core),
            surely=[s for s in core if s in surely],
            possibly=[s for s in core if s in possibly] + outside,
        ))
        if m.initial_state in surely:
            verdicts.append(Verdict.TOP)
        elif m.initial_state not in possibly:
            verdicts.append(Verdict.BOTTOM)

    verdict = Verdict.TOP if Verdict.TOP in verdicts else Verdict.BOTTOM if verdicts else Verdict.UNKNOWN
    logger.info(f"[Check] {len(candidates)} candidate(s) for {f}: {verdict.symbol}")
    return CheckResponse(formula=str(f), perfect_information=False, verdict=verdict, candidates=candidates)


def collect_check_results(m: ICGS, f: Formula, limit: Optional[int] = None) -> CheckResultFile:
    """Static results of every candidate, for replaying the runtime phase later"""
    prepared_model, prepared = preprocess(m, f)
    documents = []
    for index, pair in enumerate(find_submodels(prepared_model, prepared, limit)):
        documents.append(check_result_to_document(check_subformulas(pair, prepared), index, pair.ordered_core))
    return CheckResultFile(formula=str(f), candidates=documents)


def check_result_to_document(results: CheckResult, index: int = 0, core_states=()) -> CheckResultDocument:
    return CheckResultDocument(
        index=index,
        core_states=list(core_states),
        checked=[
            CheckedFormulaDocument(
                subformula=formula_to_json(c.subformula),
                checked_form=formula_to_json(c.checked_form),
                tag=c.tag,
                atom=c.atom,
            )
            for c in results.checked
        ],
        entries=[CheckEntryDocument(state=e.state, subformula=str(e.subformula), tag=e.tag, atom=e.atom)
                 for e in results.entries],
    )


def check_result_from_document(doc: CheckResultDocument) -> CheckResult:
    checked = tuple(
        CheckedFormula(formula_from_json(c.subformula), formula_from_json(c.checked_form), c.tag, c.atom)
        for c in doc.checked
    )
    by_atom = {c.atom: c.subformula for c in checked}
    entries = []
    for e in doc.entries:
        if e.atom not in by_atom:
            raise InputError(f"Entry for state {e.state} uses atom {e.atom!r} with no checked subformula")
        entries.append(CheckEntry(e.state, by_atom[e.atom], e.tag, e.atom))
    return CheckResult(entries=tuple(entries), checked=checked)


def load_check_results(source: Union[str, Path, dict]) -> CheckResultFile:
    try:
        data = json.loads(Path(source).read_text(encoding="utf-8")) if isinstance(source, (str, Path)) else source
        result_file = CheckResultFile.model_validate(data)
    except (OSError, json.JSONDecodeError) as e:
        raise InputError(f"Cannot read check results: {e}") from e
    except ValidationError as e:
        raise InputError(f"Invalid check results: {e.errors()[0]['msg']}") from e
    parse(result_file.formula)
    return result_file
