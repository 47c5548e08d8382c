"""Domain models"""
from app.models.icgs import ICGS, History, JointAction, Trace, ValidationReport, Violation
from app.models.formula import (
    And, Atom, Eventually, Exists, FALSE, ForAll, Formula, FragmentClass, Globally,
    Next, Not, Or, Release, TRUE, Until,
)
from app.models.submodel import SubmodelPair
from app.models.automata import BuchiAutomaton, BuchiTransition, Monitor, MonitorRun, Verdict
from app.models.results import (
    CandidateReport, CheckEntry, CheckedFormula, CheckResult, Outcome, PipelineReport, Tag,
)

__all__ = [
    "ICGS",
    "History",
    "JointAction",
    "Trace",
    "ValidationReport",
    "Violation",
    "Formula",
    "FragmentClass",
    "Atom",
    "Not",
    "And",
    "Or",
    "Exists",
    "ForAll",
    "Next",
    "Until",
    "Release",
    "TRUE",
    "FALSE",
    "Eventually",
    "Globally",
    "SubmodelPair",
    "BuchiAutomaton",
    "BuchiTransition",
    "Monitor",
    "MonitorRun",
    "Verdict",
    "CandidateReport",
    "CheckEntry",
    "CheckedFormula",
    "CheckResult",
    "Outcome",
    "PipelineReport",
    "Tag",
]
