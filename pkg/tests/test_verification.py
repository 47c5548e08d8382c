import pytest

from app.core.exceptions import InputError, ModelValidationError, SoundnessError
from app.models.automata import Verdict
from app.services.atl_service import check_atl, check_subformulas
from app.services.check_service import check_result_from_document, collect_check_results
from app.services.experiment_service import FORMULA_POOL, instantiate
from app.services.formula_service import parse, rewrite_coalitions, to_nnf
from app.services.icgs_service import load_model, simulate
from app.services.oracle_service import Recall, StrategyOracle
from app.services.submodel_service import find_submodels
from app.services.verification_service import (
    candidate_pairs, merge_verdicts, model_checking_procedure, replay_runtime_phase, report_to_response,
)

T, B, U = Verdict.TOP, Verdict.BOTTOM, Verdict.UNKNOWN


@pytest.mark.parametrize("verdicts, merged", [
    ([U, T], T),
    ([U, B], B),
    ([U, U], U),
    ([], U),
])
def test_merge(verdicts, merged):
    assert merge_verdicts(verdicts) is merged


class TestConfusedModel:
    def test_procedure(self, confused_model, trace_of):
        report = model_checking_procedure(confused_model, parse("<<1>> F p"), trace_of("", "p"))
        assert report.verdict is T
        assert report.candidate_count == 2
        first, second = report.candidates
        assert first.core_states == ("s0", "s1")
        assert first.outcome.verdict is T
        assert second.core_states == ("s0", "s2")
        assert second.outcome.verdict is U
        assert (second.outcome.negative_verdict, second.outcome.positive_verdict) == (B, T)
        assert all(c.outcome.generated for c in report.candidates)
        assert report.total_ms >= report.static_ms

    def test_negated_atoms(self, confused_model, trace_of):
        report = model_checking_procedure(confused_model, parse("<<1>> G !p"), trace_of("", "p"))
        assert str(report.preprocessed) == "<<1>> G not_p"
        assert report.verdict is T

    def test_violated_temporal_part(self, confused_model, trace_of):
        report = model_checking_procedure(confused_model, parse("p & <<1>> F p"), trace_of("", "p"))
        assert report.verdict is B

    def test_coalition_without_choice(self, confused_model, trace_of):
        report = model_checking_procedure(confused_model, parse("<<2>> F p"), trace_of("", "p"))
        assert [c.outcome.verdict for c in report.candidates] == [U, B]
        assert report.verdict is B

    def test_strategic_star_formula_is_monitored(self, confused_model, trace_of):
        report = model_checking_procedure(confused_model, parse("<<1>> (F p & F q)"), trace_of("", "p"))
        assert report.verdict is U
        outcome = report.candidates[0].outcome
        assert outcome.phi_mc == ()
        assert [str(g) for g in outcome.phi_rv] == ["p", "q", "true", "F p"]
        assert [str(g) for g in outcome.phi_unchk] == ["F q", "F p & F q", "<<1>> (F p & F q)"]

    def test_parallel_candidates(self, confused_model, trace_of):
        f, trace = parse("<<2>> F p"), trace_of("", "p")
        sequential = model_checking_procedure(confused_model, f, trace, workers=1)
        parallel = model_checking_procedure(confused_model, f, trace, workers=2)
        assert [c.outcome for c in parallel.candidates] == [c.outcome for c in sequential.candidates]

    def test_replay_uses_saved_results(self, confused_model, trace_of):
        f, trace = parse("<<1>> F p"), trace_of("", "p")
        saved = collect_check_results(confused_model, f)
        report = replay_runtime_phase(
            confused_model, f, trace, [(doc.core_states, check_result_from_document(doc)) for doc in saved.candidates],
        )
        assert report.verdict is T
        assert [c.core_states for c in report.candidates] == [("s0", "s1"), ("s0", "s2")]
        assert report.static_ms == 0.0

    def test_trace_may_carry_result_atoms(self, confused_model, trace_of):
        f = parse("<<1>> F p")
        natom, patom = check_subformulas(find_submodels(confused_model)[0], f).atoms
        trace = trace_of("", f"p,{natom},{patom}")
        assert model_checking_procedure(confused_model, f, trace).verdict is T
        saved = collect_check_results(confused_model, f)
        report = replay_runtime_phase(
            confused_model, f, trace, [(doc.core_states, check_result_from_document(doc)) for doc in saved.candidates],
        )
        assert report.verdict is T

    def test_candidate_pairs(self, confused_model):
        assert [p.ordered_core for p in candidate_pairs(confused_model, parse("<<1>> F p"))] == [
            ("s0", "s1"), ("s0", "s2"),
        ]

    def test_response_without_timing(self, confused_model, trace_of):
        report = model_checking_procedure(confused_model, parse("<<1>> F p"), trace_of("", "p"))
        response = report_to_response(report, timing=False)
        assert response.timing is None
        assert response.formula == "<<1>> F p"
        assert response.candidates[1].outcome.verdict is U
        assert all(c.static_ms is None and c.rv_ms is None for c in response.candidates)
        assert report_to_response(report).timing.total_ms == report.total_ms


class TestInputErrors:
    def test_invalid_model(self, confused_doc, trace_of):
        confused_doc["transitions"] = confused_doc["transitions"][1:]
        m = load_model(confused_doc, validate=False)
        with pytest.raises(ModelValidationError):
            model_checking_procedure(m, parse("<<1>> F p"), trace_of(""))

    def test_trace_with_unknown_atom(self, confused_model, trace_of):
        with pytest.raises(InputError, match="unknown atom"):
            model_checking_procedure(confused_model, parse("<<1>> F p"), trace_of("z"))

    def test_formula_with_unknown_agent(self, confused_model, trace_of):
        with pytest.raises(InputError, match="unknown agent"):
            model_checking_procedure(confused_model, parse("<<7>> F p"), trace_of(""))


def test_perfect_information_reduces_to_model_checking(chain_model, trace_of):
    report = model_checking_procedure(chain_model, parse("<<1>> F p"), trace_of("", "q"))
    assert report.candidate_count == 1
    assert report.verdict is T
    report = model_checking_procedure(chain_model, parse("<<>> F p"), trace_of("", "q"))
    assert report.verdict is B


def _pool_runs(make_model, seeds, info_ratio):
    for seed in seeds:
        m = make_model(seed, info_ratio=info_ratio)
        trace = simulate(m, 12, seed=seed)
        for template in FORMULA_POOL:
            yield m, instantiate(template, m), trace


@pytest.mark.parametrize("seed", range(4))
def test_perfect_information_verdicts_match_the_checker(make_model, seed):
    for m, f, trace in _pool_runs(make_model, [seed], 0.0):
        report = model_checking_procedure(m, f, trace)
        expected = T if m.initial_state in check_atl(m, f) else B
        assert report.verdict is expected, str(f)


@pytest.mark.slow
def test_perfect_information_verdicts_on_many_models(make_model):
    mismatches = []
    for seed in range(500):
        m = make_model(seed, info_ratio=0.0, state_count=2 + seed % 5)
        trace = simulate(m, 12, seed=seed)
        for template in FORMULA_POOL:
            f = instantiate(template, m)
            expected = T if m.initial_state in check_atl(m, f) else B
            if model_checking_procedure(m, f, trace).verdict is not expected:
                mismatches.append((seed, str(f)))
    assert mismatches == []


@pytest.mark.parametrize("seed", range(4))
def test_conclusive_verdicts_agree_with_uniform_strategies(make_model, seed):
    for m, f, trace in _pool_runs(make_model, [seed], 0.6):
        report = model_checking_procedure(m, f, trace)
        if report.verdict.conclusive:
            assert StrategyOracle(m).holds(f, m.initial_state) == (report.verdict is T), str(f)


@pytest.mark.slow
@pytest.mark.parametrize("info_ratio", [0.0, 0.4, 0.6, 0.8, 1.0])
def test_no_soundness_violation_on_generated_runs(make_model, info_ratio):
    for m, f, trace in _pool_runs(make_model, range(20), info_ratio):
        try:
            report = model_checking_procedure(m, f, trace)
        except SoundnessError as e:
            pytest.fail(f"{f}: {e}")
        assert not report.conflict
        if report.verdict.conclusive:
            assert StrategyOracle(m).holds(f, m.initial_state) == (report.verdict is T), str(f)


STAR_POOL = [
    "<<1>> (F p & X q)",
    "<<1,2>> (F p & X q)",
    "<<2>> (G p | F q)",
    "[[1]] (X p | G q)",
    "<<1>> F (p & X q)",
    "<<>> (p U (q & X r))",
    "<<1>> G F p",
    "!<<2>> (F p & F q)",
    "<<1>> X <<2>> (F p & G q)",
    "<<1,2>> G (p | X q)",
]


def _approximation_violations(m, trace, texts):
    """Conclusive verdicts not backed by the grand or empty coalition reading of the formula"""
    oracle = StrategyOracle(m, Recall.BOUNDED)
    grand, empty = tuple(m.agents), ()
    violations = []
    for text in texts:
        f = parse(text)
        report = model_checking_procedure(m, f, trace)
        nnf = to_nnf(f)
        if report.verdict is T and not oracle.holds(rewrite_coalitions(nnf, grand), m.initial_state):
            violations.append((text, "top"))
        if report.verdict is B and oracle.holds(rewrite_coalitions(nnf, empty), m.initial_state):
            violations.append((text, "bottom"))
    return violations


def _all_texts(m):
    return STAR_POOL + [str(instantiate(template, m)) for template in FORMULA_POOL]


class TestCoalitionApproximations:
    def test_grand_coalition_star_formula_on_a_confused_model(self, make_model):
        m = make_model(24, info_ratio=0.8)
        trace = simulate(m, 12, seed=24)
        report = model_checking_procedure(m, parse("<<1,2>> (F p & X q)"), trace)
        if report.verdict is T:
            assert StrategyOracle(m, Recall.BOUNDED).holds(parse("<<1,2>> (F p & X q)"), m.initial_state)
        assert _approximation_violations(m, trace, STAR_POOL) == []

    @pytest.mark.parametrize("info_ratio", [0.4, 0.8])
    @pytest.mark.parametrize("seed", range(3))
    def test_conclusive_verdicts_bound_the_formula(self, make_model, seed, info_ratio):
        m = make_model(seed, info_ratio=info_ratio)
        assert _approximation_violations(m, simulate(m, 12, seed=seed), _all_texts(m)) == []

    @pytest.mark.slow
    @pytest.mark.parametrize("info_ratio", [0.0, 0.4, 0.6, 0.8, 1.0])
    def test_conclusive_verdicts_bound_the_formula_on_many_runs(self, make_model, info_ratio):
        failures = {}
        for seed in range(40):
            m = make_model(seed, info_ratio=info_ratio)
            found = _approximation_violations(m, simulate(m, 12, seed=seed), _all_texts(m))
            if found:
                failures[seed] = found
        assert failures == {}
