"""
Conclusive-rate sweep over random models with growing imperfect information
"""
import csv
import io
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np

from app.config import settings
from app.core.exceptions import InputError, StratmonError
from app.models.automata import Verdict
from app.models.formula import Formula
from app.models.icgs import ICGS
from app.schemas.experiment import GeneratorConfig, SweepRow, TrendCheck
from app.services.formula_service import parse
from app.services.generator_service import generate_random_icgs
from app.services.icgs_service import simulate
from app.services.verification_service import model_checking_procedure

logger = logging.getLogger(__name__)

FORMULA_POOL: Tuple[str, ...] = (
    "<<{a1}>> X {p}",
    "<<{all}>> F {q}",
    "<<{a2}>> ({p} U {q})",
    "<<{a1}>> G {p}",
    "[[{a1}]] F {p}",
    "<<{a1}>> ({q} R {p})",
    "<<>> X ({p} | {q})",
    "<<{all}>> G ({p} | {r})",
    "<<{a1}>> X <<{a2}>> F {q}",
    "<<{a1}>> F {p} & <<{a2}>> X {q}",
)

CSV_COLUMNS = (
    "ratio", "models", "conclusive_rate", "static_share", "conclusive", "top", "bottom",
    "failures", "mean_candidates", "mean_static_ms", "mean_rv_ms",
)
TIMING_COLUMNS = ("static_share", "mean_static_ms", "mean_rv_ms")

CONCLUSIVE_RATE_TARGET = 0.8


def instantiate(template: str, m: ICGS) -> Formula:
    """Fill a pool template with the agents and atoms of `m`"""
    agents = list(m.agents)
    atoms = list(m.atoms)
    if not atoms:
        raise InputError("Pool formulas need at least one atom")
    text = template.format(
        a1=agents[0],
        a2=agents[1 % len(agents)],
        all=",".join(agents),
        p=atoms[0],
        q=atoms[1 % len(atoms)],
        r=atoms[2 % len(atoms)],
    )
    return parse(text)


def parse_ratios(text: str) -> List[float]:
    """`start:stop:step` (inclusive) or a comma-separated list"""
    try:
        if ":" in text:
            start, stop, step = (float(x) for x in text.split(":"))
            if step <= 0:
                raise InputError("Ratio step must be positive")
            count = int(np.floor((stop - start) / step + 1e-9)) + 1
            values = [round(start + i * step, 10) for i in range(count)]
        else:
            values = [float(x) for x in text.split(",") if x.strip()]
    except InputError:
        raise
    except ValueError as e:
        raise InputError(f"Invalid ratio list {text!r}") from e
    if not values or any(v < 0.0 or v > 1.0 for v in values):
        raise InputError(f"Ratios must lie in [0, 1], got {text!r}")
    return values


@dataclass(frozen=True)
class RunRecord:
    """One (model, formula, trace) run of the sweep"""

    ratio: float
    index: int
    formula: str
    verdict: Optional[Verdict]
    candidates: int
    static_ms: float
    rv_ms: float
    error: Optional[str] = None


def _run_one(
    template: GeneratorConfig, ratio: float, index: int, seeds: Sequence[int], steps: int,
) -> RunRecord:
    cfg = template.model_copy(update={"info_ratio": ratio, "seed": int(seeds[0])})
    formula_text = FORMULA_POOL[index % len(FORMULA_POOL)]
    try:
        m = generate_random_icgs(cfg)
        f = instantiate(formula_text, m)
        trace = simulate(m, steps, seed=int(seeds[1]))
        report = model_checking_procedure(m, f, trace, workers=1)
    except StratmonError as e:
        logger.warning(f"[Sweep] Run {index} at ratio {ratio} failed: {e}")
        return RunRecord(ratio, index, formula_text, None, 0, 0.0, 0.0, error=str(e))
    return RunRecord(
        ratio, index, str(f), report.verdict, report.candidate_count, report.static_ms, report.rv_ms,
    )


def summarize(ratio: float, records: Sequence[RunRecord]) -> SweepRow:
    done = [r for r in records if r.error is None]
    top = sum(1 for r in done if r.verdict is Verdict.TOP)
    bottom = sum(1 for r in done if r.verdict is Verdict.BOTTOM)
    static = sum(r.static_ms for r in done)
    rv = sum(r.rv_ms for r in done)
    runs = len(done)
    return SweepRow(
        info_ratio=ratio,
        models_run=runs,
        conclusive_count=top + bottom,
        conclusive_rate=(top + bottom) / runs if runs else 0.0,
        mean_static_ms=static / runs if runs else 0.0,
        mean_rv_ms=rv / runs if runs else 0.0,
        static_time_share=static / (static + rv) if static + rv > 0 else 0.0,
        failures=len(records) - runs,
        top_count=top,
        bottom_count=bottom,
        mean_candidates=sum(r.candidates for r in done) / runs if runs else 0.0,
    )


def run_sweep(
    template: GeneratorConfig,
    ratios: Sequence[float],
    models_per_ratio: int,
    steps: Optional[int] = None,
    seed: int = 0,
    workers: Optional[int] = None,
) -> List[SweepRow]:
    """
    Generate `models_per_ratio` models per ratio, simulate one trace each and
    run the full procedure with the next formula of the pool. Failed runs are
    counted, never fatal.
    """
    if models_per_ratio < 1:
        raise InputError("models_per_ratio must be at least 1")
    steps = settings.TRACE_LENGTH if steps is None else steps
    workers = settings.WORKERS if workers is None else workers

    children = np.random.SeedSequence(seed).spawn(len(ratios) * models_per_ratio)
    jobs = [
        (ratio, i, children[r * models_per_ratio + i].generate_state(2))
        for r, ratio in enumerate(ratios)
        for i in range(models_per_ratio)
    ]
    logger.info(f"[Sweep] {len(jobs)} run(s) over {len(ratios)} ratio(s), seed={seed}")

    def work(job) -> RunRecord:
        ratio, i, seeds = job
        return _run_one(template, ratio, i, seeds, steps)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            records = list(pool.map(work, jobs))
    else:
        records = [work(job) for job in jobs]

    rows = []
    for ratio in ratios:
        row = summarize(ratio, [r for r in records if r.ratio == ratio])
        logger.info(
            f"[Sweep] ratio={ratio:.2f} conclusive={row.conclusive_rate:.2f} "
            f"static_share={row.static_time_share:.2f} failures={row.failures}"
        )
        rows.append(row)
    return rows


def sweep_csv(rows: Sequence[SweepRow], timing: bool = True) -> str:
    """CSV rendering; without timing columns the output is reproducible byte for byte"""
    columns = [c for c in CSV_COLUMNS if timing or c not in TIMING_COLUMNS]
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        values = {
            "ratio": f"{row.info_ratio:.2f}",
            "models": row.models_run,
            "conclusive_rate": f"{row.conclusive_rate:.4f}",
            "static_share": f"{row.static_time_share:.4f}",
            "conclusive": row.conclusive_count,
            "top": row.top_count,
            "bottom": row.bottom_count,
            "failures": row.failures,
            "mean_candidates": f"{row.mean_candidates:.2f}",
            "mean_static_ms": f"{row.mean_static_ms:.3f}",
            "mean_rv_ms": f"{row.mean_rv_ms:.3f}",
        }
        writer.writerow([values[c] for c in columns])
    return buffer.getvalue()


def check_sweep_trends(rows: Sequence[SweepRow]) -> TrendCheck:
    """
    Indicative check on the mean conclusive rate (warning only) and the
    endpoint check that static checking takes a larger share of the time at
    the lowest ratio than at the highest one.
    """
    warnings: List[str] = []
    rates = [r.conclusive_rate for r in rows if r.models_run]
    mean_rate = sum(rates) / len(rates) if rates else 0.0
    rate_ok = mean_rate >= CONCLUSIVE_RATE_TARGET
    if not rate_ok:
        warnings.append(f"Mean conclusive rate {mean_rate:.2f} is below {CONCLUSIVE_RATE_TARGET}")

    check = TrendCheck(mean_conclusive_rate=mean_rate, conclusive_rate_ok=rate_ok, warnings=warnings)
    measured = [r for r in rows if r.models_run]
    if len(measured) >= 2:
        low = min(measured, key=lambda r: r.info_ratio)
        high = max(measured, key=lambda r: r.info_ratio)
        if low.info_ratio < high.info_ratio:
            trend_ok = low.static_time_share > high.static_time_share
            if not trend_ok:
                warnings.append(
                    f"Static share at ratio {low.info_ratio:.2f} ({low.static_time_share:.2f}) does not exceed "
                    f"the share at {high.info_ratio:.2f} ({high.static_time_share:.2f})"
                )
            check = check.model_copy(update={
                "static_share_low": low.static_time_share,
                "static_share_high": high.static_time_share,
                "static_share_trend_ok": trend_ok,
                "warnings": warnings,
            })
    for w in warnings:
        logger.warning(f"[Sweep] {w}")
    return check
