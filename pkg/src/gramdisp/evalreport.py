"""
Evaluation of dispersion scores against graded gold labels, and the end-to-end pipeline.

The report has the layout of a results table: six pairwise-AP rows (degrees
1 vs. 2 through 3 vs. 4) and a Spearman row, with one column per measure,
plus the t-test p-values and Steiger comparisons between measures.
"""
import logging
from itertools import combinations
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

from pydantic import BaseModel, Field

from gramdisp.artifacts import header_lines, write_lines
from gramdisp.config import RunConfig
from gramdisp.cooc import count_corpus, write_counts
from gramdisp.errors import DegenerateSample, DomainError, EmptyClass, EmptyGoldSet, MissingScores
from gramdisp.measures import MEASURES, ScoreTable, read_scores, score_table, write_scores
from gramdisp.stats import (
    PairedSample,
    average_precision,
    expected_average_precision,
    rank_by_score,
    rho_t_test_p,
    spearman_rho,
    steiger_z,
)
from gramdisp.targets import DEGREES, GoldItem, build_lexicon, read_goldset

logger = logging.getLogger(__name__)

DEGREE_PAIRS: Tuple[Tuple[int, int], ...] = tuple(combinations(DEGREES, 2))
COMPARISON_PAIRS: Tuple[Tuple[str, str], ...] = (
    ("frequency", "types"),
    ("frequency", "entropy"),
    ("types", "entropy"),
)
REPORT_COLUMNS = ("row", "entropy", "frequency", "types")
RHO_ROW = "Spearman's rho (rank)"
P_ROW = "p (two-tailed, t-test)"

COUNTS_FILE = "counts.tsv"
SCORES_FILE = "scores.tsv"
REPORT_TSV = "report.tsv"
REPORT_JSON = "report.json"

METHOD_NOTES = (
    "rho p-values use the t approximation with n-2 df, no tie correction",
    "Steiger's Z uses the pooled mean-r form; r12 is the Spearman rho between the two measures",
    "low-frequency threshold and function-word POS list are configuration choices",
    "entropy is evaluated as printed in scores.tsv (6 decimals); values closer than 5e-7 tie",
)


def ap_row_label(pair: Tuple[int, int]) -> str:
    return f"AP (degrees {pair[0]} vs. {pair[1]})"


class RhoResult(BaseModel):
    rho: Optional[float] = None
    p_two_tailed: Optional[float] = None
    degenerate: bool = False


class ApCell(BaseModel):
    degrees: Tuple[int, int]
    measure: str
    ap: float


class SteigerResult(BaseModel):
    measure_a: str
    measure_b: str
    r1: Optional[float] = None
    r2: Optional[float] = None
    r12: Optional[float] = None
    n: int
    z_stat: Optional[float] = None
    p_two_tailed: Optional[float] = None
    undefined: bool = False


class EvalReport(BaseModel):
    """Structured evaluation result, serialized as report.json."""

    n: int
    gold_size: int
    fingerprint: str = ""
    corpus_digest: str = ""
    config: Dict[str, Any] = Field(default_factory=dict)
    ap_ties: str = "id"
    rho: Dict[str, RhoResult]
    ap: List[ApCell]
    comparisons: List[SteigerResult]
    excluded: List[str] = Field(default_factory=list)
    no_data: List[str] = Field(default_factory=list)
    flags: List[str] = Field(default_factory=list)
    notes: List[str] = Field(default_factory=list)

    def ap_value(self, pair: Tuple[int, int], measure: str) -> float:
        for cell in self.ap:
            if tuple(cell.degrees) == tuple(pair) and cell.measure == measure:
                return cell.ap
        raise KeyError((pair, measure))


def _pair_ap(items: Sequence[GoldItem], scores: ScoreTable, pair: Tuple[int, int], measure: str, ties: str) -> float:
    _, high = pair
    subset = [item for item in items if item.degree in pair]
    for degree in pair:
        if not any(item.degree == degree for item in subset):
            raise EmptyClass(degree)
    ranked = [(item.id, scores.rows[item.id].value(measure), item.degree == high) for item in subset]
    if ties == "expected":
        return expected_average_precision(ranked)
    return average_precision(rank_by_score(ranked))


def pairwise_ap_matrix(
    scores: ScoreTable, gold: Sequence[GoldItem], ties: str = "id"
) -> Dict[Tuple[Tuple[int, int], str], float]:
    """
    AP for every degree pair and measure.

    For a pair (i, j) with i < j only items of degrees i and j take part,
    ranked by descending score; degree j is the positive class.

    Raises:
        MissingScores: Gold items without a score row.
        EmptyClass: A degree with no items.
    """
    missing = [item.id for item in gold if item.id not in scores.rows]
    if missing:
        raise MissingScores(missing)
    return {
        (pair, measure): _pair_ap(gold, scores, pair, measure, ties)
        for pair in DEGREE_PAIRS
        for measure in MEASURES
    }


def _is_constant(values) -> bool:
    return len(values) == 0 or bool((values == values[0]).all())


def build_report(
    scores: ScoreTable,
    gold: Sequence[GoldItem],
    include_missing: bool = True,
    ties: str = "id",
    config: Optional[RunConfig] = None,
    corpus_digest: str = "",
) -> EvalReport:
    """
    Evaluates every measure against the gold degrees.

    Zero-frequency targets stay in with their no-data scores unless
    `include_missing` is off, in which case they are listed as excluded.

    Raises:
        EmptyGoldSet: No gold items.
        MissingScores: Gold items without a score row.
    """
    if not gold:
        raise EmptyGoldSet()
    missing = [item.id for item in gold if item.id not in scores.rows]
    if missing:
        raise MissingScores(missing)

    excluded = [] if include_missing else [item.id for item in gold if scores.rows[item.id].frequency == 0]
    dropped = frozenset(excluded)
    items = [item for item in gold if item.id not in dropped]
    ids = [item.id for item in items]
    n = len(items)
    degrees = [float(item.degree) for item in items]
    flags: List[str] = []

    rho: Dict[str, RhoResult] = {}
    columns = {measure: scores.column(measure, ids) for measure in MEASURES}
    for measure in MEASURES:
        try:
            r = spearman_rho(PairedSample(columns[measure], degrees))
            rho[measure] = RhoResult(rho=r, p_two_tailed=rho_t_test_p(r, n))
        except (DegenerateSample, DomainError) as e:
            logger.warning("No rho for %s: %s", measure, e)
            flags.append(f"{measure}: rho undefined ({e})")
            rho[measure] = RhoResult(degenerate=True)

    for measure in MEASURES:
        if n and _is_constant(columns[measure]):
            flags.append(f"{measure}: constant scores, AP cells reflect the tie order ({ties})")
    ap = [
        ApCell(degrees=pair, measure=measure, ap=value)
        for (pair, measure), value in pairwise_ap_matrix(scores, items, ties).items()
    ]

    comparisons: List[SteigerResult] = []
    for a, b in COMPARISON_PAIRS:
        ra, rb = rho[a].rho, rho[b].rho
        try:
            if ra is None or rb is None:
                raise DegenerateSample("a measure has no rho")
            r12 = spearman_rho(PairedSample(columns[a], columns[b]))
            cmp = steiger_z(ra, rb, r12, n)
            result = SteigerResult(
                measure_a=a, measure_b=b, r1=cmp.r1, r2=cmp.r2, r12=cmp.r12,
                n=n, z_stat=cmp.z_stat, p_two_tailed=cmp.p_two_tailed,
            )
        except (DegenerateSample, DomainError) as e:
            logger.warning("No Steiger comparison for %s vs %s: %s", a, b, e)
            flags.append(f"{a} vs {b}: comparison undefined ({e})")
            result = SteigerResult(measure_a=a, measure_b=b, n=n, undefined=True)
        comparisons.append(result)

    logger.info("Evaluated %d of %d gold items", n, len(gold))
    return EvalReport(
        n=n,
        gold_size=len(gold),
        fingerprint=config.fingerprint if config else "",
        corpus_digest=corpus_digest,
        config=config.analysis_settings() if config else {},
        ap_ties=ties,
        rho=rho,
        ap=ap,
        comparisons=comparisons,
        excluded=sorted(excluded),
        no_data=sorted(i for i in ids if scores.rows[i].no_data),
        flags=flags,
        notes=[*METHOD_NOTES, f"AP ties: {'expected over random orders' if ties == 'expected' else 'ascending target id'}"],
    )


def _cell(value: Optional[float]) -> str:
    return "NA" if value is None else f"{value:.6f}"


def format_report_rows(report: EvalReport) -> List[str]:
    """The table body: six AP rows, the rho row and the p row."""
    lines = ["\t".join(REPORT_COLUMNS)]
    for pair in DEGREE_PAIRS:
        lines.append("\t".join([ap_row_label(pair), *(_cell(report.ap_value(pair, m)) for m in REPORT_COLUMNS[1:])]))
    lines.append("\t".join([RHO_ROW, *(_cell(report.rho[m].rho) for m in REPORT_COLUMNS[1:])]))
    lines.append("\t".join([P_ROW, *(_cell(report.rho[m].p_two_tailed) for m in REPORT_COLUMNS[1:])]))
    return lines


def write_report(report: EvalReport, output_dir: Union[str, Path], config: RunConfig) -> Tuple[Path, Path]:
    """Writes report.tsv (table layout) and report.json (everything)."""
    output_dir = Path(output_dir)
    notes = [*report.notes, f"n={report.n} of {report.gold_size} gold items"]
    notes.extend(f"flag: {flag}" for flag in report.flags)
    lines = header_lines("report", config, report.corpus_digest or None, notes=notes)
    lines.extend(format_report_rows(report))
    tsv = write_lines(output_dir / REPORT_TSV, lines)
    js = write_lines(output_dir / REPORT_JSON, [report.model_dump_json(indent=2)])
    return tsv, js


def evaluate_scores(
    scores_path: Union[str, Path], gold: Sequence[GoldItem], config: RunConfig
) -> Tuple[ScoreTable, EvalReport]:
    """Evaluates a scores artifact produced under `config`."""
    scores, header = read_scores(scores_path, config)
    report = build_report(
        scores,
        gold,
        include_missing=config.include_missing,
        ties=config.ap_ties,
        config=config,
        corpus_digest=header.get("corpus_digest", ""),
    )
    return scores, report


def run_pipeline(
    corpus_path: Union[str, Path], gold_path: Union[str, Path], config: RunConfig
) -> Tuple[ScoreTable, EvalReport]:
    """
    parse -> filter -> match -> count -> score -> evaluate, writing every artifact.

    The report is computed from the scores as serialized, so this equals
    running the count, score and evaluate stages one after another.
    """
    gold = read_goldset(gold_path)
    lexicon = build_lexicon(gold, config)
    out = Path(config.output_dir)

    table = count_corpus(corpus_path, lexicon, config)
    write_counts(table, out / COUNTS_FILE, config)
    write_scores(score_table(table, config.log_base), out / SCORES_FILE, config, table.corpus_digest)

    scores, report = evaluate_scores(out / SCORES_FILE, gold, config)
    write_report(report, out, config)
    return scores, report
