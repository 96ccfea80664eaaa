"""Contextual-dispersion scores: entropy, frequency and context types."""
import logging
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, Mapping, NamedTuple, Optional, Tuple, Union

import numpy as np
from scipy.stats import entropy as shannon_entropy

from gramdisp.artifacts import check_fingerprint, header_lines, read_table, write_lines
from gramdisp.config import RunConfig
from gramdisp.cooc import CoocTable
from gramdisp.errors import MalformedLine, NoContexts, UnknownTarget

logger = logging.getLogger(__name__)

MEASURES: Tuple[str, ...] = ("entropy", "frequency", "types")
SCORE_COLUMNS = ("target", "frequency", "types", "entropy")


def entropy(contexts: Mapping[str, int], log_base: float = 2.0) -> float:
    """
    Shannon entropy of a target's context distribution.

    Raises:
        NoContexts: The distribution is empty.
    """
    counts = np.fromiter((c for c in contexts.values() if c > 0), dtype=np.float64)
    if counts.size == 0:
        raise NoContexts("Entropy of an empty context distribution is undefined")
    if counts.size == 1:
        return 0.0
    return max(0.0, float(shannon_entropy(counts, base=log_base)))


def frequency(target_id: str, table: CoocTable) -> int:
    try:
        return table.occurrences[target_id]
    except KeyError:
        raise UnknownTarget(target_id) from None


def context_types(target_id: str, table: CoocTable) -> int:
    try:
        ctx = table.contexts[target_id]
    except KeyError:
        raise UnknownTarget(target_id) from None
    return sum(1 for count in ctx.values() if count >= 1)


class ScoreRow(NamedTuple):
    entropy: float
    frequency: int
    types: int

    @property
    def no_data(self) -> bool:
        """Entropy is undefined and recorded as 0."""
        return self.types == 0

    def value(self, measure: str) -> float:
        return float(getattr(self, measure))


@dataclass(frozen=True)
class ScoreTable:
    rows: Dict[str, ScoreRow]
    log_base: float = 2.0

    def __post_init__(self):
        if not self.log_base > 1:
            raise ValueError(f"log_base must be > 1, got {self.log_base}")

    @property
    def targets(self):
        return sorted(self.rows)

    def column(self, measure: str, target_ids) -> np.ndarray:
        return np.array([self.rows[t].value(measure) for t in target_ids], dtype=np.float64)


def score_table(table: CoocTable, log_base: float = 2.0) -> ScoreTable:
    """Scores every target in the table; targets without contexts get entropy 0."""
    rows: Dict[str, ScoreRow] = {}
    for target in table.targets:
        types = context_types(target, table)
        h = entropy(table.contexts[target], log_base) if types else 0.0
        rows[target] = ScoreRow(h, frequency(target, table), types)
    no_data = sum(1 for row in rows.values() if row.no_data)
    if no_data:
        logger.warning("%d of %d targets have no contexts and get no-data scores", no_data, len(rows))
    return ScoreTable(rows, log_base)


def format_entropy(value: float) -> str:
    return f"{value:.6f}"


def write_scores(scores: ScoreTable, path: Union[str, Path], config: RunConfig, corpus_digest: Optional[str] = None) -> Path:
    """Writes `target<TAB>frequency<TAB>types<TAB>entropy`, sorted by target id."""
    lines = header_lines("scores", config, corpus_digest, notes=[f"entropy log base {config.log_base:g}"])
    lines.append("\t".join(SCORE_COLUMNS))
    for target in scores.targets:
        row = scores.rows[target]
        lines.append(f"{target}\t{row.frequency}\t{row.types}\t{format_entropy(row.entropy)}")
    return write_lines(path, lines)


def read_scores(path: Union[str, Path], config: Optional[RunConfig] = None) -> Tuple[ScoreTable, Dict[str, str]]:
    """
    Reads a scores TSV; entropy comes back at its printed precision.

    Returns:
        The score table and the artifact header.
    """
    header, rows = read_table(path, SCORE_COLUMNS)
    if config is not None:
        check_fingerprint(header, config, f"scores {path}")
    parsed: Dict[str, ScoreRow] = {}
    for line_no, (target, freq, types, h) in rows:
        try:
            row = ScoreRow(float(h), int(freq), int(types))
        except ValueError:
            raise MalformedLine(line_no, str(path), "non-numeric score") from None
        if not math.isfinite(row.entropy) or row.entropy < 0 or row.frequency < 0 or row.types < 0:
            raise MalformedLine(line_no, str(path), "scores must be finite and nonnegative")
        parsed[target] = row
    log_base = float(header.get("log_base", config.log_base if config else 2.0))
    return ScoreTable(parsed, log_base), header
