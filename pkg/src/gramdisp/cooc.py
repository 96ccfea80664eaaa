"""
Window co-occurrence counting over matched targets.

Each target match with span [i, j] contributes the tokens at [i - w, i - 1]
and [j + 1, j + w] of its sentence (clipped, span tokens excluded) as
lemma+POS context keys. Counting is shard-parallel; shard tables are summed
with `merge_counts`, which is commutative and associative.
"""
import hashlib
import logging
from collections import Counter
from dataclasses import dataclass, field, replace
from functools import partial, reduce
from pathlib import Path
from typing import Any, Dict, FrozenSet, Iterable, List, Mapping, Optional, Sequence, Union

from pydantic import BaseModel, ValidationError

from gramdisp.artifacts import check_fingerprint, header_lines, read_table, write_lines
from gramdisp.config import RunConfig
from gramdisp.corpus import (
    PreprocessConfig,
    Sentence,
    build_frequency_table,
    file_digest,
    normalize,
    read_vertical,
    sentence_keys,
    surviving_positions,
)
from gramdisp.errors import CorruptArtifact, FingerprintMismatch, MalformedLine
from gramdisp.sharding import batched, map_shards
from gramdisp.targets import TargetLexicon, match_targets

logger = logging.getLogger(__name__)

COUNT_COLUMNS = ("target", "context", "count")


@dataclass(frozen=True)
class CoocTable:
    """
    Per-target context counts and occurrence counts.

    `contexts` and `occurrences` have the same keys; a target with no
    contexts maps to an empty Counter. `sources` holds the digests of the
    corpora (or shards) counted and is not part of equality.
    """

    contexts: Dict[str, Counter]
    occurrences: Dict[str, int]
    window: int
    fingerprint: str = ""
    sources: FrozenSet[str] = field(default=frozenset(), compare=False)

    @classmethod
    def empty(cls, target_ids: Iterable[str], window: int, fingerprint: str = "") -> "CoocTable":
        ids = list(target_ids)
        return cls({t: Counter() for t in ids}, {t: 0 for t in ids}, window, fingerprint)

    @property
    def targets(self) -> List[str]:
        return sorted(self.occurrences)

    @property
    def corpus_digest(self) -> str:
        if not self.sources:
            return ""
        if len(self.sources) == 1:
            return next(iter(self.sources))
        return hashlib.sha256("\n".join(sorted(self.sources)).encode("ascii")).hexdigest()


def count_cooccurrences(
    sentences: Iterable[Sentence],
    lexicon: TargetLexicon,
    window: int = 2,
    case_fold: bool = True,
    fingerprint: str = "",
    preprocess: Optional[PreprocessConfig] = None,
    freq: Optional[Mapping[str, int]] = None,
) -> CoocTable:
    """
    Counts symmetric, unweighted window contexts for every target match.

    Targets are always matched on the sentence as given. With `preprocess`,
    the sentence is filtered afterwards and each match span is mapped onto
    the surviving tokens, so deletions move window edges but never create
    or remove target occurrences.
    """
    if window < 1:
        raise ValueError(f"Window must be >= 1, got {window}")
    table = CoocTable.empty(lexicon.ids, window, fingerprint)
    contexts, occurrences = table.contexts, table.occurrences
    for sentence in sentences:
        matches = match_targets(sentence, lexicon)
        if not matches:
            continue
        if preprocess is None:
            keys = sentence_keys(sentence, case_fold)
            position = None
        else:
            survivors = surviving_positions(sentence, preprocess, freq, lexicon.covered_positions(sentence))
            keys = [normalize(sentence[i], case_fold) for i in survivors]
            # match spans are protected, so every start and end survives
            position = {raw: filtered for filtered, raw in enumerate(survivors)}
        n = len(keys)
        for item_id, start, end in matches:
            if position is not None:
                start, end = position[start], position[end]
            occurrences[item_id] += 1
            ctx = contexts[item_id]
            ctx.update(keys[max(0, start - window):start])
            ctx.update(keys[end + 1:min(n, end + 1 + window)])
    return table


def count_occurrences(sentences: Iterable[Sentence], lexicon: TargetLexicon) -> Dict[str, int]:
    """Target match counts without context collection."""
    occurrences = {t: 0 for t in lexicon.ids}
    for sentence in sentences:
        for match in match_targets(sentence, lexicon):
            occurrences[match.item_id] += 1
    return occurrences


def merge_counts(a: CoocTable, b: CoocTable) -> CoocTable:
    """
    Pointwise sum of two tables.

    Raises:
        FingerprintMismatch: The tables differ in window or config fingerprint.
    """
    if a.window != b.window or a.fingerprint != b.fingerprint:
        raise FingerprintMismatch(
            f"{a.fingerprint}/w{a.window}", f"{b.fingerprint}/w{b.window}", "co-occurrence table"
        )
    contexts: Dict[str, Counter] = {}
    occurrences: Dict[str, int] = {}
    for target in set(a.occurrences) | set(b.occurrences):
        merged = Counter(a.contexts.get(target, ()))
        merged.update(b.contexts.get(target, Counter()))
        contexts[target] = merged
        occurrences[target] = a.occurrences.get(target, 0) + b.occurrences.get(target, 0)
    return CoocTable(contexts, occurrences, a.window, a.fingerprint, a.sources | b.sources)


@dataclass(frozen=True)
class ShardJob:
    """Filter-and-count work applied to one shard of raw sentences."""

    lexicon: TargetLexicon
    preprocess: PreprocessConfig
    window: int
    fingerprint: str = ""
    freq: Optional[Mapping[str, int]] = None
    count_unfiltered: bool = False

    def __call__(self, shard: Sequence[Sentence]) -> CoocTable:
        table = count_cooccurrences(
            shard,
            self.lexicon,
            self.window,
            self.preprocess.case_fold,
            self.fingerprint,
            preprocess=self.preprocess,
            freq=self.freq,
        )
        if self.count_unfiltered:
            table = replace(table, occurrences=count_occurrences(shard, self.lexicon))
        return table


# Per-process job, installed once by the pool initializer.
_job: Optional[ShardJob] = None


def _install_job(job: ShardJob) -> None:
    global _job
    _job = job


def _run_installed_job(shard: Sequence[Sentence]) -> CoocTable:
    return _job(shard)


def preprocess_config(config: RunConfig) -> PreprocessConfig:
    return PreprocessConfig(stop_pos=frozenset(config.stop_pos), min_count=config.min_count, case_fold=config.case_fold)


def count_corpus(path: Union[str, Path], lexicon: TargetLexicon, config: RunConfig) -> CoocTable:
    """
    Streams a vertical corpus file through filtering and counting.

    The frequency pass only runs when `min_count` can delete anything.
    """
    preprocess = preprocess_config(config)
    freq = None
    if preprocess.min_count > 1:
        freq = Counter()
        for part in map_shards(
            partial(build_frequency_table, case_fold=preprocess.case_fold),
            batched(read_vertical(path), config.batch_size),
            workers=config.threads,
            progress=config.progress,
            desc="frequency",
        ):
            freq.update(part)
        logger.info("Frequency table: %d keys", len(freq))

    job = ShardJob(lexicon, preprocess, config.window, config.fingerprint, freq, config.count_unfiltered)
    table = reduce(
        merge_counts,
        map_shards(
            _run_installed_job,
            batched(read_vertical(path), config.batch_size),
            workers=config.threads,
            initializer=_install_job,
            initargs=(job,),
            progress=config.progress,
            desc="counting",
        ),
        CoocTable.empty(lexicon.ids, config.window, config.fingerprint),
    )
    matched = sum(1 for n in table.occurrences.values() if n)
    logger.info("Counted %d of %d targets in %s", matched, len(table.occurrences), path)
    return replace(table, sources=frozenset({file_digest(path)}))


class CountsMeta(BaseModel):
    """Sidecar metadata of a serialized co-occurrence table."""

    window: int
    fingerprint: str
    corpus_digest: str
    sources: List[str]
    config: Dict[str, Any]
    occurrences: Dict[str, int]


def meta_path(counts_path: Union[str, Path]) -> Path:
    counts_path = Path(counts_path)
    return counts_path.with_name(counts_path.stem + ".meta.json")


def write_counts(table: CoocTable, path: Union[str, Path], config: RunConfig) -> Path:
    """Writes `target<TAB>context<TAB>count` rows plus the metadata sidecar."""
    if table.fingerprint != config.fingerprint:
        raise FingerprintMismatch(config.fingerprint, table.fingerprint, "co-occurrence table")
    lines = header_lines("counts", config, table.corpus_digest)
    lines.append("\t".join(COUNT_COLUMNS))
    for target in table.targets:
        ctx = table.contexts[target]
        lines.extend(f"{target}\t{key}\t{ctx[key]}" for key in sorted(ctx))
    path = write_lines(path, lines)

    meta = CountsMeta(
        window=table.window,
        fingerprint=table.fingerprint,
        corpus_digest=table.corpus_digest,
        sources=sorted(table.sources),
        config=config.analysis_settings(),
        occurrences={t: table.occurrences[t] for t in table.targets},
    )
    write_lines(meta_path(path), [meta.model_dump_json(indent=2)])
    return path


def read_counts(path: Union[str, Path], config: Optional[RunConfig] = None) -> CoocTable:
    """
    Reads a counts TSV and its sidecar.

    Raises:
        FingerprintMismatch: `config` is given and differs from the producing config.
        MalformedLine: A data row with an unknown target or a count that is not a positive integer.
        CorruptArtifact: The sidecar is not valid counts metadata.
    """
    header, rows = read_table(path, COUNT_COLUMNS)
    sidecar = meta_path(path)
    with open(sidecar, encoding="utf-8") as f:
        try:
            meta = CountsMeta.model_validate_json(f.read())
        except ValidationError as e:
            raise CorruptArtifact(str(sidecar), f"{e.error_count()} invalid field(s)") from None
    if config is not None:
        check_fingerprint(header, config, f"counts {path}")
        if meta.fingerprint != config.fingerprint:
            raise FingerprintMismatch(config.fingerprint, meta.fingerprint, f"counts metadata {sidecar}")

    table = CoocTable.empty(meta.occurrences, meta.window, meta.fingerprint)
    table.occurrences.update(meta.occurrences)
    for line_no, (target, key, count) in rows:
        if target not in table.contexts:
            raise MalformedLine(line_no, str(path), f"target {target!r} missing from metadata")
        try:
            n = int(count)
        except ValueError:
            raise MalformedLine(line_no, str(path), f"non-numeric count {count!r}") from None
        if n < 1:
            raise MalformedLine(line_no, str(path), f"count must be positive, got {n}")
        table.contexts[target][key] = n
    return replace(table, sources=frozenset(meta.sources))
