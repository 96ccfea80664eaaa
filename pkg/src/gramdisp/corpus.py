"""
Vertical-format corpus reading and preprocessing.

A vertical corpus has one token per line, `surface<TAB>lemma<TAB>pos`, extra
columns ignored, and a blank line between sentences. Structural markup lines
such as `<s>` or `<text id="...">` are tolerated; `</s>` closes a sentence.
"""
import hashlib
import logging
from collections import Counter
from dataclasses import dataclass
from pathlib import Path
from typing import TYPE_CHECKING, AbstractSet, Iterable, Iterator, List, Mapping, Optional, Tuple, Union

from gramdisp.errors import InvalidEncoding, MalformedLine

if TYPE_CHECKING:
    from gramdisp.targets import TargetLexicon

logger = logging.getLogger(__name__)

KEY_SEPARATOR = ":"


@dataclass(frozen=True)
class AnnotatedToken:
    surface: str
    lemma: str
    pos: str

    def __post_init__(self):
        if not (self.surface and self.lemma and self.pos):
            raise ValueError(f"Token fields must be nonempty: {self!r}")

    def to_line(self) -> str:
        return f"{self.surface}\t{self.lemma}\t{self.pos}"


@dataclass(frozen=True)
class Sentence:
    tokens: Tuple[AnnotatedToken, ...]

    def __post_init__(self):
        if not self.tokens:
            raise ValueError("A sentence holds at least one token")

    def __len__(self) -> int:
        return len(self.tokens)

    def __iter__(self) -> Iterator[AnnotatedToken]:
        return iter(self.tokens)

    def __getitem__(self, index):
        return self.tokens[index]


@dataclass(frozen=True)
class PreprocessConfig:
    stop_pos: AbstractSet[str] = frozenset()
    min_count: int = 0
    case_fold: bool = True

    def __post_init__(self):
        if self.min_count < 0:
            raise ValueError(f"min_count must be >= 0, got {self.min_count}")

    @property
    def is_identity(self) -> bool:
        return not self.stop_pos and self.min_count <= 1


def _is_markup(line: str) -> bool:
    return "\t" not in line and line.startswith("<") and line.endswith(">")


def parse_vertical(stream: Iterable[Union[str, bytes]], source: Optional[str] = None) -> Iterator[Sentence]:
    """
    Parses a vertical corpus into sentences, lazily and in input order.

    Args:
        stream: Lines of text, or raw bytes lines (decoded as UTF-8). A byte
            order mark at the start of the first line is dropped.
        source: Name used in error messages, usually the file path.

    Raises:
        MalformedLine: A token line with fewer than 3 fields or an empty field.
        InvalidEncoding: A bytes line that is not valid UTF-8.
    """
    tokens: List[AnnotatedToken] = []
    for line_no, raw in enumerate(stream, start=1):
        if isinstance(raw, bytes):
            try:
                raw = raw.decode("utf-8-sig" if line_no == 1 else "utf-8")
            except UnicodeDecodeError:
                raise InvalidEncoding(line_no, source) from None
        elif line_no == 1:
            raw = raw.lstrip("\ufeff")
        line = raw.rstrip("\r\n")

        if not line.strip() or line.strip() == "</s>":
            if tokens:
                yield Sentence(tuple(tokens))
                tokens = []
            continue
        if _is_markup(line.strip()):
            continue

        fields = line.split("\t")
        if len(fields) < 3:
            raise MalformedLine(line_no, source, f"expected 3 tab-separated fields, got {len(fields)}")
        surface, lemma, pos = fields[0], fields[1], fields[2]
        if not (surface and lemma and pos):
            raise MalformedLine(line_no, source, "empty field")
        tokens.append(AnnotatedToken(surface, lemma, pos))

    if tokens:
        yield Sentence(tuple(tokens))


def read_vertical(path: Union[str, Path]) -> Iterator[Sentence]:
    """Streams sentences from a vertical corpus file."""
    with open(path, "rb") as f:
        yield from parse_vertical(f, source=str(path))


def write_vertical(sentences: Iterable[Sentence]) -> str:
    return "".join(
        "".join(token.to_line() + "\n" for token in sentence) + "\n" for sentence in sentences
    )


def file_digest(path: Union[str, Path]) -> str:
    """SHA-256 of a file's bytes."""
    sha = hashlib.sha256()
    with open(path, "rb") as f:
        for chunk in iter(lambda: f.read(1 << 20), b""):
            sha.update(chunk)
    return sha.hexdigest()


def normalize(token: AnnotatedToken, case_fold: bool = True) -> str:
    """The lemma+POS context key of a token, e.g. `hund:NN`."""
    lemma = token.lemma.lower() if case_fold else token.lemma
    return f"{lemma}{KEY_SEPARATOR}{token.pos}"


def build_frequency_table(sentences: Iterable[Sentence], case_fold: bool = True) -> Counter:
    """Exact corpus counts of normalized keys."""
    freq: Counter = Counter()
    for sentence in sentences:
        freq.update(normalize(token, case_fold) for token in sentence)
    return freq


def merge_frequency_tables(*tables: Mapping[str, int]) -> Counter:
    merged: Counter = Counter()
    for table in tables:
        merged.update(table)
    return merged


def surviving_positions(
    sentence: Sentence,
    config: PreprocessConfig,
    freq: Optional[Mapping[str, int]] = None,
    protected: AbstractSet[int] = frozenset(),
) -> List[int]:
    """
    Indices of the tokens of `sentence` that survive filtering, in order.

    Raises:
        ValueError: `config.min_count > 1` without a frequency table.
    """
    if config.min_count > 1 and freq is None:
        raise ValueError("A frequency table is required when min_count > 1")
    return [
        i
        for i, token in enumerate(sentence)
        if i in protected
        or (
            token.pos not in config.stop_pos
            and (config.min_count <= 1 or freq.get(normalize(token, config.case_fold), 0) >= config.min_count)
        )
    ]


def apply_filters(
    sentences: Iterable[Sentence],
    config: PreprocessConfig,
    freq: Optional[Mapping[str, int]] = None,
    lexicon: Optional["TargetLexicon"] = None,
) -> List[Sentence]:
    """
    Deletes function-word and low-frequency tokens.

    A token goes when its POS is in `config.stop_pos` or its key count in
    `freq` is below `config.min_count`. Tokens inside any occurrence of a
    `lexicon` form are kept regardless. Survivors keep their order, so later
    windows span the deletion sites; sentences left empty are dropped.
    """
    if config.min_count > 1 and freq is None:
        raise ValueError("A frequency table is required when min_count > 1")

    kept: List[Sentence] = []
    seen = 0
    for sentence in sentences:
        seen += 1
        protected = lexicon.covered_positions(sentence) if lexicon is not None else frozenset()
        survivors = surviving_positions(sentence, config, freq, protected)
        if len(survivors) == len(sentence):
            kept.append(sentence)
        elif survivors:
            kept.append(Sentence(tuple(sentence[i] for i in survivors)))
    if len(kept) < seen:
        logger.debug("Filtering emptied %d of %d sentences", seen - len(kept), seen)
    return kept


def sentence_keys(sentence: Sentence, case_fold: bool = True) -> List[str]:
    return [normalize(token, case_fold) for token in sentence]
