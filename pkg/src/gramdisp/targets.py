"""Gold test set loading and target matching for single- and multi-token prepositions."""
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import AbstractSet, Dict, FrozenSet, Iterable, List, Literal, NamedTuple, Optional, Sequence, Tuple, Union

from gramdisp.config import RunConfig
from gramdisp.corpus import AnnotatedToken, Sentence
from gramdisp.errors import BadDegree, DuplicateForm, EmptyGoldSet, MalformedLine

logger = logging.getLogger(__name__)

DEGREES = (1, 2, 3, 4)


@dataclass(frozen=True)
class GoldItem:
    form: Tuple[str, ...]
    degree: int
    id: str = field(default="")

    def __post_init__(self):
        object.__setattr__(self, "form", tuple(self.form))
        if not self.form or not all(self.form):
            raise ValueError("A gold form holds at least one nonempty key")
        if not isinstance(self.degree, int) or self.degree not in DEGREES:
            raise BadDegree(self.degree)
        if not self.id:
            object.__setattr__(self, "id", " ".join(self.form))


def load_goldset(stream: Iterable[str], source: Optional[str] = None) -> List[GoldItem]:
    """
    Reads `form<TAB>degree` lines; multi-token forms separate tokens with spaces.

    Blank lines and `#` comments are skipped, extra columns ignored. Items are
    returned in file order.

    Raises:
        MalformedLine: Fewer than two fields or an empty form.
        BadDegree: A degree that is not an integer in 1-4.
        DuplicateForm: The same form listed twice.
    """
    items: List[GoldItem] = []
    seen = set()
    for line_no, raw in enumerate(stream, start=1):
        line = raw.rstrip("\r\n")
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        fields = line.split("\t")
        if len(fields) < 2:
            raise MalformedLine(line_no, source, "expected form<TAB>degree")
        form = tuple(fields[0].split())
        if not form:
            raise MalformedLine(line_no, source, "empty form")
        try:
            degree = int(fields[1].strip())
        except ValueError:
            raise BadDegree(fields[1].strip(), line_no, source) from None
        if degree not in DEGREES:
            raise BadDegree(degree, line_no, source)
        item = GoldItem(form, degree)
        if item.id in seen:
            raise DuplicateForm(item.id)
        seen.add(item.id)
        items.append(item)
    return items


def read_goldset(path: Union[str, Path]) -> List[GoldItem]:
    with open(path, encoding="utf-8") as f:
        items = load_goldset(f, source=str(path))
    if not items:
        raise EmptyGoldSet(str(path))
    logger.info("Loaded %d gold items from %s", len(items), path)
    return items


class TargetMatch(NamedTuple):
    item_id: str
    start: int
    end: int  # inclusive


@dataclass(frozen=True)
class TargetLexicon:
    """
    Compiled matcher over gold forms.

    Entries are indexed by their first key; candidates at a position are
    tried longest first (or shortest first when `longest_match` is off).
    Immutable once compiled, so one lexicon can serve many workers.
    """

    items: Tuple[GoldItem, ...]
    match_field: Literal["surface", "lemma"] = "surface"
    longest_match: bool = True
    case_fold: bool = True
    allowed_pos: Optional[FrozenSet[str]] = None
    _index: Dict[str, Tuple[Tuple[Tuple[str, ...], str], ...]] = field(
        default_factory=dict, init=False, repr=False, compare=False
    )

    def __post_init__(self):
        index: Dict[str, List[Tuple[Tuple[str, ...], str]]] = {}
        seen: Dict[Tuple[str, ...], str] = {}
        ids = set()
        for item in self.items:
            if item.id in ids:
                raise DuplicateForm(item.id)
            ids.add(item.id)
            keys = tuple(self._fold(k) for k in item.form)
            if keys in seen:
                # "Trotz" and "trotz" collapse under case folding
                raise DuplicateForm(item.id)
            seen[keys] = item.id
            index.setdefault(keys[0], []).append((keys, item.id))
        for entries in index.values():
            entries.sort(key=lambda e: len(e[0]), reverse=self.longest_match)
        object.__setattr__(self, "_index", {k: tuple(v) for k, v in index.items()})

    @classmethod
    def compile(
        cls,
        items: Iterable[GoldItem],
        match_field: Literal["surface", "lemma"] = "surface",
        longest_match: bool = True,
        case_fold: bool = True,
        allowed_pos: Optional[AbstractSet[str]] = None,
    ) -> "TargetLexicon":
        return cls(
            items=tuple(items),
            match_field=match_field,
            longest_match=longest_match,
            case_fold=case_fold,
            allowed_pos=frozenset(allowed_pos) if allowed_pos else None,
        )

    @property
    def ids(self) -> List[str]:
        return [item.id for item in self.items]

    def _fold(self, key: str) -> str:
        return key.lower() if self.case_fold else key

    def key_of(self, token: AnnotatedToken) -> str:
        return self._fold(token.surface if self.match_field == "surface" else token.lemma)

    def _accepts(self, tokens: Sequence[AnnotatedToken]) -> bool:
        return self.allowed_pos is None or any(t.pos in self.allowed_pos for t in tokens)

    def _occurrences_at(self, keys: Sequence[str], sentence: Sentence, i: int) -> Iterable[Tuple[str, int]]:
        """Yields (item id, length) of every entry matching at position i, in preference order."""
        for form, item_id in self._index.get(keys[i], ()):
            n = len(form)
            if tuple(keys[i:i + n]) == form and self._accepts(sentence.tokens[i:i + n]):
                yield item_id, n

    def match(self, sentence: Sentence) -> List[TargetMatch]:
        """Non-overlapping target matches, scanned left to right."""
        if not self._index:
            return []
        keys = [self.key_of(t) for t in sentence]
        matches: List[TargetMatch] = []
        i = 0
        while i < len(keys):
            hit = next(iter(self._occurrences_at(keys, sentence, i)), None)
            if hit is None:
                i += 1
                continue
            item_id, n = hit
            matches.append(TargetMatch(item_id, i, i + n - 1))
            i += n
        return matches

    def covered_positions(self, sentence: Sentence) -> FrozenSet[int]:
        """Positions inside any occurrence of any entry, overlaps included."""
        if not self._index:
            return frozenset()
        keys = [self.key_of(t) for t in sentence]
        covered = set()
        for i in range(len(keys)):
            for _, n in self._occurrences_at(keys, sentence, i):
                covered.update(range(i, i + n))
        return frozenset(covered)


def match_targets(sentence: Sentence, lexicon: TargetLexicon) -> List[TargetMatch]:
    return lexicon.match(sentence)


def build_lexicon(items: Iterable[GoldItem], config: RunConfig) -> TargetLexicon:
    return TargetLexicon.compile(
        items,
        match_field=config.match_field,
        longest_match=config.longest_match,
        case_fold=config.case_fold,
        allowed_pos=config.allowed_pos,
    )
