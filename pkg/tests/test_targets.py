import io

import numpy as np
import pytest

from conftest import sentence
from gramdisp.config import RunConfig
from gramdisp.corpus import AnnotatedToken, Sentence
from gramdisp.errors import BadDegree, DuplicateForm, EmptyGoldSet, MalformedLine
from gramdisp.targets import (
    GoldItem,
    TargetLexicon,
    TargetMatch,
    build_lexicon,
    load_goldset,
    match_targets,
    read_goldset,
)


def test_load_goldset_multiword():
    items = load_goldset(io.StringIO("am Rande\t1\ntrotz\t2\n"))
    assert items == [GoldItem(("am", "Rande"), 1), GoldItem(("trotz",), 2)]
    assert items[0].id == "am Rande"


def test_load_goldset_skips_comments_and_blanks():
    items = load_goldset(io.StringIO("# header\n\nwegen\t2\textra column\n"))
    assert [item.id for item in items] == ["wegen"]


@pytest.mark.parametrize("line", ["trotz\t5\n", "trotz\t0\n", "trotz\tx\n", "trotz\t2.5\n"])
def test_load_goldset_bad_degree(line):
    with pytest.raises(BadDegree):
        load_goldset(io.StringIO(line))


def test_load_goldset_missing_degree():
    with pytest.raises(MalformedLine) as exc:
        load_goldset(io.StringIO("wegen\t2\ntrotz\n"), source="gold.tsv")
    assert exc.value.line_no == 2
    assert "gold.tsv:2" in str(exc.value)


def test_load_goldset_duplicate():
    with pytest.raises(DuplicateForm):
        load_goldset(io.StringIO("trotz\t2\ntrotz\t3\n"))


def test_read_goldset_empty(tmp_path):
    path = tmp_path / "gold.tsv"
    path.write_text("# nothing here\n", encoding="utf-8")
    with pytest.raises(EmptyGoldSet):
        read_goldset(path)


def test_read_goldset_toy(toy_gold):
    assert len(toy_gold) == 8
    assert sorted({item.degree for item in toy_gold}) == [1, 2, 3, 4]


def test_gold_item_rejects_bad_degree():
    with pytest.raises(BadDegree):
        GoldItem(("trotz",), 7)


def test_case_folded_duplicates_rejected():
    with pytest.raises(DuplicateForm):
        TargetLexicon.compile([GoldItem(("Trotz",), 2), GoldItem(("trotz",), 2)])
    # without folding the two forms are distinct
    TargetLexicon.compile([GoldItem(("Trotz",), 2), GoldItem(("trotz",), 2)], case_fold=False)


def test_longest_match_wins():
    lexicon = TargetLexicon.compile([GoldItem(("mit",), 4), GoldItem(("mit", "Hilfe"), 3)])
    s = sentence("mit/mit/APPR", "Hilfe/Hilfe/NN", "der/die/ART", "Nachbarn/Nachbar/NN")
    assert lexicon.match(s) == [TargetMatch("mit Hilfe", 0, 1)]


def test_shortest_match_when_longest_is_off():
    lexicon = TargetLexicon.compile(
        [GoldItem(("mit",), 4), GoldItem(("mit", "Hilfe"), 3)], longest_match=False
    )
    s = sentence("mit/mit/APPR", "Hilfe/Hilfe/NN")
    assert lexicon.match(s) == [TargetMatch("mit", 0, 0)]


def test_matches_do_not_overlap():
    lexicon = TargetLexicon.compile([GoldItem(("a", "b"), 1), GoldItem(("b", "c"), 2)])
    s = sentence("a/a/X", "b/b/X", "c/c/X")
    assert lexicon.match(s) == [TargetMatch("a b", 0, 1)]
    assert lexicon.covered_positions(s) == frozenset({0, 1, 2})


def test_match_case_folding():
    lexicon = TargetLexicon.compile([GoldItem(("am", "Rande"), 1)])
    assert lexicon.match(sentence("Am/an/APPRART", "Rande/Rand/NN")) == [TargetMatch("am Rande", 0, 1)]
    strict = TargetLexicon.compile([GoldItem(("am", "Rande"), 1)], case_fold=False)
    assert strict.match(sentence("Am/an/APPRART", "Rande/Rand/NN")) == []


def test_match_on_lemma():
    lexicon = TargetLexicon.compile([GoldItem(("wegen",), 2)], match_field="lemma")
    assert lexicon.match(sentence("Wegen/wegen/APPR", "Regens/Regen/NN")) == [TargetMatch("wegen", 0, 0)]


def test_allowed_pos():
    lexicon = TargetLexicon.compile([GoldItem(("trotz",), 2)], allowed_pos={"APPR"})
    s = sentence("trotz/trotz/APPR", "des/die/ART", "Trotzes/Trotz/NN", "trotz/trotz/ADV")
    assert lexicon.match(s) == [TargetMatch("trotz", 0, 0)]


def test_match_several_per_sentence():
    lexicon = TargetLexicon.compile([GoldItem(("in",), 4), GoldItem(("mit",), 4)])
    s = sentence("mit/mit/APPR", "Hund/Hund/NN", "in/in/APPR", "Park/Park/NN")
    assert lexicon.match(s) == [TargetMatch("mit", 0, 0), TargetMatch("in", 2, 2)]


def test_empty_lexicon_matches_nothing():
    lexicon = TargetLexicon.compile([])
    s = sentence("in/in/APPR")
    assert lexicon.match(s) == []
    assert lexicon.covered_positions(s) == frozenset()


def test_build_lexicon_follows_config(toy_gold):
    lexicon = build_lexicon(toy_gold, RunConfig(match_field="lemma", longest_match=False, threads=1))
    assert lexicon.match_field == "lemma"
    assert not lexicon.longest_match
    assert lexicon.ids == [item.id for item in toy_gold]


def test_match_targets_function():
    lexicon = TargetLexicon.compile([GoldItem(("wegen",), 2)])
    assert match_targets(sentence("wegen/wegen/APPR"), lexicon) == [TargetMatch("wegen", 0, 0)]


def test_single_token_matches_equal_key_counts():
    rng = np.random.default_rng(7)
    forms = ["in", "trotz", "wegen", "mit"]
    vocab = [*forms, "In", "Haus", "Weg", "mitten", "der"]
    lexicon = TargetLexicon.compile([GoldItem((form,), 2) for form in forms])
    for _ in range(50):
        words = rng.choice(vocab, size=int(rng.integers(1, 15)))
        s = Sentence(tuple(AnnotatedToken(str(w), str(w).lower(), "X") for w in words))
        matches = match_targets(s, lexicon)
        for form in forms:
            expected = sum(1 for token in s if token.surface.lower() == form)
            assert sum(1 for m in matches if m.item_id == form) == expected
        assert all(m.start == m.end for m in matches)
