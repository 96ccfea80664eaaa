import pathlib

import pytest

from gramdisp.config import RunConfig
from gramdisp.corpus import AnnotatedToken, Sentence
from gramdisp.targets import build_lexicon, read_goldset


def sentence(*tokens):
    """Builds a Sentence from `surface/lemma/POS` strings."""
    return Sentence(tuple(AnnotatedToken(*token.split("/")) for token in tokens))


def data_rows(path):
    """Non-header lines of an artifact or golden file."""
    with open(path, encoding="utf-8") as fh:
        return [line.rstrip("\n") for line in fh if not line.startswith("#")]


@pytest.fixture
def testdata_dir():
    return pathlib.Path(__file__).parent / "testdata"


@pytest.fixture
def toy_corpus(testdata_dir):
    return testdata_dir / "toy_corpus.vrt"


@pytest.fixture
def toy_gold_path(testdata_dir):
    return testdata_dir / "toy_gold.tsv"


@pytest.fixture
def toy_gold(toy_gold_path):
    return read_goldset(toy_gold_path)


@pytest.fixture
def config(tmp_path):
    return RunConfig(output_dir=tmp_path / "out", threads=1)


@pytest.fixture
def toy_lexicon(toy_gold, config):
    return build_lexicon(toy_gold, config)


@pytest.fixture(autouse=True)
def clean_environment(monkeypatch):
    import os

    for key in list(os.environ):
        if key.startswith("GRAMDISP_"):
            monkeypatch.delenv(key)
