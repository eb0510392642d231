import pytest

from sloth_search.corpus import generate_corpus
from sloth_search.engine import SearchEngine
from sloth_search.ingest import build_indexes
from sloth_search.manifest import load_manifest


@pytest.fixture(scope="session")
def corpus(tmp_path_factory):
    out = tmp_path_factory.mktemp("corpus")
    return generate_corpus(out, videos=6, frames_per_video=5, seed=11)


@pytest.fixture(scope="session")
def bundle(corpus):
    manifest = load_manifest(corpus.manifest_path)
    return build_indexes(manifest, corpus.out_dir, seed=3)


@pytest.fixture(scope="session")
def engine(bundle):
    return SearchEngine(bundle)
