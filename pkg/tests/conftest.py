import os
import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from retraj.synth import DEFAULT_SEED, generate


@pytest.fixture(autouse=True)
def _clean_env(monkeypatch):
    """Strip RTK_* variables so ambient shell state cannot steer tests."""
    for key in list(os.environ):
        if key.startswith("RTK_"):
            monkeypatch.delenv(key)


@pytest.fixture(scope="session")
def corpus():
    return generate(DEFAULT_SEED)


@pytest.fixture(scope="session")
def corpus_dir(corpus, tmp_path_factory):
    directory = tmp_path_factory.mktemp("corpus")
    corpus.write(directory)
    return directory
