from __future__ import annotations

import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from vizlint.corpus import CorpusConfig, generate_corpus
from vizlint.rulebook import default_rulebook


@pytest.fixture(scope="session")
def rulebook():
    return default_rulebook()


@pytest.fixture(scope="session")
def corpus42(tmp_path_factory):
    """The default 72-item corpus at seed 42, generated once per session."""
    out = tmp_path_factory.mktemp("corpus42")
    items = generate_corpus(CorpusConfig(seed=42, output_dir=out))
    return items, out


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    """Echo one line per acceptance criterion after the run."""
    mod = sys.modules.get("test_acceptance")
    results = getattr(mod, "RESULTS", None) if mod else None
    if results:
        terminalreporter.section("acceptance criteria")
        for line in results:
            terminalreporter.write_line(line)
