import pytest

from _acceptance import LINES

from discopile.corpus import EXPERIMENT_ANSATZ, builtin_corpus
from discopile.train import SpsaConfig, train


@pytest.fixture(scope="session")
def trained():
    """Parameters fitted on the bundled corpus, shared by the slower tests."""
    corpus = builtin_corpus()
    params, log = train(corpus.sentences, EXPERIMENT_ANSATZ, SpsaConfig(seed=2))
    return corpus, params, log



def pytest_terminal_summary(terminalreporter):
    if LINES:
        terminalreporter.section("acceptance")
        for n in sorted(LINES):
            terminalreporter.write_line(LINES[n])
