import os
import sys
from pathlib import Path

import numpy as np
import pytest
from hypothesis import settings

sys.path.insert(0, str(Path(__file__).parent))

from maskattack.synth import speech_like  # noqa: E402

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

_ACCEPTANCE_KEY = pytest.StashKey[list]()


def pytest_configure(config):
    config.stash[_ACCEPTANCE_KEY] = []


@pytest.fixture
def acceptance(request):
    """Call with (criterion, passed, detail); the line is echoed in the terminal summary."""
    lines = request.config.stash[_ACCEPTANCE_KEY]

    def record(criterion, status, detail):
        if not isinstance(status, str):
            status = "PASS" if status else "FAIL"
        lines.append((criterion, status, detail))

    return record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = config.stash.get(_ACCEPTANCE_KEY, [])
    if not lines:
        return
    terminalreporter.section("acceptance criteria")
    for criterion, status, detail in sorted(lines, key=lambda x: x[0]):
        terminalreporter.write_line(f"{status:4s}  C{criterion:<2d} {detail}")


@pytest.fixture(scope="session")
def speech_fixtures():
    return [speech_like(seed) for seed in range(20)]


@pytest.fixture(scope="session")
def rng():
    return np.random.default_rng(12345)
