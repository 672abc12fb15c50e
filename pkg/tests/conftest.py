"""Shared fixtures plus a terminal section summarizing the acceptance tests."""

import numpy as np
import pytest
from hypothesis import settings

from gptham.statespace import BUILTIN_THEORIES, builtin_theory

# numeric properties are cheap but deadline-sensitive on loaded machines
settings.register_profile("suite", deadline=None, max_examples=60)
settings.load_profile("suite")


@pytest.fixture(scope="session")
def theories():
    return {name: builtin_theory(name) for name in BUILTIN_THEORIES}


@pytest.fixture
def rng():
    return np.random.default_rng(20260814)


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    """Print one pass/fail line per acceptance criterion."""
    outcomes = {}
    for reports in terminalreporter.stats.values():
        for rep in reports:
            nodeid = getattr(rep, "nodeid", "")
            if "test_acceptance.py" not in nodeid:
                continue
            when = getattr(rep, "when", None)
            outcome = getattr(rep, "outcome", None)
            if when == "call" or (when == "setup" and outcome != "passed"):
                name = nodeid.split("::")[-1]
                if outcome != "passed":
                    outcomes[name] = "FAIL"
                else:
                    outcomes.setdefault(name, "PASS")
    if not outcomes:
        return
    terminalreporter.section("acceptance criteria")
    for name in sorted(outcomes):
        terminalreporter.write_line(f"{name}: {outcomes[name]}")
