import os
import sys

import pytest
from hypothesis import settings

sys.path.insert(0, os.path.dirname(__file__))

settings.register_profile("repo", deadline=None, max_examples=100)
settings.load_profile("repo")

ACCEPTANCE_LINES: list[str] = []


def pytest_collection_modifyitems(config, items):
    if os.environ.get("JIMMLAB_HEAVY") == "1":
        return
    skip = pytest.mark.skip(reason="full-scale run; set JIMMLAB_HEAVY=1")
    for item in items:
        if "heavy" in item.keywords:
            item.add_marker(skip)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split("criterion")[1].split(":")[0])):
            terminalreporter.write_line(line)
