import json

import pytest

from dova.providers import ScriptedProvider


@pytest.fixture
def provider():
    """Scripted provider with no rules; tests add what they need."""
    return ScriptedProvider()


class FixtureTree:
    """Temporary source-fixture directory with a write helper."""

    def __init__(self, root):
        self.root = root

    def __fspath__(self):
        return str(self.root)

    def __truediv__(self, other):
        return self.root / other

    def write(self, source, slug, records):
        directory = self.root / source
        directory.mkdir(parents=True, exist_ok=True)
        (directory / f"{slug}.json").write_text(json.dumps(records))


@pytest.fixture
def fixtures_dir(tmp_path):
    return FixtureTree(tmp_path)


def make_clock(start=1000.0, step=1.0):
    """Deterministic monotonic clock for tests."""
    state = {"now": start - step}

    def clock():
        state["now"] += step
        return state["now"]

    return clock
