from __future__ import annotations

import sys
from pathlib import Path

import pytest

TESTS_DIR = Path(__file__).parent
FIXTURES = TESTS_DIR / "fixtures"
sys.path.insert(0, str(TESTS_DIR))

from cgrl.cli import analyze  # noqa: E402


def fixture_source(name: str) -> str:
    return (FIXTURES / name).read_text()


def run_fixture(name: str, variant: str = "optimistic", **kw):
    return analyze(fixture_source(name), Path(name).stem, variant=variant,
                   **kw)


def run_source(source: str, unit: str = "test",
               variant: str = "optimistic", **kw):
    return analyze(source, unit, variant=variant, **kw)


@pytest.fixture
def fixtures_dir() -> Path:
    return FIXTURES
