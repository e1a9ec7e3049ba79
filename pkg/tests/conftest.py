"""Shared fixtures: session-scoped potential tables so the expensive grid
builds (about a second each) happen once for the whole run, plus the
acceptance-criteria summary printed after the run."""

import pytest

from cpqr.cache import PotentialCache
from cpqr.optics import Mirror, PerfectMirror, hydrogen, silica, silicon
from cpqr.potential import build_table

ACCEPTANCE_LINES = []


@pytest.fixture(scope="session")
def acceptance_log():
    """Accumulates one PASS/FAIL line per acceptance criterion."""
    return ACCEPTANCE_LINES


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def table_cache(tmp_path_factory):
    return PotentialCache(str(tmp_path_factory.mktemp("table-cache")))


@pytest.fixture(scope="session")
def perfect_table(table_cache):
    return build_table(Mirror(PerfectMirror()), hydrogen(), cache=table_cache)


@pytest.fixture(scope="session")
def silicon_table(table_cache):
    return build_table(Mirror(silicon()), hydrogen(), cache=table_cache)


@pytest.fixture(scope="session")
def silica_table(table_cache):
    return build_table(Mirror(silica()), hydrogen(), cache=table_cache)


@pytest.fixture(scope="session")
def bulk_thresholds(perfect_table, silicon_table, silica_table):
    """Default-ladder threshold extrapolations for the three bulk mirrors."""
    from cpqr.threshold import scattering_length

    return {
        "perfect": scattering_length(perfect_table),
        "silicon": scattering_length(silicon_table),
        "silica": scattering_length(silica_table),
    }
