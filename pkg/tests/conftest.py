"""Shared fixtures plus the acceptance summary printed after the run."""

import time

import pytest

from adaneg.pipeline import RunConfig, run_stream
from adaneg.synth import benchmark_spec, synthesize_dataset

_CRITERIA: list[tuple[str, bool, str]] = []


def record_criterion(name: str, ok: bool, detail: str) -> None:
    _CRITERIA.append((name, ok, detail))


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for name, ok, detail in _CRITERIA:
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'} {name}: {detail}")


@pytest.fixture(scope="session")
def benchmark_runs():
    """Three seeded benchmark streams scored once in mode=all.

    Every paired-trend criterion reuses these: one memory-backed run carries
    s_nl, s_ta and s_sa for all of its fusion variants. Returns (runs,
    elapsed_seconds) so the caller can check the runtime budget.
    """
    t0 = time.time()
    runs = []
    for seed in (0, 1, 2):
        dataset = synthesize_dataset(benchmark_spec(seed))
        runs.append(run_stream(dataset, RunConfig(mode="all")))
    return runs, time.time() - t0


@pytest.fixture(scope="session")
def benchmark_dataset():
    """Seed-0 benchmark stream, shared by order-sensitivity checks."""
    return synthesize_dataset(benchmark_spec(0))
