from __future__ import annotations

import contextlib
import time

import pytest

from ramsey_books.coloring import EdgeColoring, generate


def c5_coloring() -> EdgeColoring:
    """K_5 with a red pentagon and a blue pentagram."""
    red = [0] * 5
    for i in range(5):
        j = (i + 1) % 5
        red[i] |= 1 << j
        red[j] |= 1 << i
    return EdgeColoring(5, tuple(red))


@pytest.fixture
def c5() -> EdgeColoring:
    return c5_coloring()


@pytest.fixture
def random_coloring():
    def make(n: int, seed: int = 0, p_red: float = 0.5) -> EdgeColoring:
        return generate(n, "random", p_red=p_red, seed=seed)

    return make


# acceptance criteria ---------------------------------------------------------

_ACCEPTANCE_LINES: list[str] = []


class CriterionRecorder:
    """Times a block, records one PASS/FAIL line and re-raises any failure."""

    def __init__(self, lines: list[str]):
        self.lines = lines

    @contextlib.contextmanager
    def __call__(self, name: str, limit: "float | None" = None):
        info: dict = {"detail": ""}
        start = time.perf_counter()
        try:
            yield info
        except BaseException as exc:
            elapsed = time.perf_counter() - start
            msg = str(exc).splitlines()[0] if str(exc) else type(exc).__name__
            self.lines.append(f"FAIL {name}: {msg} ({elapsed:.1f}s)")
            raise
        elapsed = time.perf_counter() - start
        if limit is not None and elapsed >= limit:
            self.lines.append(f"FAIL {name}: runtime {elapsed:.1f}s exceeds {limit:g}s")
            raise AssertionError(f"{name} took {elapsed:.1f}s, limit {limit:g}s")
        detail = f": {info['detail']}" if info["detail"] else ""
        self.lines.append(f"PASS {name}{detail} ({elapsed:.1f}s)")


@pytest.fixture
def criterion() -> CriterionRecorder:
    return CriterionRecorder(_ACCEPTANCE_LINES)


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in _ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
