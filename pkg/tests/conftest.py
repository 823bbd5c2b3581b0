import os
import sys

import numpy as np
import pytest

sys.path.insert(0, os.path.dirname(__file__))

from thermophase import Grid, Params  # noqa: E402


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture
def params():
    return Params()


@pytest.fixture
def g8():
    return Grid(8, 8)


def smooth_field(g, rng, max_mode=2, scale=1.0):
    """Random real trigonometric polynomial with wave indices |m| <= max_mode."""
    x, y = g.coords()
    f = np.zeros(g.shape)
    for mx in range(max_mode + 1):
        for my in range(-max_mode, max_mode + 1):
            a, b = rng.normal(size=2) * scale
            arg = 2 * np.pi * (mx * x / g.lx + my * y / g.ly)
            f += a * np.cos(arg) + b * np.sin(arg)
    return f


ACCEPTANCE_LINES = {}


@pytest.fixture
def verdict():
    """Record one PASS/FAIL line per acceptance criterion, then assert it."""
    def record(number, ok, detail):
        line = f"CRITERION {number}: {'PASS' if ok else 'FAIL'}  {detail}"
        ACCEPTANCE_LINES[number] = line
        print(line)
        assert ok, line
    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for number in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(ACCEPTANCE_LINES[number])
