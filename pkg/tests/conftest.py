import numpy as np
import pytest

from pupilkit.image import Frame

# one line per acceptance criterion, printed in the terminal summary
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture
def random_frame(rng):
    """64x64 frame with independent random channels."""
    luma = rng.integers(0, 256, (64, 64), dtype=np.uint8)
    satv = rng.integers(0, 256, (64, 64), dtype=np.uint8)
    return Frame(width=64, height=64, luma=luma, satv=satv)


def constant_frame(width, height, luma_value, satv_value=128):
    luma = np.full((height, width), luma_value, dtype=np.uint8)
    satv = np.full((height, width), satv_value, dtype=np.uint8)
    return Frame(width=width, height=height, luma=luma, satv=satv)
