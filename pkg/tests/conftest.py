import numpy as np
import pytest

from rtmwcs import BandSpec, GridConfig


@pytest.fixture
def small_grid():
    return GridConfig(2.5e9, 17, 63)


@pytest.fixture
def desk_grid():
    return GridConfig(2.5e9, 197, 511)


def centered_bands(grid, carriers, bandwidth=10e6, energies=None, spread=0.0):
    """Bands with peaks near the middle of the record, one per carrier."""
    energies = energies or [1.0 + i for i in range(len(carriers))]
    mid = grid.duration / 2
    return [
        BandSpec(e, bandwidth, mid + spread * (i - 1), f)
        for i, (e, f) in enumerate(zip(energies, carriers))
    ]


def contained_carriers(grid, K, rng, bandwidth=10e6):
    """``K`` carriers whose bands sit wholly inside distinct positive slices."""
    centers = grid.slice_centers()
    half = grid.f_p / 2 - bandwidth / 2
    pos = np.flatnonzero((centers - half > bandwidth / 2) & (centers + half < (grid.f_nyq - bandwidth) / 2))
    picks = rng.choice(pos, size=K, replace=False)
    return [float(centers[i] + rng.uniform(-half, half) * 0.9) for i in picks]


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
