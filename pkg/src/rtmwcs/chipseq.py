"""Pseudorandom +-1 chip sequences and the measurement matrix they induce."""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .signalgen import GridConfig


@dataclass(frozen=True)
class ChipSet:
    """``M`` chip words of length ``L``; row ``m`` drives acquisition ``m``.

    Chip ``k`` of a row is held constant on ``[kT, (k+1)T)``, so one period
    of the modulating waveform lasts ``L * T = T_p``.
    """

    grid: GridConfig
    chips: np.ndarray
    seed: int | None = None

    def __post_init__(self):
        c = np.asarray(self.chips)
        if c.ndim != 2 or c.shape[1] != self.grid.L:
            raise ValueError(f"chips must have shape (M, {self.grid.L}), got {c.shape}")
        if not np.all(np.abs(c) == 1):
            raise ValueError("chip entries must be exactly +1 or -1")

    @property
    def M(self) -> int:
        return self.chips.shape[0]

    def subset(self, m: int) -> "ChipSet":
        """The first ``m`` rows, keeping the seed for bookkeeping."""
        return ChipSet(self.grid, self.chips[:m], self.seed)


def generate_chips(grid: GridConfig, M: int, seed: int) -> ChipSet:
    """Draw ``M`` i.i.d. symmetric Bernoulli rows."""
    if M < 1:
        raise ValueError(f"M must be at least 1, got {M}")
    rng = np.random.default_rng(seed)
    chips = 1 - 2 * rng.integers(0, 2, size=(M, grid.L))
    return ChipSet(grid, chips.astype(np.int8), seed)


def fourier_coeffs(chips_row, l_range=None) -> np.ndarray:
    """Fourier-series coefficients ``c_l`` of the piecewise-constant chip waveform.

    Integrating chip by chip over one period gives

        c_l = (1/L) sum_k alpha_k exp(-j 2 pi l k / L) * (1 - exp(-j 2 pi l / L)) / (j 2 pi l / L)

    where the last factor is ``exp(-j pi l / L) sinc(l / L)`` and equals 1 at
    ``l = 0``.  ``l_range`` defaults to ``-L0 .. L0``; the result is ordered
    the same way as ``l_range``.
    """
    a = np.asarray(chips_row, dtype=float)
    L = a.shape[-1]
    if l_range is None:
        L0 = (L - 1) // 2
        l_range = np.arange(-L0, L0 + 1)
    l = np.asarray(l_range)
    k = np.arange(L)
    d = a @ np.exp(-2j * np.pi * np.outer(k, l) / L) / L
    shape = np.exp(-1j * np.pi * l / L) * np.sinc(l / L)
    return d * shape


def build_phi(chipset: ChipSet) -> np.ndarray:
    """``M x L`` matrix with ``Phi[m, i-1] = c_{m, L0+1-i}``.

    Column ``i`` multiplies slice ``i`` (the slice centered at
    ``(i - L0 - 1) f_p``), which reaches baseband through the coefficient at
    the opposite shift; hence the reversed coefficient order.
    """
    L0 = chipset.grid.L0
    l_range = np.arange(L0, -L0 - 1, -1)
    return fourier_coeffs(chipset.chips, l_range)


def save_chips(chipset: ChipSet, path) -> None:
    """Write one row per line, entries ``1``/``-1`` separated by spaces."""
    np.savetxt(Path(path), chipset.chips, fmt="%d")


def load_chips(path, grid: GridConfig) -> ChipSet:
    rows = np.loadtxt(Path(path), dtype=int, ndmin=2)
    return ChipSet(grid, rows.astype(np.int8))
