"""Sparse multiband test signals on the Nyquist grid.

Every continuous-time quantity in the package is represented by its samples
at ``t = n * T`` with ``T = 1 / f_nyq``.  The record of ``N = L * n_periods``
samples is treated as one period of a periodic signal, which is what the FFT
based filtering and slicing downstream assume.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Iterable, Sequence

import numpy as np

#: Returned by :func:`snr_db` when the estimate matches the reference exactly.
SNR_CAP_DB = 300.0


@dataclass(frozen=True)
class GridConfig:
    """Rates and sizes shared by every stage of the simulation.

    ``L`` must be odd so the slices sit symmetrically around DC, and
    ``n_periods`` must be odd so that no FFT bin of the record falls on a
    slice boundary (the slice partition of the spectrum is then exact).
    """

    f_nyq: float
    L: int
    n_periods: int

    def __post_init__(self):
        if self.f_nyq <= 0:
            raise ValueError(f"f_nyq must be positive, got {self.f_nyq}")
        if int(self.L) != self.L or self.L < 1 or self.L % 2 == 0:
            raise ValueError(f"L must be a positive odd integer, got {self.L}")
        if int(self.n_periods) != self.n_periods or self.n_periods < 1:
            raise ValueError(f"n_periods must be a positive integer, got {self.n_periods}")
        if self.n_periods % 2 == 0:
            raise ValueError(
                f"n_periods must be odd (got {self.n_periods}); an even count puts "
                "FFT bins on the slice boundaries"
            )

    @property
    def L0(self) -> int:
        return (self.L - 1) // 2

    @property
    def T(self) -> float:
        return 1.0 / self.f_nyq

    @property
    def f_s(self) -> float:
        return self.f_nyq / self.L

    @property
    def f_p(self) -> float:
        return self.f_s

    @property
    def T_s(self) -> float:
        return 1.0 / self.f_s

    @property
    def T_p(self) -> float:
        return self.T_s

    @property
    def N(self) -> int:
        return self.L * self.n_periods

    @property
    def P(self) -> int:
        """Samples per acquisition, i.e. bins per spectral slice."""
        return self.n_periods

    @property
    def duration(self) -> float:
        return self.N * self.T

    def times(self) -> np.ndarray:
        return np.arange(self.N) * self.T

    def baseband_bins(self) -> np.ndarray:
        """Signed bin indices of one slice, ascending: ``-(P-1)/2 .. (P-1)/2``."""
        h = (self.P - 1) // 2
        return np.arange(-h, h + 1)

    def baseband_freqs(self) -> np.ndarray:
        return self.baseband_bins() * (self.f_nyq / self.N)

    def slice_centers(self) -> np.ndarray:
        """Center frequency of slices ``1..L`` (array index ``l - 1``)."""
        return (np.arange(1, self.L + 1) - self.L0 - 1) * self.f_p


@dataclass(frozen=True)
class BandSpec:
    """One pair of active bands, ``+-f_i``, of width ``B`` (Hz)."""

    energy: float
    bandwidth: float
    t_offset: float
    carrier: float


@dataclass(frozen=True)
class MultibandSignal:
    grid: GridConfig
    samples: np.ndarray
    bands: tuple[BandSpec, ...] = field(default_factory=tuple)

    @property
    def occupation_q(self) -> float:
        """Occupied positive-frequency measure over the span ``[0, f_nyq/2]``."""
        if not self.bands:
            return 0.0
        occupied = sum(b.bandwidth for b in self.bands)
        return occupied / (self.grid.f_nyq / 2.0)

    @property
    def K(self) -> int:
        return len(self.bands)


def _check_band(band: BandSpec, grid: GridConfig) -> None:
    B = band.bandwidth
    if B <= 0:
        raise ValueError(f"bandwidth must be positive, got {B}")
    if B > grid.f_p * (1 + 1e-12):
        raise ValueError(f"bandwidth {B} exceeds the slice width f_p = {grid.f_p}")
    lo, hi = B / 2.0, (grid.f_nyq - B) / 2.0
    tol = 1e-12 * grid.f_nyq
    if not (lo - tol <= band.carrier <= hi + tol):
        raise ValueError(f"carrier {band.carrier} outside the legal range [{lo}, {hi}]")
    if not (0.0 <= band.t_offset <= grid.duration):
        raise ValueError(f"t_offset {band.t_offset} outside the record [0, {grid.duration}]")


def generate_multiband(
    grid: GridConfig, bands: Sequence[BandSpec], periodic: bool = False
) -> MultibandSignal:
    """Sample ``sum_i sqrt(E_i B) sinc(B (t - t_i)) cos(2 pi f_i (t - t_i))``.

    With ``periodic=False`` the formula is evaluated directly at ``t = nT``;
    the truncated sinc tails then leak a little energy outside the bands.
    With ``periodic=True`` the record holds one period of the periodized
    pulse train instead, whose DFT is exactly the sampled rectangular band
    spectrum: nothing leaks outside ``f_i +- B/2``.
    """
    bands = tuple(bands)
    for b in bands:
        _check_band(b, grid)
    if not bands:
        return MultibandSignal(grid, np.zeros(grid.N), bands)
    if periodic:
        x = _periodic_pulses(grid, bands)
    else:
        t = grid.times()
        x = np.zeros(grid.N)
        for b in bands:
            u = t - b.t_offset
            x += math.sqrt(b.energy * b.bandwidth) * np.sinc(b.bandwidth * u) * np.cos(
                2 * np.pi * b.carrier * u
            )
    return MultibandSignal(grid, x, bands)


def _periodic_pulses(grid: GridConfig, bands: Sequence[BandSpec]) -> np.ndarray:
    # DFT of the sampled periodized pulse is its Fourier transform at f_k, over T
    N = grid.N
    f = np.fft.fftfreq(N, d=grid.T)
    X = np.zeros(N, dtype=complex)
    df = grid.f_nyq / N
    for b in bands:
        amp = math.sqrt(b.energy * b.bandwidth) / b.bandwidth / 2.0
        for fc in (b.carrier, -b.carrier):
            d = np.abs(f - fc) - b.bandwidth / 2.0
            rect = np.where(d < 0, 1.0, 0.0)
            rect[np.abs(d) <= 1e-9 * df] = 0.5
            X += amp * rect * np.exp(-2j * np.pi * f * b.t_offset)
    return np.fft.ifft(X / grid.T).real


def add_awgn(
    sig: MultibandSignal, target_snr_db: float, seed: int
) -> MultibandSignal:
    """Add white Gaussian noise scaled so that the expected SNR is ``target_snr_db``."""
    if math.isinf(target_snr_db) and target_snr_db > 0:
        return sig
    power = float(np.mean(sig.samples**2))
    if power == 0:
        raise ValueError("cannot set an SNR relative to an all-zero signal")
    sigma = math.sqrt(power / 10 ** (target_snr_db / 10))
    rng = np.random.default_rng(seed)
    noise = rng.normal(0.0, sigma, size=sig.samples.shape)
    return replace(sig, samples=sig.samples + noise)


def snr_db(reference, estimate, edge_margin: float = 0.05) -> float:
    """``10 log10(|r|^2 / |r - e|^2)`` over the interior of the record.

    ``edge_margin`` is the fraction trimmed from each end.  Returns
    :data:`SNR_CAP_DB` when the two agree exactly on the interior.
    """
    r = np.asarray(reference)
    e = np.asarray(estimate)
    if r.shape != e.shape:
        raise ValueError(f"length mismatch: {r.shape} vs {e.shape}")
    if not 0 <= edge_margin <= 0.25:
        raise ValueError(f"edge_margin must lie in [0, 0.25], got {edge_margin}")
    n = r.shape[-1]
    cut = int(math.floor(edge_margin * n))
    r = r[..., cut : n - cut]
    e = e[..., cut : n - cut]
    num = float(np.sum(np.abs(r) ** 2))
    if num == 0:
        raise ValueError("reference is zero on the evaluated interval")
    den = float(np.sum(np.abs(r - e) ** 2))
    if den == 0:
        return SNR_CAP_DB
    return min(SNR_CAP_DB, 10 * math.log10(num / den))


def slice_intervals(grid: GridConfig) -> np.ndarray:
    """``(L, 2)`` array of half-open slice intervals ``[lo, hi)`` in Hz."""
    c = grid.slice_centers()
    return np.stack([c - grid.f_p / 2, c + grid.f_p / 2], axis=1)


def true_support_slices(sig: MultibandSignal) -> set[int]:
    """1-based indices of every slice that overlaps one of the ``+-f_i`` bands."""
    return support_of_bands(sig.grid, sig.bands)


def support_of_bands(grid: GridConfig, bands: Iterable[BandSpec]) -> set[int]:
    iv = slice_intervals(grid)
    out: set[int] = set()
    for b in bands:
        for fc in (b.carrier, -b.carrier):
            lo, hi = fc - b.bandwidth / 2, fc + b.bandwidth / 2
            hit = (iv[:, 0] < hi) & (iv[:, 1] > lo)
            out.update(int(i) + 1 for i in np.flatnonzero(hit))
    return out


def slice_decomposition(x, grid: GridConfig) -> np.ndarray:
    """Split the record spectrum into ``L`` slices of ``P`` bins.

    Row ``l - 1`` holds ``X(f + (l - L0 - 1) f_p)`` on the ascending baseband
    bin grid, scaled by ``1/L`` (the normalization in which the acquisition
    spectra satisfy ``Z = Phi S``).
    """
    x = np.asarray(x)
    if x.shape[-1] != grid.N:
        raise ValueError(f"expected {grid.N} samples, got {x.shape[-1]}")
    X = np.fft.fft(x)
    idx = slice_bin_indices(grid)
    return X[idx] / grid.L


def slice_bin_indices(grid: GridConfig) -> np.ndarray:
    """``(L, P)`` FFT indices of the record bins covered by each slice."""
    offs = (np.arange(1, grid.L + 1) - grid.L0 - 1) * grid.P
    return (offs[:, None] + grid.baseband_bins()[None, :]) % grid.N
