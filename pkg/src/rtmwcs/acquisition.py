"""One RT-MWCS acquisition run: modulate, lowpass, sample at a random offset.

The modulating waveform is the zero-order-hold chip sequence in continuous
time, not its Nyquist-grid samples.  The product ``x(t) p(t)`` is therefore
not representable on the grid; its in-band spectrum is obtained by
integrating the product chip by chip with Gauss-Legendre quadrature on the
bandlimited interpolant of ``x``.  With the default 8 nodes the quadrature
error is around 1e-10 relative.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import fft as sfft

from .chipseq import ChipSet
from .signalgen import GridConfig, MultibandSignal

GAUSS_NODES = 8


@dataclass(frozen=True)
class Acquisition:
    m: int
    samples: np.ndarray
    dt: float
    tau: int
    chips_row: np.ndarray


def ideal_lowpass(x, cutoff: float, sample_rate: float, gain: float = 1.0) -> np.ndarray:
    """Brick-wall FFT filter keeping every bin with ``|f| <= cutoff``."""
    x = np.asarray(x)
    if not 0 < cutoff <= sample_rate / 2 * (1 + 1e-12):
        raise ValueError(f"cutoff must lie in (0, {sample_rate / 2}], got {cutoff}")
    n = x.shape[-1]
    f = np.fft.fftfreq(n, d=1.0 / sample_rate)
    keep = np.abs(f) <= cutoff * (1 + 1e-12)
    X = np.fft.fft(x) * keep * gain
    y = np.fft.ifft(X)
    return y.real if np.isrealobj(x) else y


def quantize_offset(dt: float, grid: GridConfig) -> int:
    """TDC reading ``ceil(dt * f_nyq)``, clamped to ``L - 1``.

    Products that land within 1e-9 of an integer are snapped first, so that
    e.g. ``dt = 2 T`` reads 2 and not 3.
    """
    if not 0 <= dt < grid.T_s:
        raise ValueError(f"dt = {dt} outside [0, T_s = {grid.T_s})")
    ticks = dt * grid.f_nyq
    near = round(ticks)
    if abs(ticks - near) < 1e-9:
        ticks = float(near)
    return min(int(math.ceil(ticks)), grid.L - 1)


class _Modulator:
    """Per-signal precomputation shared by every chip row.

    For node ``u`` and chip position ``r`` the samples ``x((r + kL + u) T)``
    are transformed once; the in-band spectrum of ``x(t) p(t)`` is then a
    linear combination of the ``L`` chip-position spectra weighted by the
    chip signs.
    """

    def __init__(self, samples, grid: GridConfig, n_nodes: int = GAUSS_NODES):
        self.grid = grid
        u, w = np.polynomial.legendre.leggauss(n_nodes)
        u, w = (u + 1) / 2, w / 2
        N, L, P = grid.N, grid.L, grid.P
        X = sfft.rfft(np.asarray(samples, dtype=float))
        ramps = np.exp(2j * np.pi * np.outer(u, np.arange(X.shape[0])) / N)
        # x((n + u) T) for each node, by bandlimited (trigonometric) interpolation
        shifted = sfft.irfft(X[None, :] * ramps, n=N, axis=-1)
        h = (P - 1) // 2
        b = np.arange(h + 1)
        r = np.arange(L)
        # chip r of period k covers Nyquist sample r + kL
        per_chip = sfft.fft(shifted.reshape(n_nodes, P, L), axis=1)[:, : h + 1, :]
        phase = np.exp(-2j * np.pi * (np.outer(r, b)[None] + u[:, None, None] * b[None, None, :]) / N)
        self.H = np.einsum("j,jbr,jrb->rb", w, per_chip, phase)

    def baseband(self, chips_row) -> np.ndarray:
        """In-band spectrum of ``x(t) p(t)`` on the ascending baseband bins."""
        pos = np.asarray(chips_row, dtype=float) @ self.H
        # real product: negative bins are conjugates of the positive ones
        return np.concatenate([np.conj(pos[:0:-1]), pos])


def sample_baseband(W, grid: GridConfig, offset_ticks: float) -> np.ndarray:
    """Samples at ``t = (offset + k L) T`` of the lowpass signal with in-band spectrum ``W``."""
    bins = grid.baseband_bins()
    A = W * np.exp(2j * np.pi * bins * offset_ticks / grid.N)
    y = np.fft.ifft(np.fft.ifftshift(A)) / grid.L
    return y.real


def acquire(
    sig: MultibandSignal,
    chips_row,
    dt: float,
    *,
    m: int = 0,
    misaligned: bool = False,
    tau_jitter: int = 0,
    rng: np.random.Generator | None = None,
    _modulator: _Modulator | None = None,
) -> Acquisition:
    """Simulate one triggered acquisition.

    The trigger is sample 0 of the record.  The ADC samples the filtered,
    modulated signal at ``(tau + k L) T``; with ``misaligned=True`` it samples
    at the true ``dt + k T_s`` instead while still reporting ``tau``.
    ``tau_jitter = j`` perturbs the reported ``tau`` by a uniform integer in
    ``[-j, j]`` (clipped to ``0 .. L-1``), modelling TDC uncertainty.
    """
    grid = sig.grid
    tau = quantize_offset(dt, grid)
    mod = _modulator if _modulator is not None else _Modulator(sig.samples, grid)
    W = mod.baseband(chips_row)
    offset = dt * grid.f_nyq if misaligned else float(tau)
    y = sample_baseband(W, grid, offset)
    if tau_jitter:
        rng = rng if rng is not None else np.random.default_rng()
        tau = int(np.clip(tau + rng.integers(-tau_jitter, tau_jitter + 1), 0, grid.L - 1))
    return Acquisition(m, y, float(dt), tau, np.asarray(chips_row).copy())


def draw_offsets(grid: GridConfig, M: int, seed: int) -> np.ndarray:
    """``M`` offsets uniform on ``[0, T_s)``, redrawing any whose TDC reading would be ``L``."""
    rng = np.random.default_rng(seed)
    out = np.empty(M)
    for i in range(M):
        while True:
            dt = rng.uniform(0.0, grid.T_s)
            if math.ceil(dt * grid.f_nyq) <= grid.L - 1:
                break
        out[i] = dt
    return out


def acquire_run(
    sig: MultibandSignal,
    chipset: ChipSet,
    seed: int,
    *,
    offsets=None,
    misaligned: bool = False,
    tau_jitter: int = 0,
) -> list[Acquisition]:
    """``chipset.M`` independent acquisitions of the same triggered signal.

    Offsets are drawn from ``seed`` unless given explicitly (e.g. all zero).
    """
    if chipset.M < 1:
        raise ValueError("chipset has no rows")
    if offsets is None:
        offsets = draw_offsets(sig.grid, chipset.M, seed)
    offsets = np.asarray(offsets, dtype=float)
    if offsets.shape != (chipset.M,):
        raise ValueError(f"need {chipset.M} offsets, got {offsets.shape}")
    mod = _Modulator(sig.samples, sig.grid)
    jitter_rng = np.random.default_rng([seed, 1]) if tau_jitter else None
    return [
        acquire(
            sig,
            chipset.chips[m],
            offsets[m],
            m=m,
            misaligned=misaligned,
            tau_jitter=tau_jitter,
            rng=jitter_rng,
            _modulator=mod,
        )
        for m in range(chipset.M)
    ]
