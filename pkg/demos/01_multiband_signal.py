"""A sparse multiband test signal and how its spectrum splits into slices.

Three pulse-shaped bands of 10 MHz sit somewhere in a 2.5 GHz Nyquist band.
The spectrum is cut into L = 197 slices of width f_p = f_nyq / L; only the
slices touched by a band carry energy, and those are the recovery target.
"""

import numpy as np

from rtmwcs import BandSpec, GridConfig, generate_multiband, true_support_slices
from rtmwcs.signalgen import slice_decomposition

grid = GridConfig(f_nyq=2.5e9, L=197, n_periods=511)
print(f"grid: N = {grid.N} Nyquist samples, record {grid.duration * 1e6:.1f} us, "
      f"slice width f_p = {grid.f_p / 1e6:.2f} MHz")

mid = grid.duration / 2
bands = [
    BandSpec(energy=4.0, bandwidth=10e6, t_offset=mid - 2e-6, carrier=572e6),
    BandSpec(energy=7.0, bandwidth=10e6, t_offset=mid, carrier=760e6),
    BandSpec(energy=2.5, bandwidth=10e6, t_offset=mid + 3e-6, carrier=964e6),
]
sig = generate_multiband(grid, bands)
print(f"occupation ratio Q = {sig.occupation_q:.4f}")

support = sorted(true_support_slices(sig))
print("slices overlapping a band:", support)

# energy per slice: nearly all of it lies in the band slices
S = slice_decomposition(sig.samples, grid)
energy = np.sum(np.abs(S) ** 2, axis=1)
share = energy[[i - 1 for i in support]].sum() / energy.sum()
print(f"energy in those {len(support)} slices: {share:.4%}")

top = np.argsort(energy)[::-1][:8] + 1
print("eight strongest slices:", sorted(top.tolist()))
