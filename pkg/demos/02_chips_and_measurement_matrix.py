"""Chip sequences and the measurement matrix Phi.

Each acquisition mixes the signal with a +-1 chip waveform of period T_p.
Its Fourier coefficients c_l weight how much of slice l lands at baseband,
and stacking one row per acquisition gives Phi (M x L).
"""

import numpy as np

from rtmwcs import GridConfig, build_phi, fourier_coeffs, generate_chips

grid = GridConfig(2.5e9, 197, 511)
chips = generate_chips(grid, M=20, seed=1)
print("first chip word:", "".join("+" if c > 0 else "-" for c in chips.chips[0][:40]), "...")

c = fourier_coeffs(chips.chips[0])
print(f"|c_0| = {abs(c[grid.L0]):.4f} (the chip mean)")
print(f"sum |c_l|^2 over -L0..L0 = {np.sum(np.abs(c) ** 2):.4f} "
      "(the rest of the unit power sits outside the Nyquist band)")

# the zero-order hold rolls the coefficients off like sinc(l / L)
l = np.arange(-grid.L0, grid.L0 + 1)
rolloff = np.abs(np.sinc(l / grid.L))
print(f"sinc roll-off at the band edge: {rolloff[0]:.3f}")

phi = build_phi(chips)
print("Phi shape:", phi.shape, " condition number of a random 6-column block:",
      f"{np.linalg.cond(phi[:, np.random.default_rng(0).choice(grid.L, 6, replace=False)]):.2f}")
