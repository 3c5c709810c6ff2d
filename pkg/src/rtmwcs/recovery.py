"""Blind reconstruction from a set of acquisitions.

Pipeline: per-bin measurement vectors ``z(f)`` -> covariance ``R`` -> joint
support by simultaneous OMP on an eigen-frame of ``R`` -> least squares on
the support -> slice reassembly and inverse FFT.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .acquisition import Acquisition, ideal_lowpass
from .signalgen import GridConfig, slice_bin_indices, snr_db


@dataclass(frozen=True)
class SpectralSystem:
    """``Z[m, j] = z_m(f_j)`` on the ascending baseband bins ``f_j``."""

    Z: np.ndarray
    Phi: np.ndarray
    grid: GridConfig


@dataclass(frozen=True)
class SupportSet:
    indices: tuple[int, ...]
    symmetric: bool = True

    def __len__(self):
        return len(self.indices)

    def __iter__(self):
        return iter(self.indices)

    def as_set(self) -> set[int]:
        return set(self.indices)


@dataclass(frozen=True)
class RecoveryResult:
    support: SupportSet
    S_hat: np.ndarray
    x_hat: np.ndarray
    residual_norm: float
    output_snr_db: float | None = None


def build_spectral_system(
    acqs: Sequence[Acquisition], phi: np.ndarray, grid: GridConfig
) -> SpectralSystem:
    """FFT each acquisition and undo its trigger offset with ``exp(-j 2 pi f tau T)``."""
    if len(acqs) == 0:
        raise ValueError("no acquisitions to build a system from")
    if phi.shape[0] != len(acqs) or phi.shape[1] != grid.L:
        raise ValueError(f"Phi has shape {phi.shape}, expected ({len(acqs)}, {grid.L})")
    for a in acqs:
        if a.samples.shape != (grid.P,):
            raise ValueError(
                f"acquisition {a.m} has {a.samples.shape[0]} samples, expected {grid.P}"
            )
    Y = np.fft.fftshift(np.fft.fft(np.stack([a.samples for a in acqs]), axis=1), axes=1)
    taus = np.array([a.tau for a in acqs])
    bins = grid.baseband_bins()
    Z = Y * np.exp(-2j * np.pi * np.outer(taus, bins) / grid.N)
    return SpectralSystem(Z, phi, grid)


def align_upsample(acq: Acquisition, grid: GridConfig) -> np.ndarray:
    """Time-domain route to ``z_m[n]``: zero-stuff by ``L``, lowpass with gain ``L``, delay by ``tau``."""
    up = np.zeros(grid.N)
    up[:: grid.L] = acq.samples
    y = ideal_lowpass(up, grid.f_s / 2, grid.f_nyq, gain=grid.L)
    return np.roll(y, acq.tau)


def covariance(sys: SpectralSystem) -> np.ndarray:
    """``R = sum_j z(f_j) z(f_j)^H``."""
    Z = sys.Z
    return Z @ Z.conj().T


def covariance_time(acqs: Sequence[Acquisition], grid: GridConfig) -> np.ndarray:
    """Gram matrix of the aligned, upsampled sequences, scaled to match :func:`covariance`.

    By Parseval, ``sum_n z_i[n] z_k[n]^* = (L^2 / N) sum_j z_i(f_j) z_k(f_j)^*``.
    """
    z = np.stack([align_upsample(a, grid) for a in acqs])
    return (z @ z.conj().T) * grid.N / grid.L**2


def somp_support(
    R: np.ndarray,
    phi: np.ndarray,
    max_bands: int,
    residual_tol: float = 1e-3,
    *,
    symmetric: bool = True,
    eig_tol: float = 1e-6,
    noise_factor: float = 3.0,
    whiten: bool = True,
    rank_aware: bool = True,
) -> SupportSet:
    """Joint support of the slice spectra by simultaneous OMP.

    The frame ``V = Q_r Lambda_r^(1/2)`` keeps the eigenpairs of ``R`` with
    ``lambda >= max(eig_tol * lambda_max, noise_factor * lambda_min)``; the
    second term rejects the noise floor when ``M`` exceeds the signal rank.
    With ``whiten`` both ``R`` and ``Phi`` are first premultiplied by
    ``(Phi Phi^H)^(-1/2)``, which turns noise that is white on the Nyquist
    grid into white noise across the ``M`` measurements.  Each step adds the column (or the
    conjugate pair ``i, L+1-i`` in symmetric mode) with the largest
    aggregate correlation with the residual ``(I - P_S) V``; ties go to the
    lower index.  Stops once ``|res|_F <= residual_tol |V|_F`` or when the
    next selection would exceed ``max_bands``.

    With ``rank_aware`` the residual is replaced by an orthonormal basis of
    its range (directions with singular value below ``sqrt(eig_tol
    lambda_max)`` dropped) and each candidate column is first projected off the selected
    ones and renormalized.  Plain SOMP (``rank_aware=False``) scores
    ``|phi_i^H res|^2 / |phi_i|^2`` instead.
    """
    M, L = phi.shape
    if max_bands > M:
        raise ValueError(
            f"max_bands = {max_bands} exceeds M = {M}; least squares would be underdetermined"
        )
    R = (R + R.conj().T) / 2
    if whiten:
        g_lam, g_vec = np.linalg.eigh(phi @ phi.conj().T)
        if g_lam[0] > 1e-12 * g_lam[-1]:
            Wh = (g_vec / np.sqrt(g_lam)) @ g_vec.conj().T
            R = Wh @ R @ Wh
            R = (R + R.conj().T) / 2
            phi = Wh @ phi
    lam, Q = np.linalg.eigh(R)
    if lam[-1] <= 0:
        return SupportSet((), symmetric)
    cut = max(eig_tol * lam[-1], noise_factor * max(lam[0], 0.0))
    keep = lam >= cut
    V = Q[:, keep] * np.sqrt(lam[keep])
    v_norm = np.linalg.norm(V)
    # residual directions weaker than the frame cutoff carry no support information
    floor = np.sqrt(cut)

    idx = np.arange(1, L + 1)
    mirror = L + 1 - idx
    chosen: list[int] = []
    basis = np.zeros((M, 0), dtype=complex)
    res = V
    while np.linalg.norm(res) > residual_tol * v_norm:
        cols = phi - basis @ (basis.conj().T @ phi) if rank_aware else phi
        norms = np.sum(np.abs(cols) ** 2, axis=0)
        live = norms > 1e-12 * np.max(np.sum(np.abs(phi) ** 2, axis=0))
        if rank_aware:
            u, sv, _ = np.linalg.svd(res, full_matrices=False)
            target = u[:, sv >= floor]
            if target.shape[1] == 0:
                break
        else:
            target = res
        score = np.zeros(L)
        score[live] = np.sum(np.abs(cols[:, live].conj().T @ target) ** 2, axis=1) / norms[live]
        taken = np.zeros(L, dtype=bool)
        taken[[i - 1 for i in chosen]] = True
        if symmetric:
            score = score + np.where(mirror == idx, 0.0, score[mirror - 1])
        score[taken | ~live] = -1.0
        best = int(np.argmax(score)) + 1
        if score[best - 1] < 0:
            break
        new = sorted({best, L + 1 - best}) if symmetric else [best]
        if len(chosen) + len(new) > max_bands:
            break
        chosen.extend(new)
        A = phi[:, [i - 1 for i in chosen]]
        basis, _ = np.linalg.qr(A)
        res = V - basis @ (basis.conj().T @ V)
    return SupportSet(tuple(sorted(chosen)), symmetric)


def recover_slices(sys: SpectralSystem, support) -> np.ndarray:
    """Per-bin least squares ``s_S = pinv(Phi_S) z`` with zeros off the support."""
    grid = sys.grid
    S = np.zeros((grid.L, grid.P), dtype=complex)
    idx = sorted(support)
    if not idx:
        return S
    if len(idx) > sys.Phi.shape[0]:
        raise ValueError(f"support of size {len(idx)} exceeds M = {sys.Phi.shape[0]}")
    A = sys.Phi[:, [i - 1 for i in idx]]
    if np.linalg.matrix_rank(A) < len(idx):
        raise np.linalg.LinAlgError(f"Phi restricted to support {idx} is rank deficient")
    coef, *_ = np.linalg.lstsq(A, sys.Z, rcond=None)
    S[[i - 1 for i in idx]] = coef
    return S


def reconstruct_time(S_hat: np.ndarray, grid: GridConfig) -> np.ndarray:
    """Put slice ``l`` back at ``(l - L0 - 1) f_p`` and inverse-FFT to a real record."""
    if S_hat.shape != (grid.L, grid.P):
        raise ValueError(f"S_hat has shape {S_hat.shape}, expected ({grid.L}, {grid.P})")
    X = np.zeros(grid.N, dtype=complex)
    X[slice_bin_indices(grid)] = S_hat * grid.L
    X = (X + np.conj(np.roll(X[::-1], 1))) / 2
    return np.fft.ifft(X).real


def reconstruct(
    acqs: Sequence[Acquisition],
    phi: np.ndarray,
    grid: GridConfig,
    max_bands: int | None = None,
    residual_tol: float = 1e-3,
    reference=None,
    *,
    symmetric: bool = True,
    eig_tol: float = 1e-6,
    noise_factor: float = 3.0,
    edge_margin: float = 0.05,
) -> RecoveryResult:
    """Run the whole recovery; ``max_bands`` defaults to ``M - 2`` (at least 1)."""
    if len(acqs) == 0:
        raise ValueError("no acquisitions to reconstruct from")
    sys = build_spectral_system(acqs, phi, grid)
    M = len(acqs)
    if max_bands is None:
        max_bands = max(1, M - 2)
    support = somp_support(
        covariance(sys),
        phi,
        min(max_bands, M),
        residual_tol,
        symmetric=symmetric,
        eig_tol=eig_tol,
        noise_factor=noise_factor,
    )
    S_hat = recover_slices(sys, support)
    x_hat = reconstruct_time(S_hat, grid)
    z_norm = np.linalg.norm(sys.Z)
    resid = np.linalg.norm(sys.Z - phi @ S_hat)
    resid = float(resid / z_norm) if z_norm > 0 else 0.0
    out_snr = None if reference is None else snr_db(reference, x_hat, edge_margin)
    return RecoveryResult(support, S_hat, x_hat, resid, out_snr)
