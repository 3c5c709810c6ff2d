"""Acceptance criteria, one test each.

Every test records a ``criterion N: PASS|FAIL`` line, shown in the pytest
terminal summary and printed directly when the file is run as a script.
"""

import math
from dataclasses import replace

import numpy as np
import pytest

from rtmwcs.acquisition import acquire_run, draw_offsets
from rtmwcs.chipseq import build_phi, fourier_coeffs, generate_chips
from rtmwcs.harness import (
    ExperimentConfig,
    draw_bands,
    run_m_sweep,
    run_noise_sweep,
    run_sparsity_sweep,
    write_sweep,
)
from rtmwcs.mwc import acquire_mwc
from rtmwcs.recovery import build_spectral_system, covariance, covariance_time, reconstruct
from rtmwcs.signalgen import BandSpec, GridConfig, add_awgn, generate_multiband, slice_decomposition

from conftest import ACCEPTANCE_LINES, contained_carriers

DESK = ExperimentConfig.from_profile("desk")


def verdict(n, ok, detail):
    line = f"criterion {n}: {'PASS' if ok else 'FAIL'}  {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    assert ok, line


def steps(means):
    v = [means[k] for k in sorted(means)]
    return np.diff(v)


def test_c1_aliasing_identity():
    g = GridConfig(2.5e9, 17, 63)
    rng = np.random.default_rng(101)
    worst = 0.0
    for trial in range(50):
        K = int(rng.integers(1, 3))
        carriers = contained_carriers(g, K, rng)
        mid = g.duration / 2
        bands = [BandSpec(rng.uniform(1, 10), 10e6, mid + rng.uniform(-0.1, 0.1) * mid, f) for f in carriers]
        sig = generate_multiband(g, bands)
        cs = generate_chips(g, 10, trial)
        sys = build_spectral_system(acquire_run(sig, cs, trial), build_phi(cs), g)
        S = slice_decomposition(sig.samples, g)
        worst = max(worst, np.linalg.norm(sys.Z - sys.Phi @ S) / np.linalg.norm(sys.Z))
    verdict(1, worst <= 1e-6, f"max |Z - Phi S|/|Z| = {worst:.2e} over 50 trials (limit 1e-6)")


def _quadrature(row, ls, nodes=16):
    # Gauss-Legendre on each chip of (1/T_p) int p(t) exp(-j 2 pi l t / T_p) dt, T_p = 1
    L = len(row)
    u, w = np.polynomial.legendre.leggauss(nodes)
    t = ((np.arange(L)[:, None] + (u[None, :] + 1) / 2) / L).ravel()
    wt = np.tile(w / 2, L) / L
    p = np.repeat(np.asarray(row, float), nodes)
    return np.exp(-2j * np.pi * np.outer(ls, t)) @ (wt * p)


def test_c2_fourier_coefficients():
    rng = np.random.default_rng(102)
    worst = 0.0
    for L in (5, 17, 197):
        ls = np.arange(-(L - 1) // 2, (L - 1) // 2 + 1)
        for _ in range(20):
            row = 1 - 2 * rng.integers(0, 2, L)
            worst = max(worst, np.max(np.abs(fourier_coeffs(row, ls) - _quadrature(row, ls))))
    verdict(2, worst <= 1e-9, f"max |c - quadrature| = {worst:.2e}, L in 5/17/197, 20 rows each (limit 1e-9)")


def test_c3_parseval_covariance():
    rng = np.random.default_rng(103)
    worst = 0.0
    for trial in range(20):
        g = GridConfig(2.5e9, int(rng.choice([17, 31])), 63)
        cfg = ExperimentConfig(L=g.L, n_periods=g.P)
        sig = generate_multiband(g, draw_bands(cfg, int(rng.integers(1, 4)), rng))
        sig = add_awgn(sig, 20, trial)
        cs = generate_chips(g, int(rng.integers(4, 13)), trial)
        acqs = acquire_run(sig, cs, trial)
        R = covariance(build_spectral_system(acqs, build_phi(cs), g))
        worst = max(worst, np.linalg.norm(covariance_time(acqs, g) - R) / np.linalg.norm(R))
    verdict(3, worst <= 1e-6, f"max relative |R_time - R_freq| = {worst:.2e} over 20 systems (limit 1e-6)")


def test_c4_noiseless_exact_support():
    small = ExperimentConfig(L=31, n_periods=63, M=20, trials=100, periodic=True, seed=104)
    rates = {K: run_m_sweep(replace(small, K=K), [20]).summary[0]["exact_rate"] for K in (1, 2, 3)}
    desk = run_m_sweep(replace(DESK, K=3, seed=104), [20]).summary[0]["exact_rate"]
    ok = all(r >= 0.95 for r in rates.values()) and desk >= 0.90
    detail = ", ".join(f"L=31 K={K}: {r:.0%}" for K, r in rates.items())
    verdict(4, ok, f"{detail} (need 95%); L=197 K=3: {desk:.0%} (need 90%)")


def test_c5_snr_vs_m():
    res = run_m_sweep(DESK, list(range(10, 21)))
    m = res.means()
    low = min(v for k, v in m.items() if k >= 12)
    d = steps(m)
    ok = low >= 17 and np.all(d >= 0)
    curve = " ".join(f"{k}:{v:.1f}" for k, v in m.items())
    verdict(5, ok, f"min mean SNR for M>=12 = {low:.1f} dB (need 17), min step {d.min():+.2f} dB; {curve}")


def test_c6_snr_vs_sparsity():
    res = run_sparsity_sweep(replace(DESK, M=20))
    m = res.means()
    d = steps(m)
    drop = m[1] - m[15]
    ok = drop >= 6 and np.all(d <= 1.0)
    worst = int(np.argmax(d)) + 1
    curve = " ".join(f"{k}:{v:.1f}" for k, v in m.items())
    verdict(
        6,
        ok,
        f"K=1 minus K=15 = {drop:.1f} dB (need 6); largest rise {d.max():+.2f} dB at K={worst}->{worst + 1} "
        f"(slack 1 dB); {curve}",
    )


def test_c7_snr_vs_input_snr():
    m = run_noise_sweep(DESK).means()
    d = steps(m)
    curve = " ".join(f"{k:g}:{v:.1f}" for k, v in m.items())
    verdict(7, bool(np.all(d > -1.0)), f"min step {d.min():+.2f} dB (slack 1 dB); {curve}")


def test_c8_mwc_comparison():
    cfg = replace(DESK, misaligned=True, input_snr_db=20.0)
    res = run_m_sweep(cfg, list(range(12, 21)), include_mwc=True)
    rt, mw = res.means("rt"), res.means("mwc")
    gap = {k: mw[k] - rt[k] for k in rt}
    ok_gap = all(0 <= v <= 3 for v in gap.values())

    # same chips, signal and noise with all RT offsets at zero
    g = cfg.grid
    same = True
    for trial in range(5):
        rng = np.random.default_rng([108, trial])
        sig = add_awgn(generate_multiband(g, draw_bands(cfg, 3, rng)), 20.0, trial)
        cs = generate_chips(g, 16, trial)
        phi = build_phi(cs)
        a = reconstruct(acquire_run(sig, cs, trial, offsets=np.zeros(16)), phi, g)
        b = reconstruct(acquire_mwc(sig, cs).acqs, phi, g)
        same &= a.support.indices == b.support.indices
        same &= bool(np.max(np.abs(a.S_hat - b.S_hat)) <= 1e-12 * np.abs(b.S_hat).max())
    gaps = " ".join(f"{k}:{v:+.3f}" for k, v in gap.items())
    verdict(8, ok_gap and same, f"MWC - RT mean SNR per M in dB {gaps} (need 0..3); zero-offset RT identical to MWC: {same}")


def test_c9_three_carrier_signal():
    g = DESK.grid
    carriers = (572e6, 760e6, 964e6)
    bands = [
        BandSpec(e, 10e6, g.duration / 2 + dt, f)
        for e, dt, f in zip((4.0, 7.0, 2.5), (-2e-6, 0.0, 3e-6), carriers)
    ]
    sig = generate_multiband(g, bands)
    noisy = add_awgn(sig, 20.0, 109)
    centers = g.slice_centers()
    want = {int(np.argmin(np.abs(centers - s * f))) + 1 for f in carriers for s in (1, -1)}
    bank = generate_chips(g, 40, 109)
    offs = draw_offsets(g, 40, 109)
    out = {}
    for M in (20, 40):
        cs = bank.subset(M)
        r = reconstruct(acquire_run(noisy, cs, 109, offsets=offs[:M]), build_phi(cs), g, max_bands=6, reference=sig.samples)
        out[M] = (want <= r.support.as_set(), r.output_snr_db, r.support.indices)
    ok = out[20][0] and out[40][0] and out[40][1] >= out[20][1]
    verdict(
        9,
        ok,
        f"carrier slices {sorted(want)}; M=20 support {out[20][2]} SNR {out[20][1]:.2f} dB; "
        f"M=40 support {out[40][2]} SNR {out[40][1]:.2f} dB",
    )


def test_c10_determinism(tmp_path):
    cfg = replace(DESK, trials=3, seed=110, input_snr_db=25.0)
    identical = True
    for name, fn, values in [
        ("m", run_m_sweep, [12, 16]),
        ("sparsity", run_sparsity_sweep, [2, 5]),
        ("noise", run_noise_sweep, [15.0, 35.0]),
    ]:
        a = write_sweep(fn(cfg, values), tmp_path / "a")
        b = write_sweep(fn(cfg, values), tmp_path / "b")
        identical &= all(a[k].read_bytes() == b[k].read_bytes() for k in ("trials", "summary"))
    verdict(10, identical, "trials.csv and summary.csv byte-identical across reruns of all three sweeps")


if __name__ == "__main__":
    import sys

    sys.exit(pytest.main([__file__, "-q"]))
