import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rtmwcs.signalgen import (
    SNR_CAP_DB,
    BandSpec,
    GridConfig,
    add_awgn,
    generate_multiband,
    slice_bin_indices,
    slice_decomposition,
    snr_db,
    support_of_bands,
    true_support_slices,
)

from conftest import centered_bands


class TestGrid:
    def test_derived_rates(self, desk_grid):
        g = desk_grid
        assert g.f_s == pytest.approx(2.5e9 / 197)
        assert g.f_p == pytest.approx(g.f_s)
        assert g.N == 197 * 511
        assert g.P == 511
        assert g.duration == pytest.approx(g.N / g.f_nyq)

    @pytest.mark.parametrize("L,P", [(16, 63), (17, 64), (0, 63)])
    def test_rejects_even_or_empty(self, L, P):
        with pytest.raises(ValueError):
            GridConfig(2.5e9, L, P)

    def test_slices_tile_the_spectrum(self, small_grid):
        idx = slice_bin_indices(small_grid).ravel()
        assert np.array_equal(np.sort(idx), np.arange(small_grid.N))

    def test_slice_centers_symmetric(self, small_grid):
        c = small_grid.slice_centers()
        assert np.allclose(c, -c[::-1])
        assert c[small_grid.L0] == 0


class TestGenerate:
    def test_direct_model_energy_in_true_slices(self, desk_grid):
        # FFT energy ratio oracle: the bands' slices hold almost all the energy
        bands = centered_bands(desk_grid, [300e6, 700e6, 1000e6], spread=2e-6)
        sig = generate_multiband(desk_grid, bands)
        S = slice_decomposition(sig.samples, desk_grid)
        e = np.sum(np.abs(S) ** 2, axis=1)
        sup = [i - 1 for i in true_support_slices(sig)]
        assert e[sup].sum() / e.sum() >= 0.99

    def test_periodic_model_is_strictly_bandlimited(self, desk_grid):
        bands = centered_bands(desk_grid, [300e6, 700e6])
        sig = generate_multiband(desk_grid, bands, periodic=True)
        X = np.fft.fft(sig.samples)
        f = np.fft.fftfreq(desk_grid.N, 1 / desk_grid.f_nyq)
        inside = np.zeros(desk_grid.N, bool)
        for b in bands:
            inside |= np.abs(np.abs(f) - b.carrier) <= b.bandwidth / 2 + 1e-3
        assert np.max(np.abs(X[~inside])) <= 1e-9 * np.max(np.abs(X))

    def test_samples_are_real(self, small_grid):
        sig = generate_multiband(small_grid, centered_bands(small_grid, [400e6]))
        assert sig.samples.dtype == float
        assert sig.samples.shape == (small_grid.N,)

    def test_no_bands_gives_zero(self, small_grid):
        assert not generate_multiband(small_grid, []).samples.any()

    @pytest.mark.parametrize(
        "band",
        [
            BandSpec(1.0, 10e6, 1e-7, 2e6),  # carrier below B/2
            BandSpec(1.0, 10e6, 1e-7, 1.25e9),  # band crosses f_nyq/2
            BandSpec(1.0, 200e6, 1e-7, 500e6),  # wider than a slice
            BandSpec(1.0, 10e6, -1e-6, 500e6),  # pulse before the record
        ],
    )
    def test_invalid_bands_rejected(self, small_grid, band):
        with pytest.raises(ValueError):
            generate_multiband(small_grid, [band])

    def test_occupation_ratio_matches_bin_count(self, desk_grid):
        bands = centered_bands(desk_grid, [300e6, 700e6, 1000e6])
        sig = generate_multiband(desk_grid, bands)
        f = np.fft.rfftfreq(desk_grid.N, 1 / desk_grid.f_nyq)
        occ = np.zeros(f.size, bool)
        for b in bands:
            occ |= np.abs(f - b.carrier) < b.bandwidth / 2
        measured = occ.sum() * (f[1] - f[0]) / (desk_grid.f_nyq / 2)
        assert sig.occupation_q == pytest.approx(measured, rel=0.01)


class TestSupport:
    def test_matches_dense_frequency_scan(self, desk_grid):
        g = desk_grid
        rng = np.random.default_rng(3)
        edges = g.slice_centers() - g.f_p / 2
        for _ in range(20):
            fc = rng.uniform(5e6, 1.2e9)
            band = BandSpec(1.0, 10e6, 1e-6, fc)
            scan = np.linspace(fc - 5e6, fc + 5e6, 4001)[1:-1]
            hit = set()
            for s in (scan, -scan):
                hit.update(int(i) for i in np.searchsorted(edges, s, side="right"))
            assert support_of_bands(g, [band]) == hit

    def test_support_is_mirror_symmetric(self, desk_grid):
        sup = support_of_bands(desk_grid, centered_bands(desk_grid, [123e6, 876e6]))
        assert {desk_grid.L + 1 - i for i in sup} == sup


class TestNoise:
    def test_empirical_snr(self, desk_grid):
        sig = generate_multiband(desk_grid, centered_bands(desk_grid, [400e6]))
        noisy = add_awgn(sig, 20.0, seed=1)
        assert snr_db(sig.samples, noisy.samples, 0.0) == pytest.approx(20.0, abs=0.1)

    def test_infinite_snr_is_identity(self, small_grid):
        sig = generate_multiband(small_grid, centered_bands(small_grid, [400e6]))
        assert add_awgn(sig, math.inf, 0) is sig

    def test_zero_signal_rejected(self, small_grid):
        with pytest.raises(ValueError):
            add_awgn(generate_multiband(small_grid, []), 10.0, 0)

    def test_seeded(self, small_grid):
        sig = generate_multiband(small_grid, centered_bands(small_grid, [400e6]))
        assert np.array_equal(add_awgn(sig, 5, 7).samples, add_awgn(sig, 5, 7).samples)


class TestSnr:
    def test_exact_match_is_capped(self):
        x = np.arange(1.0, 101.0)
        assert snr_db(x, x) == SNR_CAP_DB

    def test_known_ratio(self):
        x = np.random.default_rng(0).normal(size=1000)
        assert snr_db(x, 0.9 * x, 0.0) == pytest.approx(20.0)

    def test_edge_margin_ignores_ends(self):
        x = np.ones(100)
        e = x.copy()
        e[:5] = 0
        assert snr_db(x, e, 0.05) == SNR_CAP_DB

    def test_length_mismatch(self):
        with pytest.raises(ValueError):
            snr_db(np.ones(4), np.ones(5))


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**31), st.sampled_from([3, 5, 17]), st.sampled_from([3, 7, 15]))
def test_slice_decomposition_parseval(seed, L, P):
    g = GridConfig(1e9, L, P)
    x = np.random.default_rng(seed).normal(size=g.N)
    S = slice_decomposition(x, g)
    assert np.sum(np.abs(S) ** 2) * L**2 == pytest.approx(g.N * np.sum(x**2), rel=1e-9)
