import math

import numpy as np
import pytest

from rtmwcs.acquisition import acquire_run
from rtmwcs.chipseq import build_phi, generate_chips
from rtmwcs.mwc import acquire_mwc, recommended_channels
from rtmwcs.recovery import reconstruct
from rtmwcs.signalgen import add_awgn, generate_multiband

from conftest import centered_bands


class TestChannelCount:
    @pytest.mark.parametrize("K,L,expected", [(3, 197, 68), (1, 4 * math.e, 8), (2, 195, 52)])
    def test_values(self, K, L, expected):
        # 8*3*ln(197/12) = 67.2, 8*ln(e) = 8, 16*ln(195/8) = 51.1
        assert recommended_channels(K, L) == expected

    def test_small_L_rejected(self):
        with pytest.raises(ValueError):
            recommended_channels(3, 12)


def test_all_channels_sample_at_trigger(small_grid):
    g = small_grid
    sig = generate_multiband(g, centered_bands(g, [300e6]))
    run = acquire_mwc(sig, generate_chips(g, 5, 0))
    assert [a.tau for a in run.acqs] == [0] * 5
    assert [a.dt for a in run.acqs] == [0.0] * 5


def test_rt_with_zero_offsets_is_mwc(desk_grid):
    g = desk_grid
    sig = add_awgn(generate_multiband(g, centered_bands(g, [315e6, 702e6, 1033e6])), 20, 1)
    cs = generate_chips(g, 14, 2)
    phi = build_phi(cs)
    rt = reconstruct(acquire_run(sig, cs, 9, offsets=np.zeros(14)), phi, g, reference=sig.samples)
    mw = reconstruct(acquire_mwc(sig, cs).acqs, phi, g, reference=sig.samples)
    assert rt.support.indices == mw.support.indices
    assert np.max(np.abs(rt.S_hat - mw.S_hat)) <= 1e-12 * np.abs(mw.S_hat).max()
