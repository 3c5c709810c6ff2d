"""Multi-channel MWC baseline built from the same pieces as RT-MWCS.

An MWC channel bank is M synchronous copies of the RT-MWCS front end, all
sampling one shot of the signal with zero offset.  Reusing
:func:`~rtmwcs.acquisition.acquire_run` with zero offsets keeps the two
schemes identical except for the trigger-offset mechanism.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .acquisition import Acquisition, acquire_run
from .chipseq import ChipSet
from .signalgen import MultibandSignal


@dataclass(frozen=True)
class MwcRun:
    acqs: list[Acquisition]
    chipset: ChipSet


def acquire_mwc(sig: MultibandSignal, chipset: ChipSet) -> MwcRun:
    if chipset.M < 1:
        raise ValueError("chipset has no rows")
    acqs = acquire_run(sig, chipset, seed=0, offsets=np.zeros(chipset.M))
    return MwcRun(acqs, chipset)


def recommended_channels(K: int, L: float) -> int:
    """``ceil(8 K ln(L / 4K))`` channels for stable MWC support recovery (natural log)."""
    if L <= 4 * K:
        raise ValueError(f"need L > 4K, got L = {L}, K = {K}")
    return math.ceil(8 * K * math.log(L / (4 * K)))
