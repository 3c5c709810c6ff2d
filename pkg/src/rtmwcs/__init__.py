"""Random-triggering modulated wideband compressive sampling (RT-MWCS).

One modulator/lowpass/ADC branch is triggered ``M`` times with a random
offset and a fresh chip sequence per trigger; the offsets make the ``M``
records behave like the ``M`` channels of a modulated wideband converter.
"""

from .acquisition import Acquisition, acquire, acquire_run, draw_offsets, quantize_offset
from .chipseq import ChipSet, build_phi, fourier_coeffs, generate_chips, load_chips, save_chips
from .harness import (
    ExperimentConfig,
    run_m_sweep,
    run_noise_sweep,
    run_sparsity_sweep,
    simulate,
)
from .mwc import MwcRun, acquire_mwc, recommended_channels
from .recovery import (
    RecoveryResult,
    SpectralSystem,
    SupportSet,
    build_spectral_system,
    covariance,
    reconstruct,
    somp_support,
)
from .signalgen import (
    BandSpec,
    GridConfig,
    MultibandSignal,
    add_awgn,
    generate_multiband,
    snr_db,
    true_support_slices,
)

__version__ = "0.1.0"
