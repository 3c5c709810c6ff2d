"""Monte Carlo sweeps and the multi-channel baseline, at demo size.

Runs short versions of the three sweeps and the RT-MWCS vs MWC comparison,
writes the CSVs under ./demo-out and, if matplotlib is present, an SVG per
sweep.  The full-size runs are ``rtmwcs sweep-m`` etc. with ``--profile desk``.
"""

from dataclasses import replace
from pathlib import Path

from rtmwcs import recommended_channels
from rtmwcs.harness import (
    ExperimentConfig,
    plot_summary,
    run_m_sweep,
    run_noise_sweep,
    run_sparsity_sweep,
    write_sweep,
)

out = Path("demo-out")
cfg = ExperimentConfig.from_profile("desk", trials=4, seed=2)
print(f"an MWC would want about {recommended_channels(3, 197)} channels for K=3, L=197")

runs = [
    run_m_sweep(cfg, [10, 12, 16, 20]),
    run_sparsity_sweep(cfg, [1, 3, 6, 9]),
    run_noise_sweep(cfg, [10.0, 30.0, 50.0]),
    run_m_sweep(replace(cfg, misaligned=True, input_snr_db=20.0), [12, 16, 20], include_mwc=True),
]
for i, res in enumerate(runs):
    paths = write_sweep(res, out / f"run{i}")
    for r in res.summary:
        print(f"{res.sweep:>8}={r['value']:<5g} {r['scheme']:<3} mean SNR {r['mean_snr_db']:7.2f} dB")
    try:
        plot_summary(paths["summary"], paths["summary"].with_suffix(".svg"))
    except ImportError:
        pass
print("CSV files written to", out.resolve())
