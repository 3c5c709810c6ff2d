"""Seeded Monte Carlo sweeps and single end-to-end runs.

Every trial derives its randomness from ``(master seed, trial index)`` only,
so the same trial sees the same bands, chips, offsets and noise at every
point of a sweep (common random numbers).  Sweeping ``K`` uses the first
``K`` of a fixed band draw and sweeping ``M`` uses the first ``M`` chip rows
and offsets, which keeps the curves smooth with few trials.
"""

from __future__ import annotations

import csv
import json
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, fields, replace
from pathlib import Path
from typing import Sequence

import numpy as np

from .acquisition import acquire_run, draw_offsets
from .chipseq import ChipSet, build_phi, generate_chips, load_chips, save_chips
from .mwc import acquire_mwc
from .recovery import reconstruct
from .signalgen import (
    BandSpec,
    GridConfig,
    MultibandSignal,
    add_awgn,
    generate_multiband,
    true_support_slices,
)

PROFILES = {
    "paper": dict(L=197, n_periods=511, trials=200),
    "desk": dict(L=197, n_periods=511, trials=20),
    "small": dict(L=17, n_periods=63, trials=20),
}

SWEEP_DEFAULTS = {
    "sparsity": list(range(1, 16)),
    "noise": [float(v) for v in range(10, 51, 5)],
    "m": list(range(10, 21)),
}

TRIAL_FIELDS = [
    "sweep", "value", "scheme", "trial", "master_seed", "trial_seed", "K", "M",
    "input_snr_db", "output_snr_db", "support", "n_support", "exact_support", "residual",
]
SUMMARY_FIELDS = [
    "sweep", "value", "scheme", "K", "M", "input_snr_db", "trials",
    "mean_snr_db", "std_snr_db", "exact_rate", "feasible",
]


@dataclass
class ExperimentConfig:
    f_nyq: float = 2.5e9
    L: int = 197
    n_periods: int = 511
    bandwidth: float = 10e6
    energy_range: tuple[float, float] = (1.0, 10.0)
    # width of the window, centered in the record, that holds the pulse peaks
    t_span: float = 10e-6
    K: int = 3
    M: int = 20
    input_snr_db: float = math.inf
    trials: int = 20
    seed: int = 0
    max_bands: int | None = None
    residual_tol: float = 1e-3
    eig_tol: float = 1e-6
    noise_factor: float = 3.0
    symmetric: bool = True
    misaligned: bool = False
    tau_jitter: int = 0
    periodic: bool = False
    edge_margin: float = 0.05
    chips_file: str | None = None
    workers: int = 1

    def __post_init__(self):
        if self.trials < 1:
            raise ValueError("trials must be at least 1")
        if self.K < 0 or self.M < 1:
            raise ValueError(f"need K >= 0 and M >= 1, got K={self.K}, M={self.M}")
        self.energy_range = tuple(self.energy_range)

    @property
    def grid(self) -> GridConfig:
        return GridConfig(self.f_nyq, self.L, self.n_periods)

    @classmethod
    def from_profile(cls, name: str, **overrides) -> "ExperimentConfig":
        if name not in PROFILES:
            raise ValueError(f"unknown profile {name!r}; choose from {sorted(PROFILES)}")
        return cls(**{**PROFILES[name], **overrides})

    @classmethod
    def from_file(cls, path, **overrides) -> "ExperimentConfig":
        """Load a JSON object of field values; an optional ``profile`` key is applied first."""
        data = json.loads(Path(path).read_text())
        profile = data.pop("profile", None)
        unknown = set(data) - {f.name for f in fields(cls)}
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        base = PROFILES[profile] if profile else {}
        return cls(**{**base, **data, **overrides})


@dataclass
class SweepResult:
    sweep: str
    trials: list[dict] = field(default_factory=list)
    summary: list[dict] = field(default_factory=list)
    timing: list[dict] = field(default_factory=list)

    def means(self, scheme: str = "rt") -> dict:
        return {r["value"]: r["mean_snr_db"] for r in self.summary if r["scheme"] == scheme}


def trial_seed(master: int, trial: int) -> int:
    return int(np.random.SeedSequence([master, trial]).generate_state(1)[0])


def draw_bands(cfg: ExperimentConfig, K: int, rng: np.random.Generator) -> list[BandSpec]:
    """``K`` disjoint bands with carriers at least ``2B`` apart.

    Pulse peaks fall uniformly in a window of width ``t_span`` centered in
    the record, shrunk to half the record when the record is short.
    """
    g = cfg.grid
    B = cfg.bandwidth
    half = min(cfg.t_span, g.duration / 2) / 2
    lo, hi = B / 2, (g.f_nyq - B) / 2
    bands: list[BandSpec] = []
    attempts = 0
    while len(bands) < K:
        attempts += 1
        if attempts > 10000 * max(K, 1):
            raise RuntimeError(f"could not place {K} disjoint bands of width {B}")
        f = rng.uniform(lo, hi)
        if any(abs(f - b.carrier) < 2 * B for b in bands):
            continue
        e = rng.uniform(*cfg.energy_range)
        t = g.duration / 2 + rng.uniform(-half, half)
        bands.append(BandSpec(e, B, t, f))
    return bands


@dataclass
class _TrialInputs:
    signal: MultibandSignal
    noisy: MultibandSignal
    chips: ChipSet
    offsets: np.ndarray


def _trial_inputs(cfg: ExperimentConfig, trial: int, K: int, M: int, snr: float, K_max: int, M_max: int):
    ts = trial_seed(cfg.seed, trial)
    g = cfg.grid
    bands = draw_bands(cfg, K_max, np.random.default_rng([ts, 0]))[:K]
    sig = generate_multiband(g, bands, periodic=cfg.periodic)
    noisy = add_awgn(sig, snr, int(np.random.SeedSequence([ts, 3]).generate_state(1)[0])) if K else sig
    if cfg.chips_file:
        chips = load_chips(cfg.chips_file, g)
        if chips.M < M:
            raise ValueError(f"{cfg.chips_file} holds {chips.M} rows, need {M}")
        chips = chips.subset(M)
    else:
        chips = generate_chips(g, M_max, int(np.random.SeedSequence([ts, 1]).generate_state(1)[0])).subset(M)
    offsets = draw_offsets(g, M_max, int(np.random.SeedSequence([ts, 2]).generate_state(1)[0]))[:M]
    return ts, _TrialInputs(sig, noisy, chips, offsets)


def _recover(cfg: ExperimentConfig, acqs, chips: ChipSet, sig: MultibandSignal, max_bands):
    g = cfg.grid
    return reconstruct(
        acqs,
        build_phi(chips),
        g,
        max_bands=max_bands,
        residual_tol=cfg.residual_tol,
        reference=sig.samples,
        symmetric=cfg.symmetric,
        eig_tol=cfg.eig_tol,
        noise_factor=cfg.noise_factor,
        edge_margin=cfg.edge_margin,
    )


def _max_bands(cfg: ExperimentConfig, M: int) -> int:
    mb = cfg.max_bands if cfg.max_bands is not None else M - 2
    return max(1, min(mb, M))


def run_trial(
    cfg: ExperimentConfig,
    trial: int,
    K: int,
    M: int,
    input_snr_db: float,
    include_mwc: bool = False,
    K_max: int | None = None,
    M_max: int | None = None,
) -> list[dict]:
    """One trial; returns a row for RT-MWCS and, if asked, one for MWC on the same inputs."""
    t0 = time.perf_counter()
    ts, inp = _trial_inputs(cfg, trial, K, M, input_snr_db, K_max or K, M_max or M)
    truth = true_support_slices(inp.signal)
    schemes = [("rt", None)] + ([("mwc", None)] if include_mwc else [])
    rows = []
    for scheme, _ in schemes:
        if scheme == "rt":
            acqs = acquire_run(
                inp.noisy,
                inp.chips,
                ts,
                offsets=inp.offsets,
                misaligned=cfg.misaligned,
                tau_jitter=cfg.tau_jitter,
            )
        else:
            acqs = acquire_mwc(inp.noisy, inp.chips).acqs
        if K == 0:
            res_snr, support, resid = math.nan, (), 0.0
        else:
            r = _recover(cfg, acqs, inp.chips, inp.signal, _max_bands(cfg, M))
            res_snr, support, resid = r.output_snr_db, r.support.indices, r.residual_norm
        rows.append(
            dict(
                scheme=scheme,
                trial=trial,
                master_seed=cfg.seed,
                trial_seed=ts,
                K=K,
                M=M,
                input_snr_db=input_snr_db,
                output_snr_db=res_snr,
                support=" ".join(str(i) for i in support),
                n_support=len(support),
                exact_support=int(set(support) == truth),
                residual=resid,
            )
        )
    wall = time.perf_counter() - t0
    for r in rows:
        r["_wall"] = wall
    return rows


def _job(args):
    return run_trial(*args)


def _run_sweep(cfg: ExperimentConfig, sweep: str, values: Sequence, include_mwc: bool) -> SweepResult:
    if len(values) == 0:
        raise ValueError("sweep range is empty")
    points = []
    for v in values:
        K, M, snr = cfg.K, cfg.M, cfg.input_snr_db
        if sweep == "sparsity":
            K = int(v)
        elif sweep == "noise":
            snr = float(v)
        elif sweep == "m":
            M = int(v)
        points.append((v, K, M, snr))
    K_max = max(p[1] for p in points)
    M_max = max(p[2] for p in points)
    jobs = [
        (cfg, t, K, M, snr, include_mwc, K_max, M_max)
        for (_, K, M, snr) in points
        for t in range(cfg.trials)
    ]
    if cfg.workers > 1:
        with ProcessPoolExecutor(cfg.workers) as ex:
            outs = list(ex.map(_job, jobs))
    else:
        outs = [_job(j) for j in jobs]

    result = SweepResult(sweep)
    it = iter(outs)
    for v, K, M, snr in points:
        point_rows = [row for _ in range(cfg.trials) for row in next(it)]
        for row in point_rows:
            wall = row.pop("_wall")
            row.update(sweep=sweep, value=v)
            result.trials.append(row)
            result.timing.append(
                dict(sweep=sweep, value=v, scheme=row["scheme"], trial=row["trial"], wall_time_s=wall)
            )
        for scheme in ("rt", "mwc") if include_mwc else ("rt",):
            snrs = np.array([r["output_snr_db"] for r in point_rows if r["scheme"] == scheme])
            exact = np.array([r["exact_support"] for r in point_rows if r["scheme"] == scheme])
            result.summary.append(
                dict(
                    sweep=sweep,
                    value=v,
                    scheme=scheme,
                    K=K,
                    M=M,
                    input_snr_db=snr,
                    trials=cfg.trials,
                    mean_snr_db=float(np.mean(snrs)),
                    std_snr_db=float(np.std(snrs)),
                    exact_rate=float(np.mean(exact)),
                    feasible=int(2 * K + 2 <= M),
                )
            )
    return result


def run_sparsity_sweep(cfg: ExperimentConfig, values: Sequence[int] | None = None) -> SweepResult:
    """Output SNR against the number of band pairs ``K`` at fixed ``M``."""
    return _run_sweep(cfg, "sparsity", SWEEP_DEFAULTS["sparsity"] if values is None else values, False)


def run_noise_sweep(cfg: ExperimentConfig, values: Sequence[float] | None = None) -> SweepResult:
    """Output SNR against input SNR (dB) at fixed ``K`` and ``M``."""
    return _run_sweep(cfg, "noise", SWEEP_DEFAULTS["noise"] if values is None else values, False)


def run_m_sweep(
    cfg: ExperimentConfig, values: Sequence[int] | None = None, include_mwc: bool = False
) -> SweepResult:
    """Output SNR against the number of acquisitions; MWC on the same trials when asked."""
    return _run_sweep(cfg, "m", SWEEP_DEFAULTS["m"] if values is None else values, include_mwc)


# --- file formats -----------------------------------------------------------


def _fmt(v) -> str:
    if isinstance(v, (float, np.floating)):
        if math.isnan(v):
            return "nan"
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        return format(float(v), ".17g")
    return str(v)


def write_csv(rows: Sequence[dict], path, columns: Sequence[str]) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(columns)
        for r in rows:
            w.writerow([_fmt(r[c]) for c in columns])


def write_sweep(result: SweepResult, out_dir) -> dict[str, Path]:
    """``trials.csv`` and ``summary.csv`` are deterministic; wall times go to ``timing.csv``."""
    out = Path(out_dir)
    paths = {
        "trials": out / f"{result.sweep}_trials.csv",
        "summary": out / f"{result.sweep}_summary.csv",
        "timing": out / f"{result.sweep}_timing.csv",
    }
    write_csv(result.trials, paths["trials"], TRIAL_FIELDS)
    write_csv(result.summary, paths["summary"], SUMMARY_FIELDS)
    write_csv(result.timing, paths["timing"], ["sweep", "value", "scheme", "trial", "wall_time_s"])
    return paths


class WaveformFormatError(ValueError):
    pass


def write_waveform(path, samples, f_nyq: float) -> None:
    """Header ``f_nyq_hz=<value> n=<count>`` then one sample per line."""
    x = np.asarray(samples, dtype=float)
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"f_nyq_hz={_fmt(float(f_nyq))} n={x.size}\n")
        for v in x:
            fh.write(_fmt(float(v)) + "\n")


def read_waveform(path) -> tuple[float, np.ndarray]:
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    if not lines:
        raise WaveformFormatError(f"{path}:1: empty file, expected header 'f_nyq_hz=<value> n=<count>'")
    header = {}
    for tok in lines[0].split():
        key, sep, val = tok.partition("=")
        if not sep:
            raise WaveformFormatError(f"{path}:1: malformed header token {tok!r}")
        header[key] = val
    try:
        f_nyq = float(header["f_nyq_hz"])
        n = int(header["n"])
    except (KeyError, ValueError) as exc:
        raise WaveformFormatError(f"{path}:1: header must be 'f_nyq_hz=<value> n=<count>'") from exc
    if n <= 0:
        raise WaveformFormatError(f"{path}:1: sample count must be positive, got {n}")
    body = [ln for ln in lines[1:]]
    while body and not body[-1].strip():
        body.pop()
    if len(body) != n:
        raise WaveformFormatError(f"{path}:{len(body) + 2}: header declares {n} samples, found {len(body)}")
    x = np.empty(n)
    for i, ln in enumerate(body):
        try:
            x[i] = float(ln)
        except ValueError:
            raise WaveformFormatError(f"{path}:{i + 2}: cannot parse sample {ln!r}") from None
    return f_nyq, x


# --- single run -------------------------------------------------------------


@dataclass
class SimulationReport:
    support: tuple[int, ...]
    true_support: tuple[int, ...] | None
    output_snr_db: float
    residual: float
    taus: list[int]
    offsets: list[float]
    x_hat: np.ndarray
    out_dir: Path | None = None


def simulate(cfg: ExperimentConfig, signal_file=None, out_dir=None) -> SimulationReport:
    """One end-to-end RT-MWCS run with a full artifact dump.

    Without ``signal_file`` a ``K``-band signal is drawn from trial 0 of the
    master seed and ``max_bands`` defaults to ``2K``.  With a waveform file
    the samples are used as recorded (no noise added) and also serve as the
    SNR reference.
    """
    if signal_file is not None:
        f_nyq, x = read_waveform(signal_file)
        if x.size % cfg.L:
            raise WaveformFormatError(f"{signal_file}: {x.size} samples is not a multiple of L = {cfg.L}")
        cfg = replace(cfg, f_nyq=f_nyq, n_periods=x.size // cfg.L)
        sig = MultibandSignal(cfg.grid, x, ())
        noisy = sig
        ts = trial_seed(cfg.seed, 0)
        chips = (
            load_chips(cfg.chips_file, cfg.grid).subset(cfg.M)
            if cfg.chips_file
            else generate_chips(cfg.grid, cfg.M, int(np.random.SeedSequence([ts, 1]).generate_state(1)[0]))
        )
        offsets = draw_offsets(cfg.grid, cfg.M, int(np.random.SeedSequence([ts, 2]).generate_state(1)[0]))
    else:
        ts, inp = _trial_inputs(cfg, 0, cfg.K, cfg.M, cfg.input_snr_db, cfg.K, cfg.M)
        sig, noisy, chips, offsets = inp.signal, inp.noisy, inp.chips, inp.offsets
    max_bands = cfg.max_bands if cfg.max_bands is not None else (2 * cfg.K if cfg.K else cfg.M - 2)
    acqs = acquire_run(
        noisy, chips, ts, offsets=offsets, misaligned=cfg.misaligned, tau_jitter=cfg.tau_jitter
    )
    r = _recover(cfg, acqs, chips, sig, max(1, min(max_bands, cfg.M)))
    truth = tuple(sorted(true_support_slices(sig))) if sig.bands else None
    report = SimulationReport(
        r.support.indices,
        truth,
        r.output_snr_db,
        r.residual_norm,
        [a.tau for a in acqs],
        [a.dt for a in acqs],
        r.x_hat,
    )
    if out_dir is not None:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        save_chips(chips, out / "chips.txt")
        write_waveform(out / "signal.txt", noisy.samples, cfg.f_nyq)
        np.save(out / "x_hat.npy", r.x_hat)
        np.save(out / "S_hat.npy", r.S_hat)
        np.save(out / "acquisitions.npy", np.stack([a.samples for a in acqs]))
        write_csv(
            [dict(m=a.m, tau=a.tau, dt=a.dt, chip_row=a.m) for a in acqs],
            out / "runs.csv",
            ["m", "tau", "dt", "chip_row"],
        )
        write_csv(
            [
                dict(
                    master_seed=cfg.seed,
                    trial_seed=ts,
                    K=cfg.K if sig.bands else 0,
                    M=cfg.M,
                    input_snr_db=cfg.input_snr_db if signal_file is None else math.nan,
                    output_snr_db=r.output_snr_db,
                    support=" ".join(map(str, r.support.indices)),
                    true_support=" ".join(map(str, truth)) if truth else "",
                    residual=r.residual_norm,
                )
            ],
            out / "summary.csv",
            ["master_seed", "trial_seed", "K", "M", "input_snr_db", "output_snr_db", "support", "true_support", "residual"],
        )
        (out / "config.json").write_text(json.dumps(_config_dict(cfg), indent=2) + "\n")
        report.out_dir = out
    return report


def _config_dict(cfg: ExperimentConfig) -> dict:
    d = asdict(cfg)
    if math.isinf(d["input_snr_db"]):
        d["input_snr_db"] = "inf"
    return d


def plot_summary(summary_csv, out_path) -> None:
    """Line chart of mean output SNR per scheme; cosmetic only."""
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    with open(summary_csv, newline="", encoding="utf-8") as fh:
        rows = list(csv.DictReader(fh))
    fig, ax = plt.subplots(figsize=(5, 3.5))
    for scheme in sorted({r["scheme"] for r in rows}):
        pts = [(float(r["value"]), float(r["mean_snr_db"])) for r in rows if r["scheme"] == scheme]
        ax.plot(*zip(*pts), marker="o", label=scheme.upper())
    ax.set_xlabel(rows[0]["sweep"] if rows else "")
    ax.set_ylabel("mean output SNR (dB)")
    ax.grid(True, alpha=0.3)
    ax.legend()
    fig.tight_layout()
    fig.savefig(out_path)
    plt.close(fig)
