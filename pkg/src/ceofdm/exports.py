"""Deterministic CSV/text writers for all data products.

Every writer formats numbers explicitly so that identical inputs produce
byte-identical files. Magnitudes are exported in dB floored at -200; an
exact -inf (zero magnitude or empty region) is encoded as -999.
"""

from __future__ import annotations

import math
from pathlib import Path

import numpy as np

from .metrics import AmbiguitySurface, CorrelationResult, db
from .optimizer import OptimizationTrace
from .quantize import QuantizationReport
from .waveform import SampledWaveform, WaveformConfig, sample_frequency

__all__ = [
    "DB_FLOOR",
    "DB_NEG_INF",
    "encode_db",
    "write_phi_csv",
    "read_phi_csv",
    "write_waveform_csv",
    "write_inst_freq_csv",
    "write_spectrum_csv",
    "write_spectrogram_csv",
    "write_acf_csv",
    "write_af_csv",
    "write_trace_csv",
    "write_quantization_csv",
    "write_summary",
]

DB_FLOOR = -200.0
DB_NEG_INF = -999.0


def encode_db(x: float) -> float:
    if x == float("-inf"):
        return DB_NEG_INF
    return max(float(x), DB_FLOOR)


def _fmt(x: float) -> str:
    return f"{x:.12e}"


def _fmt_full(x: float) -> str:
    if isinstance(x, float) and x == float("-inf"):
        return "-inf"
    return f"{x:.17g}"


def _write_lines(path, lines) -> None:
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def write_phi_csv(path, phi) -> None:
    # full precision so the vector round-trips exactly through read_phi_csv
    lines = ["ell,phi_rad"]
    for i, value in enumerate(np.asarray(phi, float), start=1):
        lines.append(f"{i},{_fmt_full(value)}")
    _write_lines(path, lines)


def read_phi_csv(path) -> np.ndarray:
    rows = Path(path).read_text(encoding="utf-8").strip().splitlines()
    if not rows or rows[0] != "ell,phi_rad":
        raise ValueError(f"{path} is not a phase-vector CSV")
    return np.array([float(line.split(",")[1]) for line in rows[1:]])


def write_waveform_csv(path, s: SampledWaveform) -> None:
    lines = ["sample_index,t_over_T,real,imag"]
    t_norm = s.t * s.fs / len(s.samples)
    for i in range(len(s.samples)):
        lines.append(
            f"{i},{_fmt(t_norm[i])},{_fmt(s.samples[i].real)},{_fmt(s.samples[i].imag)}"
        )
    _write_lines(path, lines)


def write_inst_freq_csv(path, phi, cfg: WaveformConfig) -> None:
    freq = sample_frequency(phi, cfg)
    lines = ["sample_index,t_over_T,freq_times_T"]
    for i in range(cfg.M):
        lines.append(f"{i},{_fmt(i / cfg.M)},{_fmt(freq[i] * cfg.T)}")
    _write_lines(path, lines)


def write_spectrum_csv(path, s: SampledWaveform, cfg: WaveformConfig, pad_factor: int = 4) -> None:
    """Peak-normalized power spectrum on a zero-padded grid."""
    nfft = pad_factor * cfg.M
    spec = np.fft.fftshift(np.fft.fft(s.samples, nfft))
    freqs = np.fft.fftshift(np.fft.fftfreq(nfft, d=1.0 / cfg.fs))
    power = np.abs(spec) ** 2
    power_db = db(power / power.max())
    lines = ["freq_times_T,freq_over_df,magnitude_db"]
    for i in range(nfft):
        over_df = freqs[i] / cfg.df if cfg.df > 0 else 0.0
        lines.append(
            f"{_fmt(freqs[i] * cfg.T)},{_fmt(over_df)},{_fmt(encode_db(power_db[i]))}"
        )
    _write_lines(path, lines)


def _stft(samples: np.ndarray, nperseg: int, hop: int) -> tuple[np.ndarray, np.ndarray]:
    window = np.hanning(nperseg)
    starts = range(0, len(samples) - nperseg + 1, hop)
    frames = np.array([np.fft.fftshift(np.fft.fft(samples[k : k + nperseg] * window)) for k in starts])
    centers = np.array([k + nperseg / 2.0 for k in starts])
    return frames.T, centers


def write_spectrogram_csv(path, s: SampledWaveform, cfg: WaveformConfig) -> None:
    """Windowed-FFT power matrix, rows = frequency bins, columns = time frames."""
    nperseg = min(128, max(8, cfg.M // 8))
    hop = max(1, nperseg // 4)
    frames, centers = _stft(s.samples, nperseg, hop)
    freqs = np.fft.fftshift(np.fft.fftfreq(nperseg, d=1.0 / cfg.fs))
    power = np.abs(frames) ** 2
    power_db = db(power / power.max())
    header = "freq_times_T," + ",".join(_fmt(c / cfg.M) for c in centers)
    lines = [header]
    for i in range(nperseg):
        row = ",".join(_fmt(encode_db(v)) for v in power_db[i])
        lines.append(f"{_fmt(freqs[i] * cfg.T)},{row}")
    _write_lines(path, lines)


def write_acf_csv(path, r: CorrelationResult, T: float) -> None:
    """Columns: delay_samples, delay_over_T, magnitude_db."""
    mag = r.magnitude()
    mag_db = db(mag * mag)
    lines = ["delay_samples,delay_over_T,magnitude_db"]
    zero = r.zero_index
    for k in range(len(mag)):
        u = k - zero
        lines.append(
            f"{u},{_fmt(u / (r.fs * T))},{_fmt(encode_db(mag_db[k]))}"
        )
    _write_lines(path, lines)


def write_af_csv(path, af: AmbiguitySurface, T: float) -> None:
    """First column Doppler (times T); remaining columns |chi|^2 in dB per delay."""
    header = "doppler_times_T," + ",".join(_fmt(d / T) for d in af.delays)
    lines = [header]
    with np.errstate(divide="ignore"):
        values_db = 10.0 * np.log10(af.values**2)
    for i in range(len(af.dopplers)):
        row = ",".join(_fmt(encode_db(v)) for v in values_db[i])
        lines.append(f"{_fmt(af.dopplers[i] * T)},{row}")
    _write_lines(path, lines)


def write_trace_csv(path, trace: OptimizationTrace) -> None:
    """Columns: iter, J_p_db, grad_norm, mu, backtracks, reset_flag."""
    lines = ["iter,J_p_db,grad_norm,mu,backtracks,reset_flag"]
    for row in trace.rows:
        lines.append(
            f"{row.iteration},{_fmt_full(row.j_db)},{_fmt_full(row.grad_norm)},"
            f"{_fmt_full(row.mu)},{row.backtracks},{int(row.reset)}"
        )
    _write_lines(path, lines)


def write_quantization_csv(path, report: QuantizationReport) -> None:
    lines = [
        "mpsk,max_perturbation_rad,gisl_before_db,gisl_after_db,"
        "gisl_degradation_db,pslr_before_db,pslr_after_db"
    ]
    for row in report.rows:
        mpsk = "inf" if row.mpsk == math.inf else str(int(row.mpsk))
        lines.append(
            f"{mpsk},{_fmt_full(row.max_perturbation)},"
            f"{_fmt_full(encode_db(row.gisl_before_db))},"
            f"{_fmt_full(encode_db(row.gisl_after_db))},"
            f"{_fmt_full(row.gisl_degradation_db)},"
            f"{_fmt_full(encode_db(row.pslr_before_db))},"
            f"{_fmt_full(encode_db(row.pslr_after_db))}"
        )
    _write_lines(path, lines)


def write_summary(path, entries: dict) -> None:
    """Key-value summary, one ``key = value`` line per entry, full precision."""
    lines = []
    for key, value in entries.items():
        if isinstance(value, float):
            lines.append(f"{key} = {_fmt_full(value)}")
        else:
            lines.append(f"{key} = {value}")
    _write_lines(path, lines)
