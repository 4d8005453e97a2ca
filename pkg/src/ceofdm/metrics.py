"""Autocorrelation, ambiguity surface, and the PSLR / ISL / GISL metric family.

All correlation vectors have length 2M-1 and are centered: index M-1 holds
zero delay, index k holds delay (k - (M-1)) / fs. Sidelobe metrics operate on
binary mainlobe/sidelobe selector vectors that partition the delay axis.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .waveform import SampledWaveform

__all__ = [
    "MAG_FLOOR",
    "CorrelationResult",
    "GislWeights",
    "AmbiguitySurface",
    "db",
    "compute_acf",
    "compute_af",
    "detect_mainlobe_null",
    "build_weights",
    "weights_are_symmetric",
    "compute_gisl",
    "compute_isl",
    "compute_pslr",
]

# |r| values below this are clamped before raising to the p-th power, keeping
# large-p evaluations clear of denormals without touching reported levels.
MAG_FLOOR = 1e-9


def db(x):
    """Power ratio in decibels; an exact zero maps to -inf."""
    x = np.asarray(x, dtype=float)
    with np.errstate(divide="ignore"):
        out = 10.0 * np.log10(x)
    return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class CorrelationResult:
    """Centered ACF samples r (length 2M-1) and the sampling rate they live on."""

    r: np.ndarray
    fs: float

    @property
    def zero_index(self) -> int:
        return (len(self.r) - 1) // 2

    @property
    def delays(self) -> np.ndarray:
        """Delay of each sample in seconds."""
        return (np.arange(len(self.r)) - self.zero_index) / self.fs

    def magnitude(self) -> np.ndarray:
        return np.abs(self.r)


@dataclass(frozen=True)
class GislWeights:
    """Binary sidelobe/mainlobe selectors on the centered delay grid.

    ``w_ml`` is one exactly on |k| <= null_index (first-null samples belong to
    the mainlobe); ``w_sl`` is one exactly on the requested sidelobe region.
    The two supports are disjoint and each vector is symmetric about zero
    delay.
    """

    w_sl: np.ndarray
    w_ml: np.ndarray
    null_index: int
    region: object


@dataclass(frozen=True)
class AmbiguitySurface:
    """|chi(tau, nu)| over a delay/Doppler grid; values[i] is the row at dopplers[i]."""

    values: np.ndarray
    delays: np.ndarray
    dopplers: np.ndarray


def _crosscorr_padded(u_pad: np.ndarray, v_pad: np.ndarray) -> np.ndarray:
    """Centered circular cross-correlation sum_m u[m+k] v*[m] of zero-padded inputs."""
    spec = np.fft.fft(u_pad) * np.conj(np.fft.fft(v_pad))
    return np.fft.fftshift(np.fft.ifft(spec))


def compute_acf(s: SampledWaveform) -> CorrelationResult:
    """Discretized ACF over all 2M-1 delays.

    The power spectrum of the zero-padded samples is inverse transformed over
    exactly 2M-1 points, which equals the direct lag sum sum_m s[m+k] s*[m].
    For unit-energy input the zero-delay sample is exactly 1.
    """
    return CorrelationResult(r=_crosscorr_padded(s.padded, s.padded), fs=s.fs)


def compute_af(s: SampledWaveform, doppler_grid) -> AmbiguitySurface:
    """Ambiguity surface row by row over a grid of Doppler shifts (Hz).

    Each Doppler shift is split symmetrically between the two copies of the
    waveform before correlating, so the zero-Doppler row reproduces
    compute_acf exactly and the zero-delay cut is the Dirichlet-kernel sum
    |sum_m |s[m]|^2 e^{j 2 pi nu t_m}|.
    """
    nu = np.asarray(doppler_grid, dtype=float).ravel()
    m = s.samples.size
    n = s.padded.size
    values = np.empty((nu.size, n))
    u_pad = np.zeros(n, dtype=complex)
    v_pad = np.zeros(n, dtype=complex)
    for i, v in enumerate(nu):
        shift = np.exp(1j * np.pi * v * s.t)
        u_pad[:m] = s.samples * shift
        v_pad[:m] = s.samples * np.conj(shift)
        values[i] = np.abs(_crosscorr_padded(u_pad, v_pad))
    delays = (np.arange(n) - (m - 1)) / s.fs
    return AmbiguitySurface(values=values, delays=delays, dopplers=nu)


def detect_mainlobe_null(r: CorrelationResult) -> int:
    """Index (in samples) of the first local minimum of |r| beyond zero delay.

    Scans outward from zero delay; ties resolve toward smaller delay. A
    monotone decay that only bottoms out at the last available lag returns
    that lag (the rectangular-pulse triangle case). Raises if |r| has no
    local minimum at positive delays.
    """
    mag = np.abs(r.r)[r.zero_index :]
    n = mag.size
    if n >= 3:
        interior = np.nonzero((mag[1:-1] <= mag[:-2]) & (mag[1:-1] <= mag[2:]))[0]
        if interior.size:
            return int(interior[0]) + 1
    if n >= 2 and mag[-1] <= mag[-2]:
        return n - 1
    raise ValueError("no null found: |r| has no local minimum at positive delays")


def build_weights(null_index: int, region, M: int) -> GislWeights:
    """Binary mainlobe/sidelobe selectors on the centered delay grid.

    ``region`` is either the string ``"full"`` (all delays beyond the first
    null) or a sequence of (lo, hi) delay-magnitude intervals in fractions of
    the pulse duration; sample k maps to |tau|/T = |k - (M-1)| / M. Intervals
    may touch the mainlobe edge but must not reach inside it; boundary
    samples at the null itself count as mainlobe.
    """
    if null_index < 1 or null_index > M - 1:
        raise ValueError(f"null_index must be in [1, {M - 1}], got {null_index}")
    offsets = np.abs(np.arange(2 * M - 1) - (M - 1))
    w_ml = (offsets <= null_index).astype(float)
    if isinstance(region, str):
        if region != "full":
            raise ValueError(f"unknown region descriptor {region!r}")
        w_sl = (offsets > null_index).astype(float)
        descriptor = "full"
    else:
        w_sl = np.zeros(2 * M - 1)
        tol = 1e-9 * M
        intervals = []
        for lo, hi in region:
            lo, hi = float(lo), float(hi)
            if not (0.0 <= lo <= hi):
                raise ValueError(f"invalid region interval ({lo}, {hi})")
            lo_s, hi_s = lo * M, hi * M
            if lo_s < null_index - tol:
                raise ValueError(
                    f"region interval ({lo}, {hi}) overlaps the mainlobe "
                    f"(first null at {null_index} samples = {null_index / M:.6g} T)"
                )
            w_sl[(offsets >= lo_s - tol) & (offsets <= hi_s + tol)] = 1.0
            intervals.append((lo, hi))
        w_sl[offsets <= null_index] = 0.0
        descriptor = tuple(intervals)
    return GislWeights(w_sl=w_sl, w_ml=w_ml, null_index=int(null_index), region=descriptor)


def weights_are_symmetric(w: GislWeights) -> bool:
    return bool(
        np.array_equal(w.w_sl, w.w_sl[::-1]) and np.array_equal(w.w_ml, w.w_ml[::-1])
    )


def _validated_p(p) -> int:
    if int(p) != p or int(p) < 2 or int(p) % 2:
        raise ValueError(f"p must be an even integer >= 2, got {p!r}")
    return int(p)


def _floored_magnitude(r: np.ndarray) -> np.ndarray:
    return np.maximum(np.abs(r), MAG_FLOOR)


def compute_gisl(r: CorrelationResult, w: GislWeights, p) -> float:
    """Generalized integrated sidelobe level (w_sl' |r|^p / w_ml' |r|^p)^(2/p).

    Linear (power-ratio) value; convert with ``db`` for decibels. At p=2 this
    is the plain ISL energy ratio; as p grows it approaches the PSLR.
    """
    p = _validated_p(p)
    y = _floored_magnitude(r.r) ** p
    num = float(w.w_sl @ y)
    den = float(w.w_ml @ y)
    if den <= 0.0:
        raise ValueError("mainlobe weight support is empty")
    return (num / den) ** (2.0 / p)


def compute_isl(r: CorrelationResult, w: GislWeights) -> float:
    """Integrated sidelobe level: sidelobe energy over mainlobe energy (linear)."""
    y = _floored_magnitude(r.r) ** 2
    num = float(w.w_sl @ y)
    den = float(w.w_ml @ y)
    if den <= 0.0:
        raise ValueError("mainlobe weight support is empty")
    return num / den


def compute_pslr(r: CorrelationResult, null_index: int, weights: GislWeights | None = None) -> float:
    """Peak sidelobe level in dB relative to the unit mainlobe peak.

    With ``weights`` given, the peak is taken over the sidelobe support (a
    sub-region PSLR); otherwise over all delays beyond the first null.
    Returns -inf when the searched region is empty or identically zero.
    """
    mag = np.abs(r.r)
    if weights is not None:
        sl = mag[weights.w_sl > 0]
    else:
        offsets = np.abs(np.arange(len(mag)) - r.zero_index)
        sl = mag[offsets > null_index]
    if sl.size == 0:
        return float("-inf")
    peak = float(sl.max())
    if peak == 0.0:
        return float("-inf")
    return db(peak * peak)
