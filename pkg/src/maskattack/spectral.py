"""STFT/ISTFT framing and per-frame PSD conversion.

Framing convention: the signal is zero-padded by ``frame_len // 2`` samples at
the front and by at least as much at the tail, rounded up so the last frame is
complete.  Frame ``j`` is therefore centred on sample ``j * hop`` of the
original signal, and every original sample is covered by frames whose window
value is nonzero (periodic Hann is zero at its first sample).
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.signal import get_window

from . import _accel
from .audio_io import PIPELINE_RATE_HZ, AudioBuffer
from .errors import DimensionError, TooShortError

PSD_FLOOR_DB = -200.0
PSD_REFERENCE_DB = 96.0
WINDOWS = ("hann", "rectangular")


@lru_cache(maxsize=None)
def _window(name: str, n: int) -> np.ndarray:
    if name == "hann":
        w = get_window("hann", n, fftbins=True)
    elif name == "rectangular":
        w = np.ones(n)
    else:
        raise ValueError(f"unknown window {name!r}; choose from {WINDOWS}")
    w.setflags(write=False)
    return w


@dataclass(frozen=True)
class StftConfig:
    frame_len: int = 2048
    hop: int = 512
    window: str = "hann"

    def __post_init__(self):
        if self.frame_len <= 0 or self.frame_len % 2:
            raise ValueError("frame_len must be a positive even integer")
        if not 0 < self.hop <= self.frame_len:
            raise ValueError("hop must satisfy 0 < hop <= frame_len")
        w2 = _window(self.window, self.frame_len) ** 2
        # window-squared overlap-add must be constant for exact reconstruction
        period = np.zeros(self.hop)
        for start in range(0, self.frame_len, self.hop):
            seg = w2[start:start + self.hop]
            period[: seg.size] += seg
        if not np.allclose(period, period[0], rtol=1e-9, atol=1e-12) or period[0] <= 0:
            raise ValueError(
                f"({self.frame_len}, {self.hop}, {self.window}) violates the constant overlap-add condition"
            )

    @property
    def n_bins(self) -> int:
        return self.frame_len // 2 + 1

    @property
    def window_array(self) -> np.ndarray:
        return _window(self.window, self.frame_len)

    def frame_count(self, n_samples: int) -> int:
        return 1 + -(-n_samples // self.hop)

    def padded_len(self, n_samples: int) -> int:
        return self.frame_len + (self.frame_count(n_samples) - 1) * self.hop

    def bin_freqs(self, sample_rate_hz: int = PIPELINE_RATE_HZ) -> np.ndarray:
        return np.fft.rfftfreq(self.frame_len, d=1.0 / sample_rate_hz)


@dataclass(eq=False)
class Spectrogram:
    """One-sided complex STFT frames, shape ``(frame_count, frame_len // 2 + 1)``."""

    frames: np.ndarray
    config: StftConfig
    original_len: int
    sample_rate_hz: int = PIPELINE_RATE_HZ

    def __post_init__(self):
        self.frames = np.asarray(self.frames, dtype=np.complex128)
        if self.frames.ndim != 2 or self.frames.shape[1] != self.config.n_bins:
            raise DimensionError(f"frames must have shape (F, {self.config.n_bins}), got {self.frames.shape}")

    @property
    def frame_count(self) -> int:
        return self.frames.shape[0]

    def with_frames(self, frames: np.ndarray) -> "Spectrogram":
        return Spectrogram(frames, self.config, self.original_len, self.sample_rate_hz)


@dataclass(eq=False)
class PsdFrame:
    """Normalized log-power spectrum of one frame.

    ``psd_db`` is the raw PSD shifted by ``norm_offset_db`` so the loudest bin
    sits at 96 dB; bins at the floor stay at exactly ``PSD_FLOOR_DB``.
    """

    psd_db: np.ndarray
    norm_offset_db: float
    frame_len: int
    bin_freqs_hz: np.ndarray


def _frame_signal(samples: np.ndarray, config: StftConfig) -> np.ndarray:
    n = config.frame_len
    padded = np.zeros(config.padded_len(samples.size))
    padded[n // 2 : n // 2 + samples.size] = samples
    view = np.lib.stride_tricks.sliding_window_view(padded, n)[:: config.hop]
    return view


def stft(audio: AudioBuffer, config: StftConfig = StftConfig()) -> Spectrogram:
    if len(audio) < config.hop:
        raise TooShortError(f"audio has {len(audio)} samples, need at least one hop ({config.hop})")
    frames = _frame_signal(audio.samples, config) * config.window_array
    return Spectrogram(np.fft.rfft(frames, axis=1), config, len(audio), audio.sample_rate_hz)


def istft_samples(frames: np.ndarray, config: StftConfig, original_len: int) -> np.ndarray:
    """Least-squares overlap-add inverse, unclamped."""
    n = config.frame_len
    time_frames = np.fft.irfft(frames, n=n, axis=1)
    out_len = n + (frames.shape[0] - 1) * config.hop
    out, wsum = _accel.overlap_add(np.ascontiguousarray(time_frames), config.window_array, config.hop, out_len)
    nz = wsum > 1e-10
    out[nz] /= wsum[nz]
    out[~nz] = 0.0
    return out[n // 2 : n // 2 + original_len]


def istft(spec: Spectrogram) -> AudioBuffer:
    samples = istft_samples(spec.frames, spec.config, spec.original_len)
    return AudioBuffer(np.clip(samples, -1.0, 1.0), spec.sample_rate_hz)


def raw_psd_db(magnitude: np.ndarray, frame_len: int) -> np.ndarray:
    """20*log10(|A| / N), floor-clamped."""
    rel = np.asarray(magnitude, dtype=np.float64) / frame_len
    out = np.full(rel.shape, PSD_FLOOR_DB)
    nz = rel > 10.0 ** (PSD_FLOOR_DB / 20.0)
    out[nz] = 20.0 * np.log10(rel[nz])
    return out


def normalize_psd(raw: np.ndarray):
    """Shift raw PSD rows so each row's maximum is 96 dB.

    Returns ``(psd_db, offsets)``.  A row with every bin at the floor gets the
    offset ``96 - floor``, the value the same rule yields when the floor is
    treated as the row maximum; its bins stay at the floor.
    """
    raw = np.atleast_2d(raw)
    offsets = PSD_REFERENCE_DB - raw.max(axis=1)
    live = raw > PSD_FLOOR_DB
    psd = np.where(live, raw + offsets[:, None], PSD_FLOOR_DB)
    return psd, offsets


def psd_of_frames(frames: np.ndarray, frame_len: int):
    """Vectorized ``psd_of_frame`` over a ``(F, K)`` array of complex frames."""
    return normalize_psd(raw_psd_db(np.abs(frames), frame_len))


def psd_of_frame(frame: np.ndarray, frame_len: int, sample_rate_hz: int = PIPELINE_RATE_HZ) -> PsdFrame:
    frame = np.asarray(frame)
    if frame.shape != (frame_len // 2 + 1,):
        raise DimensionError(f"frame must have {frame_len // 2 + 1} bins, got {frame.shape}")
    psd, offsets = psd_of_frames(frame[None, :], frame_len)
    freqs = np.fft.rfftfreq(frame_len, d=1.0 / sample_rate_hz)
    return PsdFrame(psd[0], float(offsets[0]), frame_len, freqs)


def amplitudes_from_psd(psd_db: np.ndarray, offsets, frame_len: int) -> np.ndarray:
    """Invert ``Amplitude(k) = N * sqrt(10 ** (PSD(k) / 10))`` after removing the offset."""
    psd_db = np.asarray(psd_db, dtype=np.float64)
    offsets = np.asarray(offsets, dtype=np.float64)
    if psd_db.ndim == 2:
        offsets = offsets.reshape(-1, 1)
    raw = psd_db - offsets
    amp = frame_len * np.sqrt(10.0 ** (raw / 10.0))
    return np.where(psd_db <= PSD_FLOOR_DB, 0.0, amp)


def amplitude_from_psd(psd: PsdFrame) -> np.ndarray:
    return amplitudes_from_psd(psd.psd_db, psd.norm_offset_db, psd.frame_len)
