"""Masker identification and global masking threshold per frame.

All levels live in the 96 dB-normalized PSD domain of :class:`PsdFrame`, which
makes masker detection invariant to the frame's overall gain.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from . import _accel
from .spectral import PSD_REFERENCE_DB, PsdFrame

MASKER_NEIGHBORHOOD_BARK = 0.5
ATH_CEILING_DB = PSD_REFERENCE_DB


def ath(freq_hz):
    """Absolute threshold of hearing in dB (Terhardt), capped at 96 dB."""
    f = np.asarray(freq_hz, dtype=np.float64)
    if np.any(f <= 0):
        raise ValueError("ATH is defined for positive frequencies only")
    khz = f / 1000.0
    out = 3.64 * khz ** -0.8 - 6.5 * np.exp(-0.6 * (khz - 3.3) ** 2) + 1e-3 * khz ** 4
    out = np.minimum(out, ATH_CEILING_DB)
    return float(out) if out.ndim == 0 else out


def bark(freq_hz):
    f = np.asarray(freq_hz, dtype=np.float64)
    if np.any(f < 0):
        raise ValueError("frequency must be non-negative")
    out = 13.0 * np.arctan(0.00076 * f) + 3.5 * np.arctan((f / 7500.0) ** 2)
    return float(out) if out.ndim == 0 else out


def ath_curve(bin_freqs_hz: np.ndarray) -> np.ndarray:
    """ATH per FFT bin; the DC bin takes the ceiling (the f -> 0 limit)."""
    freqs = np.asarray(bin_freqs_hz, dtype=np.float64)
    out = np.full(freqs.shape, ATH_CEILING_DB)
    pos = freqs > 0
    out[pos] = ath(freqs[pos])
    return out


def neighborhood_bounds(barks: np.ndarray, width: float = MASKER_NEIGHBORHOOD_BARK):
    """Inclusive bin ranges ``[lo, hi]`` covering bins within ``width`` Bark."""
    lo = np.searchsorted(barks, barks - width, side="left").astype(np.int64)
    hi = (np.searchsorted(barks, barks + width, side="right") - 1).astype(np.int64)
    return lo, hi


class Masker(NamedTuple):
    bin: int
    psd_db: float
    bark: float


@dataclass(eq=False)
class MaskingAnalysis:
    maskers: list
    masker_bins: np.ndarray
    maskee_bins: np.ndarray
    ath_db: np.ndarray
    global_threshold_db: np.ndarray
    norm_offset_db: float


class BinGeometry:
    """Per-bin frequency tables shared by every frame of one STFT layout."""

    def __init__(self, bin_freqs_hz: np.ndarray):
        self.freqs = np.asarray(bin_freqs_hz, dtype=np.float64)
        self.barks = bark(self.freqs)
        self.ath = ath_curve(self.freqs)
        self.lo, self.hi = neighborhood_bounds(self.barks)

    @classmethod
    def for_frame(cls, psd: PsdFrame) -> "BinGeometry":
        return cls(psd.bin_freqs_hz)


def masker_peaks(psd_db: np.ndarray, geom: BinGeometry) -> np.ndarray:
    """Boolean ``(F, K)`` array marking masker peaks.

    A bin is a masker when it exceeds the ATH and is the largest value within
    half a Bark on either side.  Ties go to the lowest bin index, so two equal
    adjacent bins yield one masker at the lower bin.
    """
    psd_db = np.ascontiguousarray(np.atleast_2d(psd_db), dtype=np.float64)
    return _accel.masker_mask(psd_db, geom.ath, geom.lo, geom.hi)


def masker_support(peaks: np.ndarray) -> np.ndarray:
    """Peaks widened by one bin each side (the tonal component's main lobe)."""
    peaks = np.atleast_2d(peaks)
    support = peaks.copy()
    support[:, 1:] |= peaks[:, :-1]
    support[:, :-1] |= peaks[:, 1:]
    return support


def global_thresholds(psd_db: np.ndarray, peaks: np.ndarray, geom: BinGeometry) -> np.ndarray:
    psd_db = np.ascontiguousarray(np.atleast_2d(psd_db), dtype=np.float64)
    return _accel.global_threshold(psd_db, np.ascontiguousarray(np.atleast_2d(peaks)), geom.barks, geom.ath)


def find_maskers(psd: PsdFrame) -> list:
    geom = BinGeometry.for_frame(psd)
    peaks = masker_peaks(psd.psd_db, geom)[0]
    return [Masker(int(k), float(psd.psd_db[k]), float(geom.barks[k])) for k in np.flatnonzero(peaks)]


def masking_threshold(psd: PsdFrame, maskers) -> np.ndarray:
    """Global threshold: power sum of the ATH and each masker's two-slope spread."""
    geom = BinGeometry.for_frame(psd)
    peaks = np.zeros(psd.psd_db.shape, dtype=bool)
    levels = np.array(psd.psd_db, dtype=np.float64)
    for m in maskers:
        peaks[m.bin] = True
        levels[m.bin] = m.psd_db
    return global_thresholds(levels, peaks, geom)[0]


def analyze_frame(psd: PsdFrame) -> MaskingAnalysis:
    geom = BinGeometry.for_frame(psd)
    peaks = masker_peaks(psd.psd_db, geom)
    support = masker_support(peaks)[0]
    theta = global_thresholds(psd.psd_db, peaks, geom)[0]
    maskers = [Masker(int(k), float(psd.psd_db[k]), float(geom.barks[k])) for k in np.flatnonzero(peaks[0])]
    return MaskingAnalysis(
        maskers=maskers,
        masker_bins=np.flatnonzero(support),
        maskee_bins=np.flatnonzero(~support),
        ath_db=geom.ath.copy(),
        global_threshold_db=theta,
        norm_offset_db=psd.norm_offset_db,
    )
