"""Deterministic test signals: tones and a crude speech-like source."""
from __future__ import annotations

import numpy as np

from .audio_io import PIPELINE_RATE_HZ, AudioBuffer


def tone(freq_hz, duration_s=1.0, amplitude=0.5, sample_rate_hz=PIPELINE_RATE_HZ, phase=0.0):
    t = np.arange(int(round(duration_s * sample_rate_hz))) / sample_rate_hz
    return AudioBuffer(amplitude * np.sin(2 * np.pi * freq_hz * t + phase), sample_rate_hz)


def two_tone(strong_hz=500.0, weak_hz=3000.0, weak_rel_db=-60.0, duration_s=1.0, amplitude=0.5,
             sample_rate_hz=PIPELINE_RATE_HZ):
    t = np.arange(int(round(duration_s * sample_rate_hz))) / sample_rate_hz
    weak = amplitude * 10.0 ** (weak_rel_db / 20.0)
    x = amplitude * np.sin(2 * np.pi * strong_hz * t) + weak * np.sin(2 * np.pi * weak_hz * t)
    return AudioBuffer(x / max(1.0, np.max(np.abs(x))), sample_rate_hz)


_FORMANTS = np.array([[700.0, 1220.0, 2600.0], [300.0, 2300.0, 3000.0], [500.0, 900.0, 2400.0],
                      [400.0, 1900.0, 2550.0], [650.0, 1100.0, 2500.0]])


def speech_like(seed=0, duration_s=1.0, sample_rate_hz=PIPELINE_RATE_HZ, peak=0.6):
    """Voiced syllables (harmonics under moving formants) separated by short noise bursts and pauses."""
    rng = np.random.default_rng(seed)
    n = int(round(duration_s * sample_rate_hz))
    t = np.arange(n) / sample_rate_hz
    out = np.zeros(n)

    f0 = rng.uniform(95, 210) * (1.0 + 0.08 * np.sin(2 * np.pi * rng.uniform(2, 5) * t + rng.uniform(0, 6.3)))
    phase = 2 * np.pi * np.cumsum(f0) / sample_rate_hz
    n_syll = max(1, int(duration_s * rng.uniform(3.0, 5.0)))
    bounds = np.sort(rng.uniform(0, n, size=n_syll * 2).astype(int)).reshape(-1, 2)
    for start, stop in bounds:
        if stop - start < 400:
            continue
        seg = slice(start, stop)
        formants = _FORMANTS[rng.integers(len(_FORMANTS))] * rng.uniform(0.9, 1.1)
        voiced = np.zeros(stop - start)
        for h in range(1, 40):
            fh = f0[seg] * h
            gain = sum(1.0 / (1.0 + ((fh - fc) / (0.12 * fc)) ** 2) for fc in formants) / h ** 0.5
            gain = np.where(fh < sample_rate_hz / 2 - 200, gain, 0.0)
            voiced += gain * np.sin(h * phase[seg])
        env = np.hanning(stop - start) ** 0.6
        out[seg] += env * voiced * rng.uniform(0.4, 1.0)
        # fricative-like burst after the syllable
        b0, b1 = stop, min(n, stop + int(rng.uniform(300, 1200)))
        if b1 > b0:
            burst = rng.standard_normal(b1 - b0)
            burst = np.diff(burst, prepend=0.0)
            out[b0:b1] += 0.05 * np.hanning(b1 - b0) * burst
    out += 1e-4 * rng.standard_normal(n)
    m = np.max(np.abs(out))
    if m > 0:
        out *= peak / m
    return AudioBuffer(out, sample_rate_hz)
