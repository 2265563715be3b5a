"""Transform-and-compare detector for adversarial audio.

An input is transcribed as is and after a mild signal transform; a large
character error rate between the two transcripts flags it as adversarial.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Union

import numpy as np
from scipy.ndimage import median_filter

from .asr import MockTranscriber, Transcriber
from .audio_io import PIPELINE_RATE_HZ, AudioBuffer, resample_linear
from .errors import ConfigError, UndefinedInputError
from .metrics import auc, cer


@dataclass(frozen=True)
class DownUpSample:
    target_rate_hz: int = 8000

    def validate(self, rate_hz: int = PIPELINE_RATE_HZ):
        if not 0 < self.target_rate_hz < rate_hz:
            raise ConfigError(f"target rate must lie in (0, {rate_hz}), got {self.target_rate_hz}")

    def apply(self, audio: AudioBuffer) -> AudioBuffer:
        self.validate(audio.sample_rate_hz)
        down = resample_linear(audio, self.target_rate_hz)
        up = resample_linear(down, audio.sample_rate_hz)
        return _fit_length(up, len(audio))


@dataclass(frozen=True)
class QuantizeDequantize:
    """Mid-rise quantizer with ``2**bits`` levels spanning [-1, 1]."""

    bits: int = 8

    def validate(self, rate_hz: int = PIPELINE_RATE_HZ):
        if not 1 <= self.bits <= 16:
            raise ConfigError(f"bits must lie in [1, 16], got {self.bits}")

    def apply(self, audio: AudioBuffer) -> AudioBuffer:
        self.validate()
        levels = 1 << self.bits
        step = 2.0 / levels
        idx = np.clip(np.floor((audio.samples + 1.0) / step), 0, levels - 1)
        return AudioBuffer(-1.0 + (idx + 0.5) * step, audio.sample_rate_hz)


@dataclass(frozen=True)
class MedianFilter:
    width: int = 3

    def validate(self, rate_hz: int = PIPELINE_RATE_HZ):
        if self.width < 1 or self.width % 2 == 0:
            raise ConfigError(f"median width must be a positive odd integer, got {self.width}")

    def apply(self, audio: AudioBuffer) -> AudioBuffer:
        self.validate()
        if self.width == 1:
            return audio.copy()
        return AudioBuffer(median_filter(audio.samples, size=self.width, mode="reflect"), audio.sample_rate_hz)


Transform = Union[DownUpSample, QuantizeDequantize, MedianFilter]


def _fit_length(audio: AudioBuffer, n: int) -> AudioBuffer:
    x = audio.samples
    if len(x) >= n:
        return AudioBuffer(x[:n], audio.sample_rate_hz)
    pad = np.full(n - len(x), x[-1] if len(x) else 0.0)
    return AudioBuffer(np.concatenate([x, pad]), audio.sample_rate_hz)


def transform_audio(audio: AudioBuffer, transform: Transform) -> AudioBuffer:
    return transform.apply(audio)


def parse_transform(text: str) -> Transform:
    """``down_up[:rate]``, ``quantize[:bits]`` or ``median[:width]``."""
    name, _, arg = text.strip().partition(":")
    kinds = {"down_up": DownUpSample, "quantize": QuantizeDequantize, "median": MedianFilter}
    if name not in kinds:
        raise ConfigError(f"unknown transform {name!r}; expected one of {sorted(kinds)}")
    try:
        transform = kinds[name](int(arg)) if arg else kinds[name]()
    except ValueError as exc:
        raise ConfigError(f"bad transform parameter in {text!r}") from exc
    transform.validate()
    return transform


@dataclass(frozen=True)
class DetectorConfig:
    transform: Transform = field(default_factory=DownUpSample)
    cer_threshold: Optional[float] = None
    transcriber: Transcriber = field(default_factory=MockTranscriber, compare=False)

    def __post_init__(self):
        self.transform.validate()
        if self.cer_threshold is not None and not self.cer_threshold >= 0:
            raise ConfigError("cer_threshold must be >= 0")


def detection_score(audio: AudioBuffer, cfg: DetectorConfig):
    """CER between transcripts of the input and its transformed copy.

    Returns ``(score, is_adversarial)``; the flag is None when no threshold
    is configured.  Exactly two transcriber calls.
    """
    before = cfg.transcriber.transcribe(audio).text
    after = cfg.transcriber.transcribe(transform_audio(audio, cfg.transform)).text
    score = cer(before, after)
    flag = None if cfg.cer_threshold is None else bool(score > cfg.cer_threshold)
    return score, flag


def evaluate_detector(benign, adversarial, cfg: DetectorConfig) -> float:
    benign = list(benign)
    adversarial = list(adversarial)
    if not benign or not adversarial:
        raise UndefinedInputError("detector evaluation needs non-empty benign and adversarial sets")
    b = [detection_score(a, cfg)[0] for a in benign]
    a = [detection_score(x, cfg)[0] for x in adversarial]
    return auc(b, a)
