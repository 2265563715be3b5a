"""WAV reading/writing and the in-memory mono audio buffer."""
from __future__ import annotations

import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy.io import wavfile

from .errors import SampleRateMismatchError, UnsupportedCodecError, WavFormatError, WavWriteError

PIPELINE_RATE_HZ = 16000

_WAVE_FORMAT_PCM = 0x0001
_WAVE_FORMAT_IEEE_FLOAT = 0x0003
_WAVE_FORMAT_EXTENSIBLE = 0xFFFE


@dataclass(eq=False)
class AudioBuffer:
    """Mono float samples in [-1, 1] plus their sample rate."""

    samples: np.ndarray
    sample_rate_hz: int = PIPELINE_RATE_HZ

    def __post_init__(self):
        self.samples = np.ascontiguousarray(self.samples, dtype=np.float64).reshape(-1)
        self.sample_rate_hz = int(self.sample_rate_hz)
        if self.sample_rate_hz <= 0:
            raise ValueError(f"sample rate must be positive, got {self.sample_rate_hz}")
        if self.samples.size and not np.all(np.isfinite(self.samples)):
            raise ValueError("samples must be finite")
        if self.samples.size and np.max(np.abs(self.samples)) > 1.0:
            raise ValueError("samples must lie in [-1, 1]")

    def __len__(self):
        return self.samples.shape[0]

    @property
    def duration_s(self) -> float:
        return len(self) / self.sample_rate_hz

    def copy(self) -> "AudioBuffer":
        return AudioBuffer(self.samples.copy(), self.sample_rate_hz)


def _format_tag(path: Path) -> int:
    """Return the WAVE format tag, validating the RIFF container on the way."""
    with open(path, "rb") as fh:
        head = fh.read(12)
        if len(head) < 12 or head[:4] != b"RIFF" or head[8:12] != b"WAVE":
            raise WavFormatError(f"{path}: not a RIFF/WAVE file")
        while True:
            chunk = fh.read(8)
            if len(chunk) < 8:
                raise WavFormatError(f"{path}: no fmt chunk")
            cid, size = struct.unpack("<4sI", chunk)
            if cid != b"fmt ":
                fh.seek(size + (size & 1), 1)
                continue
            body = fh.read(size)
            if len(body) < 16:
                raise WavFormatError(f"{path}: truncated fmt chunk")
            tag = struct.unpack("<H", body[:2])[0]
            if tag == _WAVE_FORMAT_EXTENSIBLE:
                if len(body) < 26:
                    raise WavFormatError(f"{path}: truncated extensible fmt chunk")
                tag = struct.unpack("<H", body[24:26])[0]
            return tag


def _to_float(data: np.ndarray) -> np.ndarray:
    if data.dtype == np.int16:
        return data.astype(np.float64) / 32768.0
    if data.dtype == np.int32:
        return data.astype(np.float64) / 2147483648.0
    if data.dtype == np.uint8:
        return (data.astype(np.float64) - 128.0) / 128.0
    if data.dtype in (np.float32, np.float64):
        return np.clip(data.astype(np.float64), -1.0, 1.0)
    raise UnsupportedCodecError(f"unsupported sample type {data.dtype}")


def read_wav(path, *, resample: bool = False, target_rate_hz: int = PIPELINE_RATE_HZ) -> AudioBuffer:
    """Read a PCM or IEEE-float WAV file into a mono AudioBuffer.

    Multi-channel files are averaged to mono.  A sample rate other than
    ``target_rate_hz`` raises ``SampleRateMismatchError`` unless ``resample``
    is set, in which case the signal is linearly resampled.
    """
    path = Path(path)
    if not path.is_file():
        raise FileNotFoundError(path)
    tag = _format_tag(path)
    if tag not in (_WAVE_FORMAT_PCM, _WAVE_FORMAT_IEEE_FLOAT):
        raise UnsupportedCodecError(f"{path}: unsupported WAVE format tag 0x{tag:04x}")
    try:
        rate, data = wavfile.read(path)
    except ValueError as exc:
        raise WavFormatError(f"{path}: {exc}") from exc
    samples = _to_float(data)
    if samples.ndim == 2:
        samples = samples.mean(axis=1)
    audio = AudioBuffer(samples, rate)
    if rate != target_rate_hz:
        if not resample:
            raise SampleRateMismatchError(f"{path}: sample rate {rate} Hz, expected {target_rate_hz} Hz")
        audio = resample_linear(audio, target_rate_hz)
    return audio


def to_pcm16(samples: np.ndarray) -> np.ndarray:
    scaled = np.round(np.clip(samples, -1.0, 1.0) * 32768.0)
    return np.clip(scaled, -32768, 32767).astype(np.int16)


def write_wav(audio: AudioBuffer, path) -> None:
    """Write ``audio`` as 16-bit PCM mono (values saturate at full scale).

    ``path`` may also be a writable binary file object.
    """
    target = Path(path) if isinstance(path, (str, Path)) else path
    try:
        wavfile.write(target, audio.sample_rate_hz, to_pcm16(audio.samples))
    except OSError as exc:
        raise WavWriteError(f"cannot write {path}: {exc}") from exc


def resample_linear(audio: AudioBuffer, target_rate_hz: int) -> AudioBuffer:
    if target_rate_hz <= 0:
        raise ValueError("target rate must be positive")
    src = audio.sample_rate_hz
    if target_rate_hz == src:
        return audio.copy()
    n_out = int(round(len(audio) * target_rate_hz / src))
    if len(audio) == 0 or n_out == 0:
        return AudioBuffer(np.zeros(n_out), target_rate_hz)
    pos = np.arange(n_out) * (src / target_rate_hz)
    out = np.interp(pos, np.arange(len(audio)), audio.samples)
    return AudioBuffer(out, target_rate_hz)
