"""Black-box transcribers: deterministic mock, external command, HTTP endpoint.

Every transcriber returns canonical text (lowercase, punctuation removed,
single spaces) so error rates are comparable across back ends.
"""
from __future__ import annotations

import io
import os
import re
import shlex
import subprocess
import tempfile
import time
import unicodedata
import urllib.error
import urllib.request
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

import numpy as np

from .audio_io import PIPELINE_RATE_HZ, AudioBuffer, write_wav
from .errors import ConfigError, TranscriberStatusError, TranscriberTimeoutError, TranscriberTransportError
from .spectral import StftConfig, stft

_SPACE = re.compile(r"\s+")


def canonicalize(text: str) -> str:
    kept = "".join(ch for ch in text if not unicodedata.category(ch).startswith("P"))
    return _SPACE.sub(" ", kept.lower()).strip()


@dataclass(frozen=True)
class TranscriptionResult:
    text: str
    latency_ms: float
    transcriber_name: str


class Transcriber:
    """Base class; subclasses implement ``_transcribe_raw``.

    ``max_concurrency`` of ``None`` means unbounded.
    """

    name = "transcriber"
    max_concurrency: Optional[int] = 1
    supports_rate_hz = PIPELINE_RATE_HZ
    retries = 0

    def _transcribe_raw(self, audio: AudioBuffer) -> str:
        raise NotImplementedError

    def transcribe(self, audio: AudioBuffer) -> TranscriptionResult:
        t0 = time.perf_counter()
        attempt = 0
        while True:
            try:
                raw = self._transcribe_raw(audio)
                break
            except (TranscriberTransportError, TranscriberTimeoutError, TranscriberStatusError):
                if attempt >= self.retries:
                    raise
                attempt += 1
        return TranscriptionResult(canonicalize(raw), (time.perf_counter() - t0) * 1000.0, self.name)

    def describe(self) -> dict:
        return {"name": self.name, "max_concurrency": self.max_concurrency, "supports_rate_hz": self.supports_rate_hz}


MOCK_VOCABULARY = (
    "alpha", "bravo", "charlie", "delta", "echo", "foxtrot", "golf", "hotel",
    "india", "juliet", "kilo", "lima", "mike", "november", "oscar", "papa",
)
# bands 0-1, 1-2, 2-4, 4-8 kHz (the top band runs to Nyquist)
MOCK_BAND_EDGES_HZ = (1000.0, 2000.0, 4000.0)
MOCK_RMS_THRESHOLD = 1e-4
# bands more than 60 dB below the frame total count as empty, so window
# leakage and float residue never flip a bit
MOCK_RELATIVE_FLOOR = 1e-6


class MockTranscriber(Transcriber):
    """Offline stand-in for an ASR.

    Each STFT frame with RMS above 1e-4 is reduced to four band energies
    (0-1, 1-2, 2-4, 4-8 kHz).  A band's bit is set when its energy exceeds the
    frame's median band energy; the 4-bit code indexes a fixed 16-word
    vocabulary.  Silent frames emit nothing and runs of the same word collapse.
    """

    name = "mock"
    max_concurrency = None

    def __init__(self, stft_config: StftConfig = StftConfig()):
        self.stft_config = stft_config

    def frame_codes(self, audio: AudioBuffer) -> np.ndarray:
        """Per-frame vocabulary index, or -1 for a silent frame."""
        if len(audio) < self.stft_config.hop:
            return np.zeros(0, dtype=np.int64)
        spec = stft(audio, self.stft_config)
        n = self.stft_config.frame_len
        power = np.abs(spec.frames) ** 2
        # Parseval over the one-sided spectrum gives the windowed frame energy
        weights = np.full(power.shape[1], 2.0)
        weights[0] = 1.0
        weights[-1] = 1.0
        frame_energy = (power * weights).sum(axis=1) / n
        rms = np.sqrt(frame_energy / n)
        freqs = self.stft_config.bin_freqs(audio.sample_rate_hz)
        band_of_bin = np.searchsorted(MOCK_BAND_EDGES_HZ, freqs, side="right")
        onehot = band_of_bin[:, None] == np.arange(len(MOCK_BAND_EDGES_HZ) + 1)[None, :]
        bands = power @ onehot
        total = bands.sum(axis=1, keepdims=True)
        bands = np.where(bands > MOCK_RELATIVE_FLOOR * total, bands, 0.0)
        median = np.median(bands, axis=1, keepdims=True)
        bits = bands > median
        codes = (bits * (1 << np.arange(4))).sum(axis=1)
        return np.where(rms > MOCK_RMS_THRESHOLD, codes, -1)

    def _transcribe_raw(self, audio: AudioBuffer) -> str:
        words = []
        for code in self.frame_codes(audio):
            if code < 0:
                continue
            word = MOCK_VOCABULARY[code]
            if not words or words[-1] != word:
                words.append(word)
        return " ".join(words)


def _wav_bytes(audio: AudioBuffer) -> bytes:
    buf = io.BytesIO()
    write_wav(audio, buf)
    return buf.getvalue()


class CommandTranscriber(Transcriber):
    """Runs ``argv + [wav_path]`` and reads the transcript from stdout."""

    def __init__(self, argv, *, name: Optional[str] = None, timeout_s: float = 120.0, retries: int = 0,
                 max_concurrency: int = 1):
        self.argv = shlex.split(argv) if isinstance(argv, str) else list(argv)
        if not self.argv:
            raise ConfigError("empty command for CommandTranscriber")
        self.name = name or f"cmd:{Path(self.argv[0]).name}"
        self.timeout_s = timeout_s
        self.retries = retries
        self.max_concurrency = max_concurrency

    def _transcribe_raw(self, audio: AudioBuffer) -> str:
        with tempfile.TemporaryDirectory(prefix="maskattack-") as tmp:
            path = Path(tmp) / "input.wav"
            write_wav(audio, path)
            try:
                proc = subprocess.run(self.argv + [str(path)], capture_output=True, text=True,
                                      timeout=self.timeout_s, check=False)
            except subprocess.TimeoutExpired as exc:
                raise TranscriberTimeoutError(f"{self.name}: timed out after {self.timeout_s}s") from exc
            except OSError as exc:
                raise TranscriberTransportError(f"{self.name}: cannot run {self.argv[0]}: {exc}") from exc
        if proc.returncode != 0:
            raise TranscriberStatusError(f"{self.name}: exit status {proc.returncode}: {proc.stderr.strip()}",
                                         status=proc.returncode)
        return proc.stdout


class HttpTranscriber(Transcriber):
    """POSTs the WAV bytes (``audio/wav``) and reads a plain-text transcript.

    When ``api_key_env`` names an environment variable, its value is sent
    verbatim in the ``auth_header`` header.
    """

    def __init__(self, url: str, *, name: Optional[str] = None, api_key_env: Optional[str] = None,
                 auth_header: str = "Authorization", timeout_s: float = 120.0, retries: int = 0,
                 max_concurrency: int = 4):
        self.url = url
        self.name = name or f"http:{url}"
        self.api_key_env = api_key_env
        self.auth_header = auth_header
        self.timeout_s = timeout_s
        self.retries = retries
        self.max_concurrency = max_concurrency

    def _transcribe_raw(self, audio: AudioBuffer) -> str:
        headers = {"Content-Type": "audio/wav"}
        if self.api_key_env:
            key = os.environ.get(self.api_key_env)
            if key is None:
                raise ConfigError(f"environment variable {self.api_key_env} is not set")
            headers[self.auth_header] = key
        req = urllib.request.Request(self.url, data=_wav_bytes(audio), headers=headers, method="POST")
        try:
            with urllib.request.urlopen(req, timeout=self.timeout_s) as resp:
                body = resp.read()
                charset = resp.headers.get_content_charset() or "utf-8"
        except urllib.error.HTTPError as exc:
            raise TranscriberStatusError(f"{self.name}: HTTP {exc.code}", status=exc.code) from exc
        except TimeoutError as exc:
            raise TranscriberTimeoutError(f"{self.name}: timed out after {self.timeout_s}s") from exc
        except urllib.error.URLError as exc:
            if isinstance(exc.reason, TimeoutError):
                raise TranscriberTimeoutError(f"{self.name}: timed out after {self.timeout_s}s") from exc
            raise TranscriberTransportError(f"{self.name}: {exc.reason}") from exc
        except OSError as exc:
            raise TranscriberTransportError(f"{self.name}: {exc}") from exc
        return body.decode(charset, errors="replace")


def parse_transcriber(spec: str, *, timeout_s: float = 120.0, retries: int = 0,
                      api_key_env: Optional[str] = None) -> Transcriber:
    """Build a transcriber from ``mock``, ``cmd:<command line>`` or ``http(s)://...``."""
    spec = spec.strip()
    if spec == "mock":
        return MockTranscriber()
    if spec.startswith("cmd:"):
        return CommandTranscriber(spec[4:], timeout_s=timeout_s, retries=retries)
    if spec.startswith("http:") and not spec.startswith("http://"):
        spec = spec[5:]
    if spec.startswith(("http://", "https://")):
        return HttpTranscriber(spec, api_key_env=api_key_env, timeout_s=timeout_s, retries=retries)
    raise ConfigError(f"unrecognized transcriber spec {spec!r} (use mock, cmd:<argv>, or an http(s) URL)")
