"""Choosing which STFT frames the attack perturbs: all, random or important."""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .asr import Transcriber
from .audio_io import AudioBuffer
from .errors import FrameProbeError, MaskAttackError, SelectionError
from .metrics import wer
from .spectral import Spectrogram, StftConfig, istft, stft

STRATEGIES = ("all", "random", "important")


@dataclass(frozen=True)
class FrameSelection:
    indices: tuple
    strategy: str
    frame_count: int
    wer_per_frame: Optional[dict] = None
    # transcriber calls spent producing this selection
    queries: int = 0
    transcriber_name: Optional[str] = None
    baseline_text: Optional[str] = field(default=None, compare=False)
    # frame -> error message, filled only when probing with on_error="record"
    failed_frames: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.strategy not in STRATEGIES:
            raise SelectionError(f"unknown strategy {self.strategy!r}")
        idx = tuple(int(i) for i in self.indices)
        if list(idx) != sorted(set(idx)):
            raise SelectionError("indices must be strictly increasing")
        if idx and (idx[0] < 0 or idx[-1] >= self.frame_count):
            raise SelectionError(f"frame index out of range [0, {self.frame_count})")
        object.__setattr__(self, "indices", idx)

    def __len__(self):
        return len(self.indices)


def select_all(frame_count: int) -> FrameSelection:
    if frame_count < 0:
        raise SelectionError("frame_count must be >= 0")
    return FrameSelection(tuple(range(frame_count)), "all", frame_count)


def select_random(frame_count: int, k: int, seed: int) -> FrameSelection:
    """``k`` distinct frames drawn uniformly without replacement, reproducible per seed."""
    if frame_count < 0 or k < 0:
        raise SelectionError("frame_count and k must be >= 0")
    if k > frame_count:
        raise SelectionError(f"cannot pick {k} frames out of {frame_count}")
    rng = np.random.default_rng(seed)
    picked = np.sort(rng.choice(frame_count, size=k, replace=False))
    return FrameSelection(tuple(int(i) for i in picked), "random", frame_count)


def _zeroed(spec: Spectrogram, j: int) -> AudioBuffer:
    frames = spec.frames.copy()
    frames[j] = 0.0
    return istft(spec.with_frames(frames))


def _pool_size(transcriber: Transcriber, workers: int) -> int:
    limit = transcriber.max_concurrency
    return max(1, workers if limit is None else min(workers, limit))


def select_important(audio: AudioBuffer, transcriber: Transcriber, stft_config: StftConfig = StftConfig(),
                     wer_threshold: float = 0.0, workers: int = 1, on_error: str = "raise") -> FrameSelection:
    """Probe each frame by silencing it and keep the ones that change the transcript.

    Costs exactly ``frame_count + 1`` transcriber calls: one baseline, then one
    per frame.  A frame is important when the WER of its probe against the
    baseline exceeds ``wer_threshold``.

    With ``on_error="raise"`` the first failing probe raises
    ``FrameProbeError``.  With ``"record"`` failed frames are listed in
    ``failed_frames`` and never selected.  A failing baseline always raises.
    """
    if on_error not in ("raise", "record"):
        raise ValueError("on_error must be 'raise' or 'record'")
    if not wer_threshold >= 0:
        raise SelectionError("wer_threshold must be >= 0")
    spec = stft(audio, stft_config)
    try:
        baseline = transcriber.transcribe(audio).text
    except MaskAttackError as exc:
        raise FrameProbeError(None, exc) from exc

    def probe(j):
        try:
            text = transcriber.transcribe(_zeroed(spec, j)).text
        except MaskAttackError as exc:
            if on_error == "raise":
                raise FrameProbeError(j, exc) from exc
            return exc
        return wer(baseline, text)[0]

    frames = range(spec.frame_count)
    n_workers = _pool_size(transcriber, workers)
    if n_workers == 1:
        rates = [probe(j) for j in frames]
    else:
        with ThreadPoolExecutor(max_workers=n_workers) as pool:
            rates = list(pool.map(probe, frames))
    failed = {j: str(r) for j, r in zip(frames, rates) if isinstance(r, Exception)}
    per_frame = {j: float(r) for j, r in zip(frames, rates) if j not in failed}
    chosen = tuple(j for j, r in per_frame.items() if r > wer_threshold)
    return FrameSelection(chosen, "important", spec.frame_count, per_frame, spec.frame_count + 1,
                          transcriber.name, baseline, failed)
