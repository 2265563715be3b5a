"""Transcription error rates, similarity proxies, Pareto front and AUC."""
from __future__ import annotations

import math
import shlex
import subprocess
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.stats import rankdata

from . import _accel
from .audio_io import AudioBuffer
from .errors import DimensionError, UndefinedInputError
from .spectral import StftConfig, raw_psd_db, stft

SEGMENT_LEN = 512
SEG_SNR_MIN_DB = -10.0
SEG_SNR_MAX_DB = 35.0
PESQ_RANGE = (-0.5, 4.5)
PESQ_GOOD = 3.0


@dataclass(frozen=True)
class EditBreakdown:
    insertions: int
    substitutions: int
    deletions: int
    ref_len: int

    @property
    def errors(self) -> int:
        return self.insertions + self.substitutions + self.deletions


@dataclass(frozen=True)
class SimilarityScores:
    segmental_snr_db: float
    log_spectral_distance_db: float
    external_pesq: Optional[float] = None

    def __post_init__(self):
        if not self.log_spectral_distance_db >= 0:
            raise ValueError("log spectral distance must be >= 0")
        if self.external_pesq is not None and not PESQ_RANGE[0] <= self.external_pesq <= PESQ_RANGE[1]:
            raise ValueError(f"PESQ {self.external_pesq} outside {PESQ_RANGE}")

    @property
    def good_quality(self) -> Optional[bool]:
        """PESQ above 3.0; None when no PESQ score is available."""
        return None if self.external_pesq is None else self.external_pesq > PESQ_GOOD


def _encode(ref_tokens, hyp_tokens):
    vocab = {}
    ref = np.array([vocab.setdefault(t, len(vocab)) for t in ref_tokens], dtype=np.int64)
    hyp = np.array([vocab.setdefault(t, len(vocab)) for t in hyp_tokens], dtype=np.int64)
    return ref, hyp


def edit_breakdown(ref_tokens, hyp_tokens) -> EditBreakdown:
    ref, hyp = _encode(ref_tokens, hyp_tokens)
    ins, sub, dele = _accel.edit_ops(ref, hyp)
    return EditBreakdown(int(ins), int(sub), int(dele), len(ref))


def _rate(bd: EditBreakdown) -> float:
    if bd.ref_len == 0:
        return 0.0 if bd.errors == 0 else math.inf
    return bd.errors / bd.ref_len


def wer(reference: str, hypothesis: str):
    """Word error rate and its breakdown.

    An empty reference gives 0.0 against an empty hypothesis and ``inf``
    otherwise.
    """
    bd = edit_breakdown(reference.split(), hypothesis.split())
    return _rate(bd), bd


def cer(reference: str, hypothesis: str) -> float:
    return _rate(edit_breakdown(list(reference), list(hypothesis)))


def success_rate(wers) -> float:
    wers = list(wers)
    if not wers:
        raise UndefinedInputError("success rate of an empty sequence")
    return sum(1 for w in wers if w > 0) / len(wers)


def _check_pair(original: AudioBuffer, adversarial: AudioBuffer):
    if len(original) != len(adversarial) or original.sample_rate_hz != adversarial.sample_rate_hz:
        raise DimensionError("signals differ in length or sample rate")


def segmental_snr(original: AudioBuffer, adversarial: AudioBuffer, *, clamp: bool = True) -> float:
    """Mean per-segment SNR over 512-sample segments; silent reference segments are skipped."""
    _check_pair(original, adversarial)
    n_seg = len(original) // SEGMENT_LEN
    if n_seg == 0:
        return math.nan
    o = original.samples[: n_seg * SEGMENT_LEN].reshape(n_seg, SEGMENT_LEN)
    e = o - adversarial.samples[: n_seg * SEGMENT_LEN].reshape(n_seg, SEGMENT_LEN)
    sig = (o * o).sum(axis=1)
    noise = (e * e).sum(axis=1)
    keep = sig >= 1e-10
    if not keep.any():
        return math.nan
    with np.errstate(divide="ignore"):
        snr = 10.0 * np.log10(sig[keep] / noise[keep])
    if clamp:
        snr = np.clip(snr, SEG_SNR_MIN_DB, SEG_SNR_MAX_DB)
    elif np.isinf(snr).any():
        return math.inf
    return float(snr.mean())


def log_spectral_distance(original: AudioBuffer, adversarial: AudioBuffer,
                          config: StftConfig = StftConfig()) -> float:
    """RMS over all frames and bins of the log-magnitude difference (dB)."""
    _check_pair(original, adversarial)
    if len(original) < config.hop:
        return 0.0 if np.array_equal(original.samples, adversarial.samples) else math.nan
    n = config.frame_len
    a = raw_psd_db(np.abs(stft(original, config).frames), n)
    b = raw_psd_db(np.abs(stft(adversarial, config).frames), n)
    return float(np.sqrt(np.mean((a - b) ** 2)))


def external_pesq(command, reference_wav, degraded_wav, timeout_s: float = 120.0) -> float:
    """Run a user-supplied PESQ tool as ``command ref.wav deg.wav`` and parse one float from stdout."""
    argv = shlex.split(command) if isinstance(command, str) else list(command)
    proc = subprocess.run(argv + [str(reference_wav), str(degraded_wav)], capture_output=True, text=True,
                          timeout=timeout_s, check=False)
    if proc.returncode != 0:
        raise RuntimeError(f"PESQ tool exited with {proc.returncode}: {proc.stderr.strip()}")
    value = float(proc.stdout.strip().split()[-1])
    if not PESQ_RANGE[0] <= value <= PESQ_RANGE[1]:
        raise ValueError(f"PESQ tool returned {value}, outside {PESQ_RANGE}")
    return value


def pareto_front(points) -> list:
    """Indices of points not dominated when maximizing both coordinates.

    Identical points do not dominate each other, so duplicates on the front
    are all kept.
    """
    pts = np.asarray(points, dtype=np.float64).reshape(-1, 2)
    if pts.shape[0] == 0:
        raise UndefinedInputError("Pareto front of an empty set")
    order = np.lexsort((-pts[:, 1], -pts[:, 0]))
    front = []
    best_sim = -math.inf
    i = 0
    while i < order.size:
        x = pts[order[i], 0]
        j = i
        while j < order.size and pts[order[j], 0] == x:
            j += 1
        group = order[i:j]
        top = pts[group[0], 1]
        if top > best_sim:
            front.extend(int(g) for g in group if pts[g, 1] == top)
            best_sim = top
        i = j
    return sorted(front)


def auc(benign_scores, adversarial_scores) -> float:
    """Mann-Whitney AUC: P(adv > benign) + 0.5 * P(tie)."""
    b = np.asarray(benign_scores, dtype=np.float64).ravel()
    a = np.asarray(adversarial_scores, dtype=np.float64).ravel()
    if a.size == 0 or b.size == 0:
        raise UndefinedInputError("AUC needs at least one benign and one adversarial score")
    ranks = rankdata(np.concatenate([a, b]))
    u = ranks[: a.size].sum() - a.size * (a.size + 1) / 2.0
    return float(u / (a.size * b.size))
