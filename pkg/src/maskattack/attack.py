"""Attack generation (GL, OP, DE) and frame splicing."""
from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from .audio_io import AudioBuffer
from .errors import DimensionError, SelectionError
from .phase_recovery import GriffinLimConfig, griffin_lim_phase
from .psychoacoustics import BinGeometry, MaskingAnalysis, global_thresholds, masker_peaks, masker_support
from .spectral import PsdFrame, Spectrogram, StftConfig, amplitudes_from_psd, istft, psd_of_frames, stft

METHODS = ("GL", "OP", "DE")
RAISE_POLICIES = ("set_exact", "raise_only")


@dataclass(frozen=True)
class AttackConfig:
    method: str = "OP"
    stft: StftConfig = field(default_factory=StftConfig)
    gl: GriffinLimConfig = field(default_factory=GriffinLimConfig)
    raise_policy: str = "set_exact"

    def __post_init__(self):
        if self.method not in METHODS:
            raise ValueError(f"method must be one of {METHODS}, got {self.method!r}")
        if self.raise_policy not in RAISE_POLICIES:
            raise ValueError(f"raise_policy must be one of {RAISE_POLICIES}")


@dataclass(eq=False)
class AttackResult:
    adversarial_audio: AudioBuffer
    attacked_spectrogram: Spectrogram
    per_frame_modified_bins: list
    # diagnostics, (F, K) arrays in the original frames' normalized PSD domain
    masker_mask: np.ndarray = None
    threshold_db: np.ndarray = None
    norm_offsets_db: np.ndarray = None


def _raise_levels(psd_db, threshold_db, maskees, policy):
    if policy == "set_exact":
        target = threshold_db
    elif policy == "raise_only":
        target = np.maximum(psd_db, threshold_db)
    else:
        raise ValueError(f"unknown raise policy {policy!r}")
    return np.where(maskees, target, psd_db)


def manipulate_frame_raise(psd: PsdFrame, analysis: MaskingAnalysis, policy: str = "set_exact") -> PsdFrame:
    """Move every maskee bin to the global masking threshold; masker bins are left as they are."""
    maskees = np.zeros(psd.psd_db.shape, dtype=bool)
    maskees[analysis.maskee_bins] = True
    new = _raise_levels(psd.psd_db, analysis.global_threshold_db, maskees, policy)
    return PsdFrame(new, psd.norm_offset_db, psd.frame_len, psd.bin_freqs_hz)


def _masking_pass(spec: Spectrogram, with_threshold: bool):
    n = spec.config.frame_len
    psd, offsets = psd_of_frames(spec.frames, n)
    geom = BinGeometry(spec.config.bin_freqs(spec.sample_rate_hz))
    peaks = masker_peaks(psd, geom)
    support = masker_support(peaks)
    theta = global_thresholds(psd, peaks, geom) if with_threshold else None
    return psd, offsets, support, theta


def _raised_magnitudes(spec: Spectrogram, cfg: AttackConfig):
    psd, offsets, support, theta = _masking_pass(spec, with_threshold=True)
    new_psd = _raise_levels(psd, theta, ~support, cfg.raise_policy)
    modified = ~support & (new_psd != psd)
    magnitude = np.abs(spec.frames)
    magnitude = np.where(modified, amplitudes_from_psd(new_psd, offsets, spec.config.frame_len), magnitude)
    return magnitude, modified, support, theta, offsets


def _modified_lists(modified):
    return [np.flatnonzero(row) for row in modified]


def attack_op(audio: AudioBuffer, cfg: AttackConfig = AttackConfig()) -> AttackResult:
    """Raise maskees to the threshold and resynthesize with the original phase."""
    spec = stft(audio, cfg.stft)
    magnitude, modified, support, theta, offsets = _raised_magnitudes(spec, cfg)
    unit = np.exp(1j * np.angle(spec.frames))
    frames = np.where(modified, magnitude * unit, spec.frames)
    attacked = spec.with_frames(frames)
    return AttackResult(istft(attacked), attacked, _modified_lists(modified), support, theta, offsets)


def attack_gl(audio: AudioBuffer, cfg: AttackConfig = AttackConfig(method="GL")) -> AttackResult:
    """Same magnitude manipulation as OP; the phase is re-estimated with Griffin-Lim."""
    spec = stft(audio, cfg.stft)
    magnitude, modified, support, theta, offsets = _raised_magnitudes(spec, cfg)
    x, unit = griffin_lim_phase(magnitude, cfg.stft, cfg.gl, len(audio))
    attacked = spec.with_frames(magnitude * unit)
    out = AudioBuffer(np.clip(x, -1.0, 1.0), audio.sample_rate_hz)
    return AttackResult(out, attacked, _modified_lists(modified), support, theta, offsets)


def attack_de(audio: AudioBuffer, cfg: AttackConfig = AttackConfig(method="DE")) -> AttackResult:
    """Keep only masker bins (original complex values); zero everything else.

    No masking threshold is computed.
    """
    spec = stft(audio, cfg.stft)
    psd, offsets, support, _ = _masking_pass(spec, with_threshold=False)
    frames = np.where(support, spec.frames, 0.0)
    modified = ~support & (spec.frames != 0)
    attacked = spec.with_frames(frames)
    return AttackResult(istft(attacked), attacked, _modified_lists(modified), support, None, offsets)


_DISPATCH = {"GL": attack_gl, "OP": attack_op, "DE": attack_de}


def run_attack(audio: AudioBuffer, cfg: AttackConfig) -> AttackResult:
    return _DISPATCH[cfg.method](audio, cfg)


def with_method(cfg: AttackConfig, method: str) -> AttackConfig:
    return replace(cfg, method=method)


def splice(original: Spectrogram, attacked: Spectrogram, selected_frames) -> Spectrogram:
    if original.config != attacked.config or original.frames.shape != attacked.frames.shape:
        raise DimensionError("spectrograms differ in configuration or frame count")
    idx = np.asarray(sorted(set(int(i) for i in selected_frames)), dtype=np.int64)
    if idx.size and (idx[0] < 0 or idx[-1] >= original.frame_count):
        raise SelectionError(f"frame index out of range [0, {original.frame_count})")
    frames = original.frames.copy()
    frames[idx] = attacked.frames[idx]
    return original.with_frames(frames)


def combine(original: Spectrogram, attacked: Spectrogram, selected_frames) -> AudioBuffer:
    """Take the selected frames from ``attacked`` and the rest from ``original``, then invert once."""
    return istft(splice(original, attacked, selected_frames))
