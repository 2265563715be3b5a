"""Griffin-Lim phase estimation for a fixed target magnitude."""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass

import numpy as np

from .audio_io import PIPELINE_RATE_HZ, AudioBuffer
from .errors import DimensionError
from .spectral import StftConfig, _frame_signal, istft_samples

INIT_MODES = ("random_phase", "zero_phase", "provided_phase")


@dataclass(frozen=True)
class GriffinLimConfig:
    iterations: int = 100
    rng_seed: int = 0
    init: str = "random_phase"

    def __post_init__(self):
        if self.iterations < 0:
            raise ValueError("iterations must be >= 0")
        if self.init not in INIT_MODES:
            raise ValueError(f"init must be one of {INIT_MODES}")


def _analyze(samples, config):
    return np.fft.rfft(_frame_signal(samples, config) * config.window_array, axis=1)


def spectral_convergence(samples: np.ndarray, magnitude: np.ndarray, config: StftConfig) -> float:
    """||  |STFT(x)| - M || / ||M||  (0 when M is all zero)."""
    denom = np.linalg.norm(magnitude)
    diff = np.linalg.norm(np.abs(_analyze(samples, config)) - magnitude)
    return float(diff / denom) if denom > 0 else float(diff)


def iterate_griffin_lim(magnitude, config: StftConfig, gl: GriffinLimConfig, original_len: int, phase=None):
    """Yield ``(signal, phase_factors)`` after initialization and after every iteration.

    ``signal`` is the unclamped ISTFT of ``magnitude * phase_factors``.  The
    first pair comes from the initial phase; ``gl.iterations`` more follow.
    Each step re-analyses the previous signal, keeps its phase and restores
    the target magnitude.
    """
    magnitude = np.asarray(magnitude, dtype=np.float64)
    if magnitude.ndim != 2 or magnitude.shape[1] != config.n_bins:
        raise DimensionError(f"magnitude must have shape (F, {config.n_bins}), got {magnitude.shape}")
    if magnitude.shape[0] != config.frame_count(original_len):
        raise DimensionError(
            f"{magnitude.shape[0]} frames do not match {original_len} samples "
            f"({config.frame_count(original_len)} frames expected)"
        )
    if np.any(magnitude < 0):
        raise ValueError("magnitude must be non-negative")

    if gl.init == "random_phase":
        rng = np.random.default_rng(gl.rng_seed)
        angles = np.exp(1j * rng.uniform(-np.pi, np.pi, size=magnitude.shape))
    elif gl.init == "zero_phase":
        angles = np.ones(magnitude.shape, dtype=np.complex128)
    else:
        if phase is None:
            raise ValueError("init='provided_phase' needs a phase array")
        phase = np.asarray(phase)
        if phase.shape != magnitude.shape:
            raise DimensionError("phase and magnitude shapes differ")
        angles = np.exp(1j * phase)

    x = istft_samples(magnitude * angles, config, original_len)
    yield x, angles
    for _ in range(gl.iterations):
        rebuilt = _analyze(x, config)
        angles = np.exp(1j * np.angle(rebuilt))
        x = istft_samples(magnitude * angles, config, original_len)
        yield x, angles


def griffin_lim_phase(magnitude, config: StftConfig, gl: GriffinLimConfig, original_len: int, phase=None):
    """Run Griffin-Lim; return the final unclamped signal and the unit phase factors behind it."""
    return deque(iterate_griffin_lim(magnitude, config, gl, original_len, phase), maxlen=1)[0]


def griffin_lim(
    target_magnitude,
    stft_config: StftConfig = StftConfig(),
    gl_config: GriffinLimConfig = GriffinLimConfig(),
    *,
    original_len: int,
    sample_rate_hz: int = PIPELINE_RATE_HZ,
    phase=None,
) -> AudioBuffer:
    x, _ = griffin_lim_phase(target_magnitude, stft_config, gl_config, original_len, phase)
    return AudioBuffer(np.clip(x, -1.0, 1.0), sample_rate_hz)
