"""Black-box audio adversarial examples built from psychoacoustic masking."""
from ._accel import USING_NUMBA
from .asr import CommandTranscriber, HttpTranscriber, MockTranscriber, Transcriber, parse_transcriber
from .attack import AttackConfig, AttackResult, attack_de, attack_gl, attack_op, combine, run_attack, splice
from .audio_io import AudioBuffer, read_wav, resample_linear, write_wav
from .defense import DetectorConfig, DownUpSample, MedianFilter, QuantizeDequantize, detection_score, evaluate_detector
from .frame_select import FrameSelection, select_all, select_important, select_random
from .metrics import auc, cer, pareto_front, segmental_snr, log_spectral_distance, success_rate, wer
from .phase_recovery import GriffinLimConfig, griffin_lim
from .psychoacoustics import analyze_frame, ath, bark, find_maskers, masking_threshold
from .spectral import Spectrogram, StftConfig, istft, psd_of_frame, amplitude_from_psd, stft

__version__ = "0.1.0"
