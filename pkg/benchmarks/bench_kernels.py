"""Time the numba kernels against their numpy fallbacks on realistic inputs.

    python benchmarks/bench_kernels.py [--repeat N]

Each kernel is called once before timing so JIT compilation is excluded.
Outputs are compared as a sanity check.
"""
import argparse
import timeit

import numpy as np

from maskattack import _accel
from maskattack.psychoacoustics import BinGeometry, masker_peaks
from maskattack.spectral import StftConfig, psd_of_frames, stft
from maskattack.synth import speech_like


def cases():
    cfg = StftConfig()
    geom = BinGeometry(cfg.bin_freqs())
    spec = stft(speech_like(0, duration_s=4.0), cfg)
    psd, _ = psd_of_frames(spec.frames, cfg.frame_len)
    peaks = masker_peaks(psd, geom)
    time_frames = np.ascontiguousarray(np.fft.irfft(spec.frames, n=cfg.frame_len, axis=1))
    out_len = cfg.frame_len + (spec.frame_count - 1) * cfg.hop
    rng = np.random.default_rng(0)
    ref = rng.integers(0, 16, size=60)
    hyp = rng.integers(0, 16, size=55)
    return {
        "overlap_add": (time_frames, cfg.window_array, cfg.hop, out_len),
        "masker_mask": (psd, geom.ath, geom.lo, geom.hi),
        "global_threshold": (psd, peaks, geom.barks, geom.ath),
        "edit_ops": (ref, hyp),
    }


def _same(a, b):
    if isinstance(a, tuple):
        return all(_same(x, y) for x, y in zip(a, b))
    return np.allclose(a, b, rtol=1e-12, atol=1e-9)


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=20)
    args = parser.parse_args()
    if not _accel.HAVE_NUMBA:
        raise SystemExit("numba is not installed; nothing to compare")
    print(f"{'kernel':18s} {'numba ms':>10s} {'numpy ms':>10s} {'speed-up':>9s}  match")
    for name, call_args in cases().items():
        fast = getattr(_accel, f"{name}_numba")
        slow = getattr(_accel, f"{name}_numpy")
        match = _same(fast(*call_args), slow(*call_args))
        t_fast = min(timeit.repeat(lambda: fast(*call_args), number=1, repeat=args.repeat)) * 1e3
        t_slow = min(timeit.repeat(lambda: slow(*call_args), number=1, repeat=args.repeat)) * 1e3
        print(f"{name:18s} {t_fast:10.3f} {t_slow:10.3f} {t_slow / t_fast:8.1f}x  {match}")


if __name__ == "__main__":
    main()
