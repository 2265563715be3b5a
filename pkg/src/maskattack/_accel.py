"""Hot numeric kernels with a numba path and a pure-numpy fallback.

Set ``MASKATTACK_DISABLE_NUMBA=1`` (or run without numba installed) to use
the numpy implementations.  Both variants are importable under explicit
names (``*_numba`` / ``*_numpy``) so tests and the benchmark can compare them.
"""
import os

import numpy as np

_DISABLE = os.environ.get("MASKATTACK_DISABLE_NUMBA", "").strip().lower() in ("1", "true", "yes", "on")

try:
    import numba

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    HAVE_NUMBA = False

USING_NUMBA = HAVE_NUMBA and not _DISABLE


def _njit(func):
    if not HAVE_NUMBA:
        return func
    return numba.njit(cache=True, nogil=True)(func)


# ---------------------------------------------------------------------------
# overlap-add
# ---------------------------------------------------------------------------
def _overlap_add_loop(frames, window, hop, out_len):
    n_frames, n = frames.shape
    out = np.zeros(out_len)
    wsum = np.zeros(out_len)
    for f in range(n_frames):
        start = f * hop
        for i in range(n):
            w = window[i]
            out[start + i] += frames[f, i] * w
            wsum[start + i] += w * w
    return out, wsum


overlap_add_numba = _njit(_overlap_add_loop)


def overlap_add_numpy(frames, window, hop, out_len):
    n_frames, n = frames.shape
    out = np.zeros(out_len)
    wsum = np.zeros(out_len)
    w2 = window * window
    weighted = frames * window
    for f in range(n_frames):
        sl = slice(f * hop, f * hop + n)
        out[sl] += weighted[f]
        wsum[sl] += w2
    return out, wsum


# ---------------------------------------------------------------------------
# masker detection
# ---------------------------------------------------------------------------
def _masker_mask_loop(psd, ath, lo, hi):
    n_frames, n_bins = psd.shape
    out = np.zeros((n_frames, n_bins), dtype=np.bool_)
    for f in range(n_frames):
        row = psd[f]
        for k in range(n_bins):
            p = row[k]
            if not p > ath[k]:
                continue
            ok = True
            for j in range(lo[k], k):
                if row[j] >= p:
                    ok = False
                    break
            if ok:
                for j in range(k + 1, hi[k] + 1):
                    if row[j] > p:
                        ok = False
                        break
            out[f, k] = ok
    return out


masker_mask_numba = _njit(_masker_mask_loop)


def masker_mask_numpy(psd, ath, lo, hi):
    n_frames, n_bins = psd.shape
    k = np.arange(n_bins)
    out = psd > ath[None, :]
    reach = int(max((k - lo).max(initial=0), (hi - k).max(initial=0)))
    for d in range(1, reach + 1):
        # lower-index neighbours must be strictly smaller
        cols = k[(k - d >= lo)]
        out[:, cols] &= psd[:, cols - d] < psd[:, cols]
        # higher-index neighbours may tie
        cols = k[(k + d <= hi)]
        out[:, cols] &= psd[:, cols + d] <= psd[:, cols]
    return out


# ---------------------------------------------------------------------------
# global masking threshold
# ---------------------------------------------------------------------------
_DB_TO_LN_POWER = np.log(10.0) / 10.0


def _global_threshold_loop(psd, masks, bark, ath):
    n_frames, n_bins = psd.shape
    out = np.empty((n_frames, n_bins))
    base = np.empty(n_bins)
    for k in range(n_bins):
        base[k] = 10.0 ** (ath[k] / 10.0)
    acc = np.empty(n_bins)
    for f in range(n_frames):
        for k in range(n_bins):
            acc[k] = base[k]
        any_masker = False
        for m in range(n_bins):
            if not masks[f, m]:
                continue
            any_masker = True
            level = psd[f, m]
            bm = bark[m]
            offset = level - 6.025 - 0.275 * bm
            fall = -27.0 + 0.37 * max(level - 40.0, 0.0)
            for k in range(n_bins):
                dz = bark[k] - bm
                if dz < 0.0:
                    t = offset + 27.0 * dz
                else:
                    t = offset + fall * dz
                acc[k] += np.exp(t * _DB_TO_LN_POWER)
        for k in range(n_bins):
            # no maskers: theta is the ATH itself, not its power-sum round trip
            out[f, k] = 10.0 * np.log10(acc[k]) if any_masker else ath[k]
    return out


global_threshold_numba = _njit(_global_threshold_loop)


def global_threshold_numpy(psd, masks, bark, ath):
    n_frames, n_bins = psd.shape
    out = np.empty((n_frames, n_bins))
    base = 10.0 ** (ath / 10.0)
    for f in range(n_frames):
        idx = np.flatnonzero(masks[f])
        if idx.size == 0:
            out[f] = ath
            continue
        level = psd[f, idx][:, None]
        bm = bark[idx][:, None]
        dz = bark[None, :] - bm
        fall = -27.0 + 0.37 * np.maximum(level - 40.0, 0.0)
        spread = np.where(dz < 0.0, 27.0 * dz, fall * dz)
        t = level - 6.025 - 0.275 * bm + spread
        out[f] = 10.0 * np.log10(base + (10.0 ** (t / 10.0)).sum(axis=0))
    return out


# ---------------------------------------------------------------------------
# edit distance with operation breakdown
# ---------------------------------------------------------------------------
def _backtrace(table, ref, hyp):
    i = ref.shape[0]
    j = hyp.shape[0]
    ins = 0
    sub = 0
    dele = 0
    while i > 0 or j > 0:
        if i > 0 and j > 0:
            cost = 0 if ref[i - 1] == hyp[j - 1] else 1
            if table[i, j] == table[i - 1, j - 1] + cost:
                sub += cost
                i -= 1
                j -= 1
                continue
        if i > 0 and table[i, j] == table[i - 1, j] + 1:
            dele += 1
            i -= 1
        else:
            ins += 1
            j -= 1
    return ins, sub, dele


_backtrace_numba = _njit(_backtrace)


def _edit_ops_loop(ref, hyp):
    n = ref.shape[0]
    m = hyp.shape[0]
    table = np.empty((n + 1, m + 1), dtype=np.int64)
    for j in range(m + 1):
        table[0, j] = j
    for i in range(1, n + 1):
        table[i, 0] = i
        for j in range(1, m + 1):
            cost = 0 if ref[i - 1] == hyp[j - 1] else 1
            best = table[i - 1, j - 1] + cost
            if table[i - 1, j] + 1 < best:
                best = table[i - 1, j] + 1
            if table[i, j - 1] + 1 < best:
                best = table[i, j - 1] + 1
            table[i, j] = best
    ins, sub, dele = _backtrace_numba(table, ref, hyp)
    return ins, sub, dele


edit_ops_numba = _njit(_edit_ops_loop)


def edit_ops_numpy(ref, hyp):
    n = ref.shape[0]
    m = hyp.shape[0]
    table = np.empty((n + 1, m + 1), dtype=np.int64)
    cols = np.arange(m + 1)
    table[0] = cols
    for i in range(1, n + 1):
        prev = table[i - 1]
        cand = np.empty(m + 1, dtype=np.int64)
        cand[0] = i
        cand[1:] = np.minimum(prev[1:] + 1, prev[:-1] + (hyp != ref[i - 1]))
        # insertions chain left to right: row[j] = min_{l<=j} cand[l] + (j - l)
        table[i] = np.minimum.accumulate(cand - cols) + cols
    return _backtrace(table, ref, hyp)


if USING_NUMBA:
    overlap_add = overlap_add_numba
    masker_mask = masker_mask_numba
    global_threshold = global_threshold_numba
    edit_ops = edit_ops_numba
else:
    overlap_add = overlap_add_numpy
    masker_mask = masker_mask_numpy
    global_threshold = global_threshold_numpy
    edit_ops = edit_ops_numpy
