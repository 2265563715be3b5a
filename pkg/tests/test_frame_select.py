import math
import threading

import numpy as np
import pytest

from maskattack.asr import MockTranscriber, Transcriber
from maskattack.audio_io import AudioBuffer
from maskattack.errors import FrameProbeError, SelectionError, TranscriberStatusError
from maskattack.frame_select import FrameSelection, select_all, select_important, select_random
from maskattack.synth import speech_like


class CountingMock(MockTranscriber):
    """Mock that counts calls and tracks peak concurrency."""

    def __init__(self, max_concurrency=None, fail_on=None):
        super().__init__()
        self.max_concurrency = max_concurrency
        self.calls = 0
        self.active = 0
        self.peak = 0
        self.fail_on = fail_on
        self._lock = threading.Lock()

    def _transcribe_raw(self, audio):
        with self._lock:
            self.calls += 1
            call = self.calls
            self.active += 1
            self.peak = max(self.peak, self.active)
        try:
            if self.fail_on is not None and call == self.fail_on:
                raise TranscriberStatusError("boom", status=500)
            return super()._transcribe_raw(audio)
        finally:
            with self._lock:
                self.active -= 1


def test_select_all():
    assert select_all(28).indices == tuple(range(28))
    assert select_all(0).indices == ()


def test_select_random_edges():
    assert select_random(28, 28, 1).indices == select_all(28).indices
    assert select_random(28, 0, 1).indices == ()
    assert select_random(28, 7, 3) == select_random(28, 7, 3)
    sel = select_random(28, 7, 3).indices
    assert list(sel) == sorted(set(sel))
    with pytest.raises(SelectionError):
        select_random(5, 6, 0)


def test_select_random_uniform():
    n, k, trials = 28, 7, 1000
    counts = np.zeros(n)
    for seed in range(trials):
        counts[list(select_random(n, k, seed).indices)] += 1
    p = k / n
    sigma = math.sqrt(trials * p * (1 - p))
    assert np.all(np.abs(counts - trials * p) <= 5 * sigma)


def test_selection_invariants():
    with pytest.raises(SelectionError):
        FrameSelection((3, 1), "all", 5)
    with pytest.raises(SelectionError):
        FrameSelection((1, 1), "all", 5)
    with pytest.raises(SelectionError):
        FrameSelection((5,), "all", 5)


def test_important_on_fixture():
    t = CountingMock()
    sel = select_important(speech_like(0), t)
    assert sel.indices == (25, 26, 27)
    assert t.calls == sel.queries == 34
    assert sel.wer_per_frame[26] == pytest.approx(1 / 7)
    assert sel.transcriber_name == "mock"


def test_important_silent_and_infinite_threshold():
    assert select_important(AudioBuffer(np.zeros(16000)), MockTranscriber()).indices == ()
    assert select_important(speech_like(2), MockTranscriber(), wer_threshold=math.inf).indices == ()


def test_important_parallel_matches_serial():
    serial = select_important(speech_like(2), MockTranscriber())
    t = CountingMock(max_concurrency=3)
    parallel = select_important(speech_like(2), t, workers=8)
    assert parallel == serial
    assert t.peak <= 3 and t.calls == 34


def test_important_failure_carries_frame():
    with pytest.raises(FrameProbeError) as err:
        select_important(speech_like(0), CountingMock(fail_on=6))
    assert err.value.frame_index == 4
    with pytest.raises(FrameProbeError) as err:
        select_important(speech_like(0), CountingMock(fail_on=1))
    assert err.value.frame_index is None


def test_important_records_failures():
    t = CountingMock(fail_on=28)
    sel = select_important(speech_like(0), t, on_error="record")
    assert list(sel.failed_frames) == [26]
    assert sel.indices == (25, 27)
    assert t.calls == sel.queries == 34


def test_threshold_validation():
    with pytest.raises(SelectionError):
        select_important(speech_like(0), MockTranscriber(), wer_threshold=-1)


def test_transcriber_base_is_abstract():
    with pytest.raises(NotImplementedError):
        Transcriber().transcribe(speech_like(0))
