import json
import sys

import pytest

from maskattack.audio_io import write_wav
from maskattack.cli import EXIT_CONFIG, EXIT_FAILURES, EXIT_OK, aggregate, main, strip_timing
from maskattack.synth import speech_like


@pytest.fixture
def inputs(tmp_path):
    d = tmp_path / "in"
    d.mkdir()
    for s in range(3):
        write_wav(speech_like(s), d / f"clip{s}.wav")
    return d


def _report(out):
    return json.loads((out / "report.json").read_text())


def test_single_de_all(inputs, tmp_path):
    out = tmp_path / "out"
    code = main(["attack", "--input", str(inputs / "clip0.wav"), "--output-dir", str(out), "--method", "DE"])
    assert code == EXIT_OK
    r = _report(out)
    assert r["schema_version"] == 1 and len(r["records"]) == 1
    rec = r["records"][0]
    assert rec["selection"] == list(range(33))
    assert (out / "clip0.DE.all.wav").is_file() and (out / "report.csv").is_file()
    for key in ("baseline_transcript", "adversarial_transcript", "wer", "similarity", "detector", "total_ms"):
        assert rec[key] is not None
    assert r["aggregates"]["per_transcriber"]["mock"]["success_rate"] in (0.0, 1.0)
    assert r["aggregates"]["pareto_front"] == [rec["input"]]


def test_aggregates_recompute_from_records(inputs, tmp_path):
    out = tmp_path / "out"
    main(["attack", "--input", str(inputs), "--output-dir", str(out), "--method", "OP"])
    r = _report(out)
    assert json.loads(json.dumps(aggregate(r["records"], r["transcribers"]))) == r["aggregates"]


def test_random_selection_reproducible(inputs, tmp_path):
    args = ["attack", "--input", str(inputs), "--method", "DE", "--selection", "random", "--k", "5", "--seed", "7"]
    main(args + ["--output-dir", str(tmp_path / "a")])
    main(args + ["--output-dir", str(tmp_path / "b")])
    sa = [r["selection"] for r in _report(tmp_path / "a")["records"]]
    sb = [r["selection"] for r in _report(tmp_path / "b")["records"]]
    assert sa == sb and all(len(s) == 5 for s in sa)


def test_random_needs_k(inputs, tmp_path):
    code = main(["attack", "--input", str(inputs), "--selection", "random", "--output-dir", str(tmp_path / "o")])
    assert code == EXIT_CONFIG


def test_empty_glob(tmp_path):
    out = tmp_path / "o"
    assert main(["attack", "--input", str(tmp_path / "nothing*.wav"), "--output-dir", str(out)]) == EXIT_CONFIG
    assert not (out / "report.json").exists()


def test_bad_config_values(inputs, tmp_path):
    assert main(["attack", "--input", str(inputs), "--hop", "700", "--output-dir", str(tmp_path)]) == EXIT_CONFIG
    cfg = tmp_path / "run.cfg"
    cfg.write_text("bogus_key = 1\n")
    assert main(["attack", "--config", str(cfg)]) == EXIT_CONFIG


def test_config_file_and_flag_override(inputs, tmp_path):
    cfg = tmp_path / "run.cfg"
    out = tmp_path / "from-file"
    cfg.write_text(
        "# flat key = value\n"
        f"input =\n    {inputs / 'clip0.wav'}\n    {inputs / 'clip1.wav'}\n"
        f"output-dir = {out}\n"
        "method = OP\n"
        "selection = random\n"
        "k = 4\n"
        "detector = none\n"
    )
    assert main(["attack", "--config", str(cfg), "--method", "DE"]) == EXIT_OK
    r = _report(out)
    assert r["config"]["method"] == "DE" and r["config"]["k"] == 4
    assert len(r["records"]) == 2 and r["records"][0]["detector"] is None
    assert r["aggregates"]["detector_auc"] is None


def test_failures_recorded(inputs, tmp_path):
    (inputs / "broken.wav").write_bytes(b"garbage")
    out = tmp_path / "out"
    assert main(["attack", "--input", str(inputs), "--output-dir", str(out), "--method", "DE"]) == EXIT_FAILURES
    r = _report(out)
    bad = [x for x in r["records"] if "error" in x]
    assert len(bad) == 1 and bad[0]["input"].endswith("broken.wav")
    assert r["aggregates"]["failures"] == 1 and r["aggregates"]["examples"] == 4


def test_transcriber_failure_recorded(inputs, tmp_path):
    script = tmp_path / "fail.py"
    script.write_text("import sys\nsys.exit(2)\n")
    out = tmp_path / "out"
    code = main(["attack", "--input", str(inputs / "clip0.wav"), "--output-dir", str(out), "--method", "DE",
                 "--transcriber", f"cmd:{sys.executable} {script}"])
    assert code == EXIT_FAILURES
    assert "TranscriberStatusError" in _report(out)["records"][0]["error"]


def test_probe_manifest_and_reuse(inputs, tmp_path):
    manifest = tmp_path / "manifest.json"
    assert main(["probe-frames", "--input", str(inputs), "--manifest-out", str(manifest)]) == EXIT_OK
    m = json.loads(manifest.read_text())
    assert [e["queries"] for e in m["entries"]] == [e["frame_count"] + 1 for e in m["entries"]]
    assert m["entries"][0]["important"] == [25, 26, 27]

    out = tmp_path / "imp"
    main(["attack", "--input", str(inputs), "--selection", "important", "--manifest", str(manifest),
          "--method", "DE", "--output-dir", str(out)])
    recs = _report(out)["records"]
    assert [r["selection"] for r in recs] == [e["important"] for e in m["entries"]]
    assert all(r["probe_queries"] == 0 for r in recs)

    out = tmp_path / "rnd"
    main(["attack", "--input", str(inputs), "--selection", "random", "--manifest", str(manifest),
          "--method", "DE", "--output-dir", str(out)])
    recs = _report(out)["records"]
    assert [len(r["selection"]) for r in recs] == [len(e["important"]) for e in m["entries"]]


def test_probe_inline_counts_queries(inputs, tmp_path):
    out = tmp_path / "out"
    main(["attack", "--input", str(inputs / "clip0.wav"), "--selection", "important", "--method", "DE",
          "--output-dir", str(out)])
    rec = _report(out)["records"][0]
    assert rec["probe_queries"] == 34 and rec["selection"] == [25, 26, 27]


def test_detect(inputs, tmp_path):
    adv = tmp_path / "adv"
    main(["attack", "--input", str(inputs), "--method", "DE", "--output-dir", str(adv)])
    out = tmp_path / "det"
    base = ["detect", "--benign", str(inputs), "--adversarial", str(adv / "*.wav"), "--output-dir", str(out)]
    assert main(base) == EXIT_CONFIG  # threshold is mandatory here
    assert main(base + ["--cer-threshold", "0.1"]) == EXIT_OK
    r = json.loads((out / "detect.json").read_text())
    assert 0.0 <= r["auc"] <= 1.0 and len(r["records"]) == 6
    assert all(isinstance(x["flagged"], bool) for x in r["records"])


def test_report_merge(inputs, tmp_path):
    whole, a, b = tmp_path / "whole", tmp_path / "a", tmp_path / "b"
    common = ["--method", "DE"]
    main(["attack", "--input", str(inputs), "--output-dir", str(whole)] + common)
    main(["attack", "--input", str(inputs / "clip0.wav"), "--output-dir", str(a)] + common)
    main(["attack", "--input", str(inputs / "clip[12].wav"), "--output-dir", str(b)] + common)
    merged = tmp_path / "merged.json"
    assert main(["report-merge", str(a / "report.json"), str(b / "report.json"), "--output", str(merged)]) == EXIT_OK
    m = json.loads(merged.read_text())
    w = _report(whole)
    assert m["aggregates"] == w["aggregates"]
    assert [r["input"] for r in m["records"]] == [r["input"] for r in w["records"]]
    assert main(["report-merge", str(a / "report.json"), str(a / "report.json"), "--output", str(merged)]) \
        == EXIT_CONFIG


def test_workers_do_not_change_report(inputs, tmp_path):
    main(["attack", "--input", str(inputs), "--method", "OP", "--output-dir", str(tmp_path / "one")])
    main(["attack", "--input", str(inputs), "--method", "OP", "--workers", "3", "--output-dir", str(tmp_path / "w")])
    a = strip_timing(_report(tmp_path / "one"))
    b = strip_timing(_report(tmp_path / "w"))
    for r in (a, b):
        r["config"].pop("workers"), r["config"].pop("output_dir")
        for rec in r["records"]:
            rec.pop("output")
    assert a == b
