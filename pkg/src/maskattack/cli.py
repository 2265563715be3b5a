"""Command-line driver: batch attacks, frame probing, detection and report merging.

Config files are flat ``key = value`` text.  Keys are the long flag names
(dashes or underscores), ``#`` and ``;`` start comments, and list-valued keys
(``input``, ``transcriber``, ``benign``, ``adversarial``) take one item per
continuation line.  Values from the command line override the file.
"""
from __future__ import annotations

import argparse
import configparser
import csv
import glob
import json
import logging
import math
import statistics
import sys
import time
import zlib
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path
from typing import Optional

import numpy as np

from .asr import parse_transcriber
from .attack import METHODS, RAISE_POLICIES, AttackConfig, combine, run_attack
from .audio_io import AudioBuffer, read_wav, to_pcm16, write_wav
from .defense import DetectorConfig, detection_score, parse_transform
from .errors import ConfigError, MaskAttackError
from .frame_select import STRATEGIES, select_important, select_random
from .metrics import auc, external_pesq, log_spectral_distance, pareto_front, segmental_snr, success_rate, wer
from .phase_recovery import GriffinLimConfig
from .spectral import WINDOWS, StftConfig, stft

SCHEMA_VERSION = 1
EXIT_OK, EXIT_FAILURES, EXIT_CONFIG = 0, 1, 2

log = logging.getLogger("maskattack")


@dataclass
class RunConfig:
    input: list = field(default_factory=list)
    output_dir: str = "maskattack-out"
    method: str = "OP"
    selection: str = "all"
    seed: int = 0
    k: Optional[int] = None
    manifest: Optional[str] = None
    probe_transcriber: str = "mock"
    transcriber: list = field(default_factory=lambda: ["mock"])
    wer_threshold: float = 0.0
    frame_len: int = 2048
    hop: int = 512
    window: str = "hann"
    gl_iterations: int = 100
    raise_policy: str = "set_exact"
    detector: str = "down_up:8000"
    cer_threshold: Optional[float] = None
    pesq_cmd: Optional[str] = None
    workers: int = 1
    resample: bool = False
    timeout_s: float = 120.0
    retries: int = 0
    api_key_env: Optional[str] = None
    # detect only
    benign: list = field(default_factory=list)
    adversarial: list = field(default_factory=list)

    def validate(self, command: str):
        if self.method not in METHODS:
            raise ConfigError(f"method must be one of {METHODS}")
        if self.selection not in STRATEGIES:
            raise ConfigError(f"selection must be one of {STRATEGIES}")
        if self.raise_policy not in RAISE_POLICIES:
            raise ConfigError(f"raise_policy must be one of {RAISE_POLICIES}")
        if self.window not in WINDOWS:
            raise ConfigError(f"window must be one of {WINDOWS}")
        if self.workers < 1:
            raise ConfigError("workers must be >= 1")
        if self.k is not None and self.k < 0:
            raise ConfigError("k must be >= 0")
        if self.gl_iterations < 1:
            raise ConfigError("gl_iterations must be >= 1")
        if not self.wer_threshold >= 0:
            raise ConfigError("wer_threshold must be >= 0")
        if self.manifest is not None and not Path(self.manifest).is_file():
            raise ConfigError(f"manifest {self.manifest} does not exist")
        if command == "attack":
            if self.selection == "random" and self.k is None and self.manifest is None:
                raise ConfigError("selection=random needs k or a manifest of important frames")
            if not self.transcriber:
                raise ConfigError("at least one evaluation transcriber is required")
        if command == "detect" and self.cer_threshold is None:
            raise ConfigError("detect needs an explicit cer_threshold")
        self.stft_config()

    def stft_config(self) -> StftConfig:
        try:
            return StftConfig(self.frame_len, self.hop, self.window)
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc

    def attack_config(self) -> AttackConfig:
        return AttackConfig(self.method, self.stft_config(), GriffinLimConfig(self.gl_iterations, self.seed),
                            self.raise_policy)

    def transcriber_of(self, spec: str):
        return parse_transcriber(spec, timeout_s=self.timeout_s, retries=self.retries, api_key_env=self.api_key_env)


_LIST_KEYS = {"input", "transcriber", "benign", "adversarial"}
_FIELD_TYPES = {f.name: f for f in fields(RunConfig)}


def _coerce(key: str, raw: str):
    default = getattr(RunConfig(), key)
    if key in _LIST_KEYS:
        return [line.strip() for line in raw.splitlines() if line.strip()]
    if raw.strip().lower() in ("", "none"):
        return None
    if isinstance(default, bool):
        lowered = raw.strip().lower()
        if lowered not in ("1", "0", "true", "false", "yes", "no", "on", "off"):
            raise ConfigError(f"{key}: expected a boolean, got {raw!r}")
        return lowered in ("1", "true", "yes", "on")
    kind = {"seed": int, "k": int, "frame_len": int, "hop": int, "gl_iterations": int, "workers": int,
            "retries": int, "wer_threshold": float, "cer_threshold": float, "timeout_s": float}.get(key, str)
    try:
        return kind(raw.strip())
    except ValueError as exc:
        raise ConfigError(f"{key}: cannot parse {raw!r}") from exc


def load_config_file(path) -> dict:
    parser = configparser.ConfigParser(comment_prefixes=("#", ";"), inline_comment_prefixes=("#",),
                                       interpolation=None, delimiters=("=",))
    try:
        text = Path(path).read_text()
        parser.read_string("[run]\n" + text, source=str(path))
    except (OSError, configparser.Error) as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from exc
    out = {}
    for key, raw in parser["run"].items():
        name = key.replace("-", "_")
        if name not in _FIELD_TYPES:
            raise ConfigError(f"{path}: unknown key {key!r}")
        out[name] = _coerce(name, raw)
    return out


def resolve_inputs(patterns) -> list:
    found = set()
    for pattern in patterns:
        p = Path(pattern)
        if p.is_dir():
            found.update(str(x) for x in p.glob("*.wav"))
        else:
            found.update(glob.glob(pattern, recursive=True))
    return sorted(x for x in found if Path(x).is_file())


def _clean(value):
    """JSON-safe copy: numpy scalars become Python numbers, non-finite floats become strings."""
    if isinstance(value, dict):
        return {str(k): _clean(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_clean(v) for v in value]
    if isinstance(value, np.generic):
        value = value.item()
    if isinstance(value, float) and not math.isfinite(value):
        return "nan" if math.isnan(value) else ("inf" if value > 0 else "-inf")
    return value


def _num(value):
    return float(value) if isinstance(value, str) else value


def strip_timing(obj):
    """Drop every ``*_ms`` key, recursively; what remains must be identical across reruns."""
    if isinstance(obj, dict):
        return {k: strip_timing(v) for k, v in obj.items() if not k.endswith("_ms")}
    if isinstance(obj, list):
        return [strip_timing(v) for v in obj]
    return obj


def write_json(obj, path: Path):
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(_clean(obj), indent=2, sort_keys=True, allow_nan=False) + "\n")


def _seed_for(seed: int, name: str) -> int:
    return int(np.random.SeedSequence([seed, zlib.crc32(name.encode())]).generate_state(1)[0])


def _load_manifest(path) -> dict:
    data = json.loads(Path(path).read_text())
    if data.get("schema_version") != SCHEMA_VERSION or data.get("command") != "probe-frames":
        raise ConfigError(f"{path} is not a probe-frames manifest")
    return {str(Path(e["input"]).resolve()): e for e in data["entries"] if "error" not in e}


def _delivered(audio: AudioBuffer) -> AudioBuffer:
    """The signal as it lands in the 16-bit output file."""
    return AudioBuffer(to_pcm16(audio.samples) / 32768.0, audio.sample_rate_hz)


# ---------------------------------------------------------------------------
# attack
# ---------------------------------------------------------------------------
def _select(cfg: RunConfig, path: str, audio: AudioBuffer, manifest: dict, probe):
    frame_count = cfg.stft_config().frame_count(len(audio))
    entry = manifest.get(str(Path(path).resolve()))
    if cfg.selection == "all":
        return list(range(frame_count)), 0
    if cfg.selection == "random":
        if cfg.k is not None:
            k = cfg.k
        elif entry is not None:
            k = len(entry["important"])
        else:
            raise ConfigError(f"{path}: not in manifest and no k given")
        return list(select_random(frame_count, k, _seed_for(cfg.seed, Path(path).name)).indices), 0
    if entry is not None:
        return [int(i) for i in entry["important"]], 0
    sel = select_important(audio, probe, cfg.stft_config(), cfg.wer_threshold, cfg.workers)
    return list(sel.indices), sel.queries


def _attack_one(cfg: RunConfig, path: str, out_path: Path, manifest, probe, evaluators, detector) -> dict:
    t0 = time.perf_counter()
    audio = read_wav(path, resample=cfg.resample)
    indices, queries = _select(cfg, path, audio, manifest, probe)
    t1 = time.perf_counter()
    result = run_attack(audio, cfg.attack_config())
    adversarial = combine(stft(audio, cfg.stft_config()), result.attacked_spectrogram, indices)
    t2 = time.perf_counter()
    write_wav(adversarial, out_path)
    delivered = _delivered(adversarial)

    baseline, adv_text, wers = {}, {}, {}
    for t in evaluators:
        baseline[t.name] = t.transcribe(audio).text
        adv_text[t.name] = t.transcribe(delivered).text
        wers[t.name] = wer(baseline[t.name], adv_text[t.name])[0]
    pesq = None
    if cfg.pesq_cmd:
        pesq = external_pesq(cfg.pesq_cmd, path, out_path, timeout_s=cfg.timeout_s)
    similarity = {
        "segmental_snr_db": segmental_snr(audio, delivered),
        "log_spectral_distance_db": log_spectral_distance(audio, delivered, cfg.stft_config()),
        "pesq": pesq,
    }
    det = None
    if detector is not None:
        benign_score, _ = detection_score(audio, detector)
        adv_score, flag = detection_score(delivered, detector)
        det = {"benign_score": benign_score, "adversarial_score": adv_score, "flagged": flag}
    t3 = time.perf_counter()
    return {
        "input": path,
        "output": str(out_path),
        "frame_count": cfg.stft_config().frame_count(len(audio)),
        "selection": indices,
        "probe_queries": queries,
        "baseline_transcript": baseline,
        "adversarial_transcript": adv_text,
        "wer": wers,
        "similarity": similarity,
        "detector": det,
        "select_ms": (t1 - t0) * 1000.0,
        "attack_ms": (t2 - t1) * 1000.0,
        "total_ms": (t3 - t0) * 1000.0,
    }


def aggregate(records, transcriber_names) -> dict:
    """Summary statistics over the successful records; recomputable from the records alone."""
    ok = [r for r in records if "error" not in r]
    agg = {"examples": len(records), "failures": len(records) - len(ok), "per_transcriber": {}}
    for name in transcriber_names:
        w = [_num(r["wer"][name]) for r in ok]
        agg["per_transcriber"][name] = {
            "success_rate": success_rate(w) if w else None,
            "mean_wer": float(np.mean(w)) if w else None,
            "median_wer": float(statistics.median(w)) if w else None,
        }
    sims = {}
    for key in ("segmental_snr_db", "log_spectral_distance_db", "pesq"):
        vals = [_num(r["similarity"][key]) for r in ok if r["similarity"][key] is not None]
        sims[key] = float(np.mean(vals)) if vals else None
    agg["mean_similarity"] = sims
    scored = [r["detector"] for r in ok if r["detector"] is not None]
    agg["detector_auc"] = (auc([_num(d["benign_score"]) for d in scored], [_num(d["adversarial_score"]) for d in scored])
                           if scored else None)
    if ok:
        points = []
        for r in ok:
            mean_w = float(np.mean([_num(r["wer"][n]) for n in transcriber_names]))
            sim = r["similarity"]["pesq"]
            points.append((mean_w, _num(sim if sim is not None else r["similarity"]["segmental_snr_db"])))
        pts = np.array(points, dtype=np.float64)
        finite = ~np.isnan(pts).any(axis=1)
        members = pareto_front(pts[finite]) if finite.any() else []
        inputs = [r["input"] for r, keep in zip(ok, finite) if keep]
        agg["pareto_front"] = [inputs[i] for i in members]
    else:
        agg["pareto_front"] = []
    return agg


def _output_paths(inputs, out_dir: Path, cfg: RunConfig) -> list:
    stems = [Path(p).stem for p in inputs]
    if len(set(stems)) != len(stems):
        raise ConfigError("input files must have distinct base names")
    return [out_dir / f"{s}.{cfg.method}.{cfg.selection}.wav" for s in stems]


def _config_record(cfg: RunConfig) -> dict:
    d = asdict(cfg)
    for key in ("benign", "adversarial"):
        d.pop(key)
    return d


def _pool_map(fn, items, workers):
    if workers == 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


def cmd_attack(cfg: RunConfig) -> tuple:
    """Run the full pipeline on every input; returns ``(report, exit_code)``."""
    cfg.validate("attack")
    inputs = resolve_inputs(cfg.input)
    if not inputs:
        raise ConfigError(f"no input files match {cfg.input}")
    out_dir = Path(cfg.output_dir)
    outputs = _output_paths(inputs, out_dir, cfg)
    manifest = _load_manifest(cfg.manifest) if cfg.manifest else {}
    probe = cfg.transcriber_of(cfg.probe_transcriber)
    evaluators = [cfg.transcriber_of(s) for s in cfg.transcriber]
    names = [t.name for t in evaluators]
    if len(set(names)) != len(names):
        raise ConfigError("evaluation transcribers must be distinct")
    detector = None
    if cfg.detector and cfg.detector.lower() != "none":
        detector = DetectorConfig(parse_transform(cfg.detector), cfg.cer_threshold, evaluators[0])
    out_dir.mkdir(parents=True, exist_ok=True)

    def work(pair):
        path, out_path = pair
        try:
            return _attack_one(cfg, path, out_path, manifest, probe, evaluators, detector)
        except (MaskAttackError, OSError, ValueError) as exc:
            log.error("%s: %s", path, exc)
            return {"input": path, "error": f"{type(exc).__name__}: {exc}"}

    t0 = time.perf_counter()
    records = sorted(_pool_map(work, list(zip(inputs, outputs)), cfg.workers), key=lambda r: r["input"])
    report = {
        "schema_version": SCHEMA_VERSION,
        "command": "attack",
        "config": _config_record(cfg),
        "transcribers": names,
        "records": records,
        "aggregates": aggregate(records, names),
        "wall_clock_ms": (time.perf_counter() - t0) * 1000.0,
    }
    write_json(report, out_dir / "report.json")
    write_summary_csv(report, out_dir / "report.csv")
    return report, EXIT_FAILURES if report["aggregates"]["failures"] else EXIT_OK


def write_summary_csv(report: dict, path: Path):
    names = report["transcribers"]
    header = ["input", "output", "selected_frames", "frame_count"] + [f"wer[{n}]" for n in names] + [
        "segmental_snr_db", "log_spectral_distance_db", "pesq", "detector_benign", "detector_adversarial",
        "total_ms", "error"]
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for r in report["records"]:
            if "error" in r:
                writer.writerow([r["input"]] + [""] * (len(header) - 2) + [r["error"]])
                continue
            sim, det = r["similarity"], r["detector"] or {}
            writer.writerow([r["input"], r["output"], len(r["selection"]), r["frame_count"]]
                            + [_clean(r["wer"][n]) for n in names]
                            + [_clean(sim["segmental_snr_db"]), _clean(sim["log_spectral_distance_db"]),
                               sim["pesq"], _clean(det.get("benign_score")), _clean(det.get("adversarial_score")),
                               round(r["total_ms"], 3), ""])


# ---------------------------------------------------------------------------
# probe-frames
# ---------------------------------------------------------------------------
def cmd_probe_frames(cfg: RunConfig, manifest_path: Optional[str] = None) -> tuple:
    cfg.validate("probe-frames")
    inputs = resolve_inputs(cfg.input)
    if not inputs:
        raise ConfigError(f"no input files match {cfg.input}")
    probe = cfg.transcriber_of(cfg.probe_transcriber)
    stft_config = cfg.stft_config()

    def work(path):
        t0 = time.perf_counter()
        try:
            audio = read_wav(path, resample=cfg.resample)
            sel = select_important(audio, probe, stft_config, cfg.wer_threshold, cfg.workers, on_error="record")
        except (MaskAttackError, OSError, ValueError) as exc:
            log.error("%s: %s", path, exc)
            return {"input": path, "error": f"{type(exc).__name__}: {exc}"}
        return {
            "input": path,
            "frame_count": sel.frame_count,
            "queries": sel.queries,
            "baseline_transcript": sel.baseline_text,
            "important": list(sel.indices),
            "wer_per_frame": {str(j): w for j, w in sel.wer_per_frame.items()},
            "failed_frames": {str(j): m for j, m in sel.failed_frames.items()},
            "probe_ms": (time.perf_counter() - t0) * 1000.0,
        }

    entries = sorted(_pool_map(work, inputs, 1), key=lambda e: e["input"])
    manifest = {
        "schema_version": SCHEMA_VERSION,
        "command": "probe-frames",
        "transcriber": probe.name,
        "wer_threshold": cfg.wer_threshold,
        "stft": {"frame_len": cfg.frame_len, "hop": cfg.hop, "window": cfg.window},
        "entries": entries,
    }
    target = Path(manifest_path) if manifest_path else Path(cfg.output_dir) / "manifest.json"
    write_json(manifest, target)
    failed = any("error" in e or e["failed_frames"] for e in entries)
    return manifest, EXIT_FAILURES if failed else EXIT_OK


# ---------------------------------------------------------------------------
# detect
# ---------------------------------------------------------------------------
def cmd_detect(cfg: RunConfig) -> tuple:
    cfg.validate("detect")
    sets = {"benign": resolve_inputs(cfg.benign), "adversarial": resolve_inputs(cfg.adversarial)}
    for label, files in sets.items():
        if not files:
            raise ConfigError(f"no {label} files match {getattr(cfg, label)}")
    transcriber = cfg.transcriber_of(cfg.transcriber[0] if cfg.transcriber else "mock")
    det = DetectorConfig(parse_transform(cfg.detector), cfg.cer_threshold, transcriber)

    def work(item):
        label, path = item
        t0 = time.perf_counter()
        try:
            score, flag = detection_score(read_wav(path, resample=cfg.resample), det)
        except (MaskAttackError, OSError, ValueError) as exc:
            return {"input": path, "set": label, "error": f"{type(exc).__name__}: {exc}"}
        return {"input": path, "set": label, "score": score, "flagged": flag,
                "detect_ms": (time.perf_counter() - t0) * 1000.0}

    items = [(label, p) for label, files in sets.items() for p in files]
    records = sorted(_pool_map(work, items, cfg.workers), key=lambda r: (r["set"], r["input"]))
    ok = [r for r in records if "error" not in r]
    b = [r["score"] for r in ok if r["set"] == "benign"]
    a = [r["score"] for r in ok if r["set"] == "adversarial"]
    report = {
        "schema_version": SCHEMA_VERSION,
        "command": "detect",
        "transcriber": transcriber.name,
        "transform": cfg.detector,
        "cer_threshold": cfg.cer_threshold,
        "records": records,
        "auc": auc(b, a) if a and b else None,
    }
    write_json(report, Path(cfg.output_dir) / "detect.json")
    return report, EXIT_FAILURES if len(ok) != len(records) or report["auc"] is None else EXIT_OK


# ---------------------------------------------------------------------------
# report-merge
# ---------------------------------------------------------------------------
def merge_reports(reports) -> dict:
    """Combine attack reports from sharded runs and recompute the aggregates."""
    if not reports:
        raise ConfigError("nothing to merge")
    first = reports[0]
    for r in reports:
        if r.get("schema_version") != SCHEMA_VERSION or r.get("command") != "attack":
            raise ConfigError("can only merge attack reports of the current schema")
        if r["transcribers"] != first["transcribers"]:
            raise ConfigError("reports use different evaluation transcribers")
        if r["config"]["method"] != first["config"]["method"]:
            raise ConfigError("reports use different attack methods")
    records = sorted((rec for r in reports for rec in r["records"]), key=lambda r: r["input"])
    seen = [r["input"] for r in records]
    if len(set(seen)) != len(seen):
        raise ConfigError("the same input appears in more than one report")
    return {
        "schema_version": SCHEMA_VERSION,
        "command": "attack",
        "config": first["config"],
        "transcribers": first["transcribers"],
        "records": records,
        "aggregates": aggregate(records, first["transcribers"]),
        "merged_from": len(reports),
    }


# ---------------------------------------------------------------------------
# argument parsing
# ---------------------------------------------------------------------------
def _add_common(p):
    p.add_argument("--config", help="flat key = value config file; flags override it")
    p.add_argument("--output-dir")
    p.add_argument("--probe-transcriber", help="mock, cmd:<argv> or an http(s) URL")
    p.add_argument("--transcriber", action="append", help="evaluation transcriber (repeatable)")
    p.add_argument("--frame-len", type=int)
    p.add_argument("--hop", type=int)
    p.add_argument("--window", choices=WINDOWS)
    p.add_argument("--wer-threshold", type=float)
    p.add_argument("--workers", type=int)
    p.add_argument("--resample", action="store_const", const=True, help="resample inputs to 16 kHz")
    p.add_argument("--timeout-s", type=float)
    p.add_argument("--retries", type=int)
    p.add_argument("--api-key-env", help="environment variable holding the HTTP transcriber key")
    p.add_argument("-v", "--verbose", action="store_true")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="maskattack", description="Psychoacoustic-masking attacks on ASR systems.")
    sub = parser.add_subparsers(dest="command", required=True)

    a = sub.add_parser("attack", help="generate adversarial audio and a report")
    a.add_argument("--input", action="append", help="WAV file, directory or glob (repeatable)")
    a.add_argument("--method", choices=METHODS)
    a.add_argument("--selection", choices=STRATEGIES)
    a.add_argument("--seed", type=int)
    a.add_argument("--k", type=int, help="frame count for random selection")
    a.add_argument("--manifest", help="probe-frames manifest to reuse")
    a.add_argument("--gl-iterations", type=int)
    a.add_argument("--raise-policy", choices=RAISE_POLICIES)
    a.add_argument("--detector", help="down_up[:rate], quantize[:bits], median[:width] or none")
    a.add_argument("--cer-threshold", type=float)
    a.add_argument("--pesq-cmd", help="external tool run as CMD ref.wav deg.wav, printing a score")
    _add_common(a)

    p = sub.add_parser("probe-frames", help="find important frames and write a manifest")
    p.add_argument("--input", action="append")
    p.add_argument("--manifest-out", help="manifest path (default OUTPUT_DIR/manifest.json)")
    _add_common(p)

    d = sub.add_parser("detect", help="score benign and adversarial sets with the detector")
    d.add_argument("--benign", action="append")
    d.add_argument("--adversarial", action="append")
    d.add_argument("--detector", help="down_up[:rate], quantize[:bits] or median[:width]")
    d.add_argument("--cer-threshold", type=float)
    _add_common(d)

    m = sub.add_parser("report-merge", help="merge attack reports and recompute aggregates")
    m.add_argument("reports", nargs="+")
    m.add_argument("--output", required=True)
    m.add_argument("-v", "--verbose", action="store_true")
    return parser


def config_from_args(args) -> RunConfig:
    values = load_config_file(args.config) if getattr(args, "config", None) else {}
    for name in _FIELD_TYPES:
        v = getattr(args, name, None)
        if v is not None:
            values[name] = v
    return RunConfig(**values)


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        if args.command == "report-merge":
            reports = [json.loads(Path(p).read_text()) for p in args.reports]
            merged = merge_reports(reports)
            write_json(merged, Path(args.output))
            return EXIT_FAILURES if merged["aggregates"]["failures"] else EXIT_OK
        cfg = config_from_args(args)
        if args.command == "attack":
            _, code = cmd_attack(cfg)
        elif args.command == "probe-frames":
            _, code = cmd_probe_frames(cfg, args.manifest_out)
        else:
            _, code = cmd_detect(cfg)
        return code
    except ConfigError as exc:
        print(f"maskattack: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (OSError, json.JSONDecodeError, KeyError) as exc:
        print(f"maskattack: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
