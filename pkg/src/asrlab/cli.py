"""Single executable exposing every capability as a subcommand.

Exit codes: 0 on success, 2 on validation problems (bad flags, missing or
malformed inputs), 1 on internal failures. Every report embeds the tool
version, the resolved configuration, and the master seed, so a rerun with the
same inputs produces byte-identical output.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys

import numpy as np

from . import __version__
from .audio import AudioBuffer, read_wav, write_wav
from .config import load_config, resolve
from .curation import (
    ManifestParseError,
    ManifestRecord,
    PipelineConfig,
    read_manifest,
    run_pipeline,
    write_manifest,
    write_rejection_csv,
)
from .entities import align_entities, pn_score, read_entity_file
from .metrics import EvalRow, build_report, wer
from .noise import SweepSpec, run_sweep, write_sweep_csv
from .planner import ScalingAssumptions, optimal_hours
from .stitch import PartialTranscript, energy_vad, plan_chunks, remove_silences, stitch
from .textnorm import DEFAULT_RULES, load_rules, normalize, tokenize_words
from .transducer import random_lattice, rnnt_logprob, brute_force_logprob, rnnt_grad
from .transducer.loss import finite_difference_grad

__all__ = ["main", "ValidationError"]


class ValidationError(Exception):
    """Input or configuration problem; maps to exit code 2."""


def _require_file(path: str, what: str) -> str:
    if not os.path.isfile(path):
        raise ValidationError(f"{what} not found: {path}")
    return path


def _header(seed: int | None, resolved: dict) -> list[str]:
    lines = [f"asrlab {__version__}"]
    if seed is not None:
        lines.append(f"seed={seed}")
    lines.append("config=" + json.dumps(resolved, sort_keys=True, default=str))
    return lines


def _load_rules(path: str | None):
    if path is None:
        return DEFAULT_RULES
    return load_rules(_require_file(path, "rule file"))


def _read_tsv(path: str) -> dict[str, str]:
    out: dict[str, str] = {}
    with open(path, encoding="utf-8") as fh:
        for line_no, raw in enumerate(fh, start=1):
            line = raw.rstrip("\n")
            if not line.strip():
                continue
            if "\t" not in line:
                raise ValidationError(f"{path}:{line_no}: expected id<TAB>text")
            file_id, text = line.split("\t", 1)
            out[file_id] = text
    return out


def _records_or_die(path: str) -> list[ManifestRecord]:
    entries = read_manifest(_require_file(path, "manifest"))
    bad = [e for e in entries if isinstance(e, ManifestParseError)]
    if bad:
        detail = "; ".join(f"{e.id}: {e.error}" for e in bad[:3])
        raise ValidationError(f"manifest {path} has {len(bad)} malformed line(s): {detail}")
    return entries  # type: ignore[return-value]


def _out_stream(path: str | None):
    if path is None:
        return sys.stdout
    return open(path, "w", encoding="utf-8", newline="")


# --- subcommands -----------------------------------------------------------


def cmd_plan_data(args: argparse.Namespace) -> int:
    cfg = load_config(args.config) if args.config else {}
    wpm = resolve(cfg, "planner.wpm", args.wpm, 120.0, float)
    tpw = resolve(cfg, "planner.tpw", args.tpw, 4.0 / 3.0, float)
    tpp = resolve(cfg, "planner.tpp", args.tpp, 20.0, float)
    try:
        assumptions = ScalingAssumptions(wpm=wpm, tpw=tpw, tpp=tpp)
        hours = optimal_hours(args.params, assumptions)
    except ValueError as exc:
        raise ValidationError(f"planner: {exc}") from exc
    print(f"params={args.params}")
    print(f"hours={hours:.6f}")
    print(f"hours_rounded={round(hours)}")
    return 0


def cmd_evaluate(args: argparse.Namespace) -> int:
    cfg = load_config(args.config) if args.config else {}
    seed = resolve(cfg, "seed", args.seed, 0, int)
    rules = _load_rules(resolve(cfg, "norm.rules", args.rules, None))
    threshold = resolve(cfg, "entities.sim_threshold", args.sim_threshold, 0.5, float)
    records = _records_or_die(args.manifest)
    refs = _read_tsv(_require_file(args.refs, "refs file")) if args.refs else {
        r.id: r.transcript for r in records
    }
    hyps = _read_tsv(_require_file(args.hyps, "hyps file"))

    gold_entities = read_entity_file(_require_file(args.gold_entities, "gold entities")) if args.gold_entities else None
    pred_entities = read_entity_file(_require_file(args.pred_entities, "pred entities")) if args.pred_entities else None
    if (gold_entities is None) != (pred_entities is None):
        raise ValidationError("evaluate: --gold-entities and --pred-entities must be given together")

    rows = []
    for rec in records:
        if rec.id not in hyps:
            raise ValidationError(f"evaluate: no hypothesis for file id {rec.id!r}")
        if rec.id not in refs:
            raise ValidationError(f"evaluate: no reference for file id {rec.id!r}")
        ref = tokenize_words(normalize(refs[rec.id], rules))
        hyp = tokenize_words(normalize(hyps[rec.id], rules))
        if not ref:
            raise ValidationError(f"evaluate: reference for {rec.id!r} is empty after normalization")
        row = EvalRow(rec.id, rec.duration_sec, wer(ref, hyp))
        if gold_entities is not None:
            align = align_entities(
                gold_entities.get(rec.id, []), pred_entities.get(rec.id, []), threshold
            )
            row.pn_jaro = pn_score(align, "jaro_distance")
            row.pn_wer = pn_score(align, "pair_wer")
        rows.append(row)

    report = build_report(rows)
    resolved = {
        "manifest": args.manifest,
        "refs": args.refs or "(manifest transcripts)",
        "hyps": args.hyps,
        "rules": args.rules or "(default)",
        "sim_threshold": threshold,
        "entities": bool(gold_entities),
    }
    out = _out_stream(args.out)
    try:
        for line in _header(seed, resolved):
            out.write(f"# {line}\n")
        writer = csv.writer(out)
        writer.writerow(["file_id", "audio_sec", "wer", "pn_jaro", "pn_wer"])

        def fmt(v):
            return "n/a" if v is None else f"{v:.6f}"

        for row in report.rows:
            writer.writerow([row.file_id, f"{row.audio_sec:g}", f"{row.wer:.6f}", fmt(row.pn_jaro), fmt(row.pn_wer)])
        agg = report.aggregates
        writer.writerow(["AGGREGATE", "", fmt(agg["wer"]), fmt(agg["pn_jaro"]), fmt(agg["pn_wer"])])
    finally:
        if out is not sys.stdout:
            out.close()
    return 0


def cmd_ppn_score(args: argparse.Namespace) -> int:
    cfg = load_config(args.config) if args.config else {}
    seed = resolve(cfg, "seed", args.seed, 0, int)
    threshold = resolve(cfg, "entities.sim_threshold", args.sim_threshold, 0.5, float)
    gold = read_entity_file(_require_file(args.gold_entities, "gold entities"))
    pred = read_entity_file(_require_file(args.pred_entities, "pred entities"))
    durations: dict[str, float] = {}
    if args.manifest:
        durations = {r.id: r.duration_sec for r in _records_or_die(args.manifest)}

    file_ids = sorted(set(gold) | set(pred))
    rows = []
    for file_id in file_ids:
        align = align_entities(gold.get(file_id, []), pred.get(file_id, []), threshold)
        rows.append(
            EvalRow(
                file_id,
                durations.get(file_id, 1.0),  # equal weights without a manifest
                0.0,
                pn_score(align, "jaro_distance"),
                pn_score(align, "pair_wer"),
            )
        )
    report = build_report(rows)
    resolved = {
        "gold_entities": args.gold_entities,
        "pred_entities": args.pred_entities,
        "manifest": args.manifest or "(none: equal weights)",
        "sim_threshold": threshold,
    }
    out = _out_stream(args.out)
    try:
        for line in _header(seed, resolved):
            out.write(f"# {line}\n")
        writer = csv.writer(out)
        writer.writerow(["file_id", "weight_sec", "pn_jaro", "pn_wer"])

        def fmt(v):
            return "n/a" if v is None else f"{v:.6f}"

        for row in report.rows:
            writer.writerow([row.file_id, f"{row.audio_sec:g}", fmt(row.pn_jaro), fmt(row.pn_wer)])
        writer.writerow(["AGGREGATE", "", fmt(report.aggregates["pn_jaro"]), fmt(report.aggregates["pn_wer"])])
    finally:
        if out is not sys.stdout:
            out.close()
    return 0


def _pipeline_config(cfg: dict[str, str], args: argparse.Namespace) -> PipelineConfig:
    def flag(name):
        return getattr(args, name, None)

    blocklist_raw = resolve(cfg, "curation.blocklist", flag("blocklist"), "")
    blocklist = [p for p in blocklist_raw.split(";;") if p] if isinstance(blocklist_raw, str) else blocklist_raw
    try:
        return PipelineConfig(
            wpm_min=resolve(cfg, "curation.wpm_min", flag("wpm_min"), 50.0, float),
            wpm_max=resolve(cfg, "curation.wpm_max", flag("wpm_max"), 250.0, float),
            conf_threshold=resolve(cfg, "curation.conf_threshold", flag("conf_threshold"), 0.8, float),
            min_speech_ratio=resolve(cfg, "curation.min_speech_ratio", flag("min_speech_ratio"), 0.70, float),
            max_silence_sec=resolve(cfg, "curation.max_silence_sec", flag("max_silence_sec"), 5.0, float),
            seg_min_sec=resolve(cfg, "curation.seg_min_sec", flag("seg_min_sec"), 7.0, float),
            seg_max_sec=resolve(cfg, "curation.seg_max_sec", flag("seg_max_sec"), 20.0, float),
            lang_conf_min=resolve(cfg, "curation.lang_conf_min", flag("lang_conf_min"), 0.5, float),
            blocklist=blocklist,
        )
    except ValueError as exc:
        raise ValidationError(f"curation: {exc}") from exc


def cmd_curate(args: argparse.Namespace) -> int:
    cfg = load_config(args.config) if args.config else {}
    seed = resolve(cfg, "seed", args.seed, 0, int)
    pipeline_cfg = _pipeline_config(cfg, args)
    entries = read_manifest(_require_file(args.manifest, "manifest"))
    kept, outcomes = run_pipeline(entries, pipeline_cfg)
    write_manifest(kept, args.out_manifest)
    resolved = {
        "manifest": args.manifest,
        "wpm": [pipeline_cfg.wpm_min, pipeline_cfg.wpm_max],
        "conf_threshold": pipeline_cfg.conf_threshold,
        "min_speech_ratio": pipeline_cfg.min_speech_ratio,
        "max_silence_sec": pipeline_cfg.max_silence_sec,
        "segment": [pipeline_cfg.seg_min_sec, pipeline_cfg.seg_max_sec],
        "lang_conf_min": pipeline_cfg.lang_conf_min,
        "blocklist": pipeline_cfg.blocklist,
    }
    write_rejection_csv(outcomes, args.report, _header(seed, resolved))
    n_rej = sum(1 for o in outcomes if o.verdict == "rejected")
    print(f"kept={len(kept)} rejected={n_rej} out_manifest={args.out_manifest} report={args.report}")
    return 0


def cmd_noise_sweep(args: argparse.Namespace) -> int:
    cfg = load_config(args.config) if args.config else {}
    seed = resolve(cfg, "seed", args.seed, 0, int)
    jobs = resolve(cfg, "jobs", args.jobs, os.cpu_count() or 1, int)
    snrs_raw = resolve(cfg, "sweep.snr_list", args.snrs, "-5,0,5,10,20")
    snrs = [float(x) for x in str(snrs_raw).split(",") if x.strip()]
    kind = resolve(cfg, "sweep.noise_kind", args.noise_kind, "gaussian")
    noise_dir = resolve(cfg, "sweep.noise_dir", args.noise_dir, None)
    rules = _load_rules(resolve(cfg, "norm.rules", args.rules, None))
    try:
        spec = SweepSpec(snr_list_db=snrs, noise_kind=kind, noise_corpus_dir=noise_dir, seed=seed)
    except ValueError as exc:
        raise ValidationError(f"noise-sweep: {exc}") from exc
    records = _records_or_die(args.manifest)
    for rec in records:
        _require_file(rec.audio_path, f"audio for {rec.id}")
    report = run_sweep(records, spec, args.transcriber, args.workdir, rules=rules, jobs=jobs)
    resolved = {
        "manifest": args.manifest,
        "snr_list_db": snrs,
        "noise_kind": kind,
        "noise_dir": noise_dir,
        "transcriber": args.transcriber,
        "jobs": jobs,
    }
    write_sweep_csv(report, args.out, _header(seed, resolved))
    print(f"rows={len(report.rows)} out={args.out}")
    return 0


def _read_partials_dir(path: str) -> list[PartialTranscript]:
    if not os.path.isdir(path):
        raise ValidationError(f"partials directory not found: {path}")
    entries = []
    for name in os.listdir(path):
        stem, ext = os.path.splitext(name)
        if ext != ".txt":
            continue
        try:
            idx = int(stem)
        except ValueError:
            raise ValidationError(f"partial file name must be <index>.txt, got {name!r}")
        with open(os.path.join(path, name), encoding="utf-8") as fh:
            entries.append((idx, fh.read()))
    if not entries:
        raise ValidationError(f"no <index>.txt partials in {path}")
    entries.sort()
    return [PartialTranscript(index=i, words=text.split()) for i, text in entries]


def cmd_stitch(args: argparse.Namespace) -> int:
    cfg = load_config(args.config) if args.config else {}
    rules = _load_rules(resolve(cfg, "norm.rules", args.rules, None))
    min_match = resolve(cfg, "stitch.min_match_tokens", args.min_match, 3, int)
    chunk_len = resolve(cfg, "stitch.chunk_len_sec", args.chunk_len, 25.0, float)
    overlap = resolve(cfg, "stitch.overlap_sec", args.overlap, 5.0, float)

    if (args.partials_dir is None) == (args.audio is None):
        raise ValidationError("stitch: give exactly one of --partials-dir or --audio")

    if args.partials_dir:
        partials = _read_partials_dir(args.partials_dir)
        partials = [
            PartialTranscript(p.index, tokenize_words(normalize(" ".join(p.words), rules)))
            for p in partials
        ]
        words = stitch(partials, min_match_tokens=min_match)
    else:
        if not args.transcriber:
            raise ValidationError("stitch: --audio mode requires --transcriber")
        from .noise import transcribe_file  # same external-transcriber contract

        audio = read_wav(_require_file(args.audio, "audio"))
        segments = energy_vad(audio)
        voiced = remove_silences(audio, segments)
        if len(voiced) == 0:
            raise ValidationError(f"stitch: no speech detected in {args.audio}")
        plan = plan_chunks(voiced.duration_sec, chunk_len=chunk_len, overlap=overlap)
        workdir = args.workdir or os.path.dirname(os.path.abspath(args.audio))
        os.makedirs(workdir, exist_ok=True)
        sr = voiced.sample_rate_hz
        partials = []
        for i, (start, end) in enumerate(plan.bounds):
            piece = voiced.samples[int(round(start * sr)) : int(round(end * sr))]
            chunk_path = os.path.join(workdir, f"chunk{i:04d}.wav")
            write_wav(AudioBuffer(samples=piece, sample_rate_hz=sr), chunk_path)
            text = transcribe_file(args.transcriber, chunk_path)
            if text is None:
                raise RuntimeError(f"stitch: transcriber failed on chunk {i}")
            partials.append(PartialTranscript(i, tokenize_words(normalize(text, rules))))
        words = stitch(partials, min_match_tokens=min_match)

    out = _out_stream(args.out)
    try:
        out.write(" ".join(words) + "\n")
    finally:
        if out is not sys.stdout:
            out.close()
    return 0


def cmd_rnnt_check(args: argparse.Namespace) -> int:
    cfg = load_config(args.config) if args.config else {}
    seed = resolve(cfg, "seed", args.seed, 0, int)
    n_lattices = resolve(cfg, "rnnt.lattices", args.lattices, 1000, int)
    n_grad = resolve(cfg, "rnnt.grad_checks", args.grad_checks, 25, int)
    tol_log = resolve(cfg, "rnnt.tol_logprob", args.tol_log, 1e-9, float)
    tol_grad = resolve(cfg, "rnnt.tol_grad", args.tol_grad, 1e-4, float)
    if n_lattices < 1 or n_grad < 1:
        raise ValidationError("rnnt-check: lattice and gradient counts must be positive")

    rng = np.random.default_rng(seed)
    max_dev = 0.0
    bound_ok = True
    for _ in range(n_lattices):
        t = int(rng.integers(1, args.t_max + 1))
        u = int(rng.integers(0, args.u_max + 1))
        v = int(rng.integers(1, args.v_max + 1))
        lat = random_lattice(rng, t, u, v)
        dp = rnnt_logprob(lat)
        brute = brute_force_logprob(lat)
        max_dev = max(max_dev, abs(dp - brute))
        bound_ok = bound_ok and dp <= 1e-12

    max_rel = 0.0
    for _ in range(n_grad):
        t = int(rng.integers(2, args.t_max + 1))
        u = int(rng.integers(1, args.u_max + 1))
        v = int(rng.integers(2, args.v_max + 1))
        lat = random_lattice(rng, t, u, v)
        analytic = rnnt_grad(lat)
        fd = finite_difference_grad(lat)
        denom = max(float(np.max(np.abs(fd))), 1e-12)
        max_rel = max(max_rel, float(np.max(np.abs(analytic - fd))) / denom)

    ok_oracle = max_dev <= tol_log
    ok_grad = max_rel <= tol_grad
    print(f"oracle-agreement: {'PASS' if ok_oracle else 'FAIL'} max_abs_dev={max_dev:.3e} (n={n_lattices}, tol={tol_log:g})")
    print(f"gradient-fd: {'PASS' if ok_grad else 'FAIL'} max_rel_err={max_rel:.3e} (n={n_grad}, tol={tol_grad:g})")
    print(f"likelihood-bound: {'PASS' if bound_ok else 'FAIL'}")
    return 0 if (ok_oracle and ok_grad and bound_ok) else 1


# --- parser ----------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="asrlab", description=__doc__)
    parser.add_argument("--version", action="version", version=f"asrlab {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("plan-data", help="optimal training hours for a parameter count")
    p.add_argument("--params", type=int, required=True)
    p.add_argument("--wpm", type=float)
    p.add_argument("--tpw", type=float)
    p.add_argument("--tpp", type=float)
    p.add_argument("--config")
    p.set_defaults(func=cmd_plan_data)

    p = sub.add_parser("evaluate", help="normalized WER (and optional PN metrics) over a manifest")
    p.add_argument("--manifest", required=True)
    p.add_argument("--refs", help="TSV id<TAB>text; defaults to manifest transcripts")
    p.add_argument("--hyps", required=True, help="TSV id<TAB>text")
    p.add_argument("--rules", help="normalization rule file")
    p.add_argument("--gold-entities")
    p.add_argument("--pred-entities")
    p.add_argument("--sim-threshold", type=float)
    p.add_argument("--seed", type=int)
    p.add_argument("--out")
    p.add_argument("--config")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("ppn-score", help="proper-noun metrics from entity annotation files")
    p.add_argument("--gold-entities", required=True)
    p.add_argument("--pred-entities", required=True)
    p.add_argument("--manifest", help="optional, for length weighting")
    p.add_argument("--sim-threshold", type=float)
    p.add_argument("--seed", type=int)
    p.add_argument("--out")
    p.add_argument("--config")
    p.set_defaults(func=cmd_ppn_score)

    p = sub.add_parser("curate", help="run the pseudo-label filter pipeline")
    p.add_argument("--manifest", required=True)
    p.add_argument("--out-manifest", required=True)
    p.add_argument("--report", required=True)
    p.add_argument("--config")
    for name in (
        "wpm-min",
        "wpm-max",
        "conf-threshold",
        "min-speech-ratio",
        "max-silence-sec",
        "seg-min-sec",
        "seg-max-sec",
        "lang-conf-min",
    ):
        p.add_argument(f"--{name}", type=float)
    p.add_argument("--blocklist", help=";;-separated regex patterns")
    p.add_argument("--seed", type=int)
    p.set_defaults(func=cmd_curate)

    p = sub.add_parser("noise-sweep", help="WER vs SNR through an external transcriber")
    p.add_argument("--manifest", required=True)
    p.add_argument("--transcriber", required=True, help="command invoked as CMD <wav>")
    p.add_argument("--workdir", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--snrs", help="comma-separated dB list")
    p.add_argument("--noise-kind", choices=["gaussian", "ambient"])
    p.add_argument("--noise-dir")
    p.add_argument("--rules")
    p.add_argument("--seed", type=int)
    p.add_argument("--jobs", type=int)
    p.add_argument("--config")
    p.set_defaults(func=cmd_noise_sweep)

    p = sub.add_parser("stitch", help="join chunk transcripts (or decode+join an audio file)")
    p.add_argument("--partials-dir", help="directory of <index>.txt chunk transcripts")
    p.add_argument("--audio", help="WAV to chunk, transcribe, and stitch")
    p.add_argument("--transcriber")
    p.add_argument("--workdir")
    p.add_argument("--rules")
    p.add_argument("--min-match", type=int)
    p.add_argument("--chunk-len", type=float)
    p.add_argument("--overlap", type=float)
    p.add_argument("--out")
    p.add_argument("--config")
    p.set_defaults(func=cmd_stitch)

    p = sub.add_parser("rnnt-check", help="oracle and gradient verification suite")
    p.add_argument("--lattices", type=int)
    p.add_argument("--grad-checks", type=int)
    p.add_argument("--t-max", type=int, default=4)
    p.add_argument("--u-max", type=int, default=3)
    p.add_argument("--v-max", type=int, default=3)
    p.add_argument("--tol-log", type=float)
    p.add_argument("--tol-grad", type=float)
    p.add_argument("--seed", type=int)
    p.add_argument("--config")
    p.set_defaults(func=cmd_rnnt_check)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ValidationError as exc:
        print(f"asrlab {args.command}: {exc}", file=sys.stderr)
        return 2
    except FileNotFoundError as exc:
        print(f"asrlab {args.command}: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # internal failure contract
        print(f"asrlab {args.command}: internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
