"""Pseudo-label curation: threshold filters, segmentation, and rejection provenance.

Filters run in a fixed order (blocklist, language, speech/silence, segmentation,
words-per-minute, confidence) so reruns are deterministic and cheap metadata
checks happen before per-word work. Every input record is accounted for in the
outcome list, with the offending measured value attached to each failed filter.
"""

from __future__ import annotations

import csv
import json
import re
from dataclasses import dataclass, field, replace
from typing import Iterable

__all__ = [
    "ManifestRecord",
    "ManifestParseError",
    "PipelineConfig",
    "FilterReason",
    "FilterOutcome",
    "compute_wpm",
    "filter_confidence",
    "filter_speech_and_silence",
    "filter_language",
    "segment",
    "run_pipeline",
    "read_manifest",
    "write_manifest",
    "write_rejection_csv",
]

TARGET_LANG = "en"


@dataclass
class ManifestRecord:
    """One audio+transcript unit. Optional fields hold upstream measurements."""

    id: str
    audio_path: str
    duration_sec: float
    transcript: str
    word_confidences: list[float] | None = None
    word_times: list[tuple[float, float]] | None = None
    source_lang: str | None = None
    detected_lang: tuple[str, float] | None = None
    speech_ratio: float | None = None
    max_silence_sec: float | None = None

    def __post_init__(self) -> None:
        if self.duration_sec <= 0:
            raise ValueError(f"{self.id}: duration_sec must be positive")
        n_words = len(self.transcript.split())
        for name in ("word_confidences", "word_times"):
            values = getattr(self, name)
            if values is not None and len(values) != n_words:
                raise ValueError(
                    f"{self.id}: {name} has {len(values)} entries for {n_words} words"
                )
        if self.word_confidences is not None and any(
            not 0.0 <= c <= 1.0 for c in self.word_confidences
        ):
            raise ValueError(f"{self.id}: word confidences must lie in [0, 1]")

    @property
    def words(self) -> list[str]:
        return self.transcript.split()


@dataclass
class ManifestParseError:
    """Placeholder for a manifest line that failed to parse."""

    id: str
    error: str


@dataclass
class PipelineConfig:
    wpm_min: float = 50.0
    wpm_max: float = 250.0
    conf_threshold: float = 0.8
    min_speech_ratio: float = 0.70
    max_silence_sec: float = 5.0
    seg_min_sec: float = 7.0
    seg_max_sec: float = 20.0
    lang_conf_min: float = 0.5
    blocklist: list[str] = field(default_factory=list)

    def __post_init__(self) -> None:
        if not self.wpm_min < self.wpm_max:
            raise ValueError("wpm_min must be < wpm_max")
        if not self.seg_min_sec < self.seg_max_sec:
            raise ValueError("seg_min_sec must be < seg_max_sec")
        for name in ("conf_threshold", "min_speech_ratio", "lang_conf_min"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ValueError(f"{name} must be in [0, 1]")


@dataclass
class FilterReason:
    filter_id: str
    measured: str


@dataclass
class FilterOutcome:
    """Verdict for one input record. rejected => reasons nonempty; kept => empty."""

    id: str
    verdict: str  # "kept" | "rejected"
    reasons: list[FilterReason] = field(default_factory=list)


def compute_wpm(transcript: str, duration_sec: float) -> float:
    if duration_sec <= 0:
        raise ValueError("duration_sec must be positive")
    return len(transcript.split()) / (duration_sec / 60.0)


def filter_confidence(rec: ManifestRecord, threshold: float) -> tuple[bool, float | None]:
    """Pass iff the arithmetic mean word confidence is >= threshold.

    Missing confidences are not evaluable; callers reject with reason
    ``missing-confidence``.
    """
    if not rec.word_confidences:
        return False, None
    mean = sum(rec.word_confidences) / len(rec.word_confidences)
    return mean >= threshold, mean


def filter_speech_and_silence(rec: ManifestRecord, cfg: PipelineConfig) -> list[FilterReason]:
    """Empty list = pass. Speech ratio strictly below the floor or continuous
    silence strictly above the cap rejects, mirroring the threshold wording."""
    if rec.speech_ratio is None or rec.max_silence_sec is None:
        return [FilterReason("missing-speech-stats", "missing")]
    reasons = []
    if rec.speech_ratio < cfg.min_speech_ratio:
        reasons.append(FilterReason("speech-activity", f"{rec.speech_ratio:.4g}"))
    if rec.max_silence_sec > cfg.max_silence_sec:
        reasons.append(FilterReason("silence", f"{rec.max_silence_sec:.4g}"))
    return reasons


def filter_language(rec: ManifestRecord, cfg: PipelineConfig) -> list[FilterReason]:
    """Keep only records detected as the target language with enough confidence
    and no source/detected mismatch."""
    if rec.detected_lang is None:
        return [FilterReason("missing-language", "missing")]
    tag, conf = rec.detected_lang
    if tag != TARGET_LANG:
        return [FilterReason("language", f"{tag}:{conf:.4g}")]
    if conf < cfg.lang_conf_min:
        return [FilterReason("language-confidence", f"{conf:.4g}")]
    if rec.source_lang is not None and rec.source_lang != tag:
        return [FilterReason("language", f"source={rec.source_lang},detected={tag}")]
    return []


def _slice_record(rec: ManifestRecord, lo: int, hi: int, child_idx: int) -> ManifestRecord:
    """Child record for words [lo, hi); word times stay absolute into the parent audio."""
    times = rec.word_times[lo:hi]  # type: ignore[index]
    words = rec.words[lo:hi]
    return replace(
        rec,
        id=f"{rec.id}#{child_idx}",
        duration_sec=times[-1][1] - times[0][0],
        transcript=" ".join(words),
        word_confidences=rec.word_confidences[lo:hi] if rec.word_confidences else None,
        word_times=times,
    )


def segment(rec: ManifestRecord, cfg: PipelineConfig) -> tuple[list[ManifestRecord], str | None]:
    """Cut a record into children whose spans lie in [seg_min_sec, seg_max_sec].

    Greedy left-to-right: among cut points whose span from the current word is
    in range, pick the one at the largest inter-word gap. Words that cannot
    form an in-range segment (including a too-short trailing remainder) are
    dropped. Returns (children, reason): without word times the record passes
    through unsegmented, flagged ``unsegmentable`` when it exceeds seg_max_sec.
    """
    if rec.word_times is None:
        if rec.duration_sec > cfg.seg_max_sec:
            return [rec], "unsegmentable"
        return [rec], None
    if rec.duration_sec <= cfg.seg_max_sec:
        if rec.duration_sec >= cfg.seg_min_sec:
            return [rec], None  # already in range: pass through unchanged
        return [], None  # too short to ever reach seg_min
    if not rec.word_times:
        return [], None

    times = rec.word_times
    children: list[ManifestRecord] = []
    n = len(times)
    cur = 0
    child_idx = 0
    while cur < n:
        start = times[cur][0]
        remaining = times[n - 1][1] - start
        if remaining <= cfg.seg_max_sec:
            # no cut needed; a too-short trailing remainder is dropped
            if remaining >= cfg.seg_min_sec:
                children.append(_slice_record(rec, cur, n, child_idx))
            break
        # a cut is forced: widest window ending at or under seg_max
        hi = cur
        while hi + 1 < n and times[hi + 1][1] - start <= cfg.seg_max_sec:
            hi += 1
        if not cfg.seg_min_sec <= times[hi][1] - start <= cfg.seg_max_sec:
            # no feasible segment starts here (huge word or gap); drop through it
            cur = hi + 1
            continue
        # among in-range cut points, cut at the largest inter-word gap
        best_j = hi
        best_gap = -1.0
        for j in range(cur, hi + 1):
            if times[j][1] - start < cfg.seg_min_sec:
                continue
            gap = times[j + 1][0] - times[j][1]
            if gap > best_gap:
                best_gap = gap
                best_j = j
        children.append(_slice_record(rec, cur, best_j + 1, child_idx))
        child_idx += 1
        cur = best_j + 1
    return children, None


def run_pipeline(
    manifest: Iterable[ManifestRecord | ManifestParseError], cfg: PipelineConfig
) -> tuple[list[ManifestRecord], list[FilterOutcome]]:
    """Apply all filters; return (kept records, one outcome per input record).

    A record survives if at least one of its segmentation children passes the
    per-segment filters (WpM, confidence). Outcomes are emitted in input order
    regardless of how the work is scheduled.
    """
    blockers = [re.compile(p) for p in cfg.blocklist]
    kept: list[ManifestRecord] = []
    outcomes: list[FilterOutcome] = []

    for rec in manifest:
        if isinstance(rec, ManifestParseError):
            outcomes.append(
                FilterOutcome(rec.id, "rejected", [FilterReason("parse-error", rec.error)])
            )
            continue

        reasons: list[FilterReason] = []
        for pattern in blockers:
            if pattern.search(rec.transcript):
                reasons.append(FilterReason("blocklist", pattern.pattern))
        if not reasons:
            reasons.extend(filter_language(rec, cfg))
        if not reasons:
            reasons.extend(filter_speech_and_silence(rec, cfg))
        if reasons:
            outcomes.append(FilterOutcome(rec.id, "rejected", reasons))
            continue

        children, seg_reason = segment(rec, cfg)
        if seg_reason is not None:
            outcomes.append(
                FilterOutcome(rec.id, "rejected", [FilterReason(seg_reason, f"{rec.duration_sec:.4g}")])
            )
            continue
        if not children:
            outcomes.append(
                FilterOutcome(rec.id, "rejected", [FilterReason("segment-too-short", f"{rec.duration_sec:.4g}")])
            )
            continue

        survivors = []
        child_reasons: list[FilterReason] = []
        for child in children:
            wpm = compute_wpm(child.transcript, child.duration_sec)
            if not cfg.wpm_min <= wpm <= cfg.wpm_max:
                child_reasons.append(FilterReason("wpm", f"{wpm:.4g}"))
                continue
            ok, mean = filter_confidence(child, cfg.conf_threshold)
            if mean is None:
                child_reasons.append(FilterReason("missing-confidence", "missing"))
                continue
            if not ok:
                child_reasons.append(FilterReason("confidence", f"{mean:.4g}"))
                continue
            survivors.append(child)

        if survivors:
            kept.extend(survivors)
            outcomes.append(FilterOutcome(rec.id, "kept", []))
        else:
            outcomes.append(FilterOutcome(rec.id, "rejected", child_reasons))

    return kept, outcomes


# --- manifest and report I/O ---------------------------------------------

_FIELDS = (
    "id",
    "audio_path",
    "duration_sec",
    "transcript",
    "word_confidences",
    "word_times",
    "source_lang",
    "detected_lang",
    "speech_ratio",
    "max_silence_sec",
)


def _record_from_json(obj: dict) -> ManifestRecord:
    unknown = set(obj) - set(_FIELDS)
    if unknown:
        raise ValueError(f"unknown manifest fields: {sorted(unknown)}")
    word_times = obj.get("word_times")
    if word_times is not None:
        word_times = [(float(s), float(e)) for s, e in word_times]
    detected = obj.get("detected_lang")
    if detected is not None:
        detected = (str(detected[0]), float(detected[1]))
    return ManifestRecord(
        id=str(obj["id"]),
        audio_path=str(obj["audio_path"]),
        duration_sec=float(obj["duration_sec"]),
        transcript=str(obj["transcript"]),
        word_confidences=obj.get("word_confidences"),
        word_times=word_times,
        source_lang=obj.get("source_lang"),
        detected_lang=detected,
        speech_ratio=obj.get("speech_ratio"),
        max_silence_sec=obj.get("max_silence_sec"),
    )


def read_manifest(path: str) -> list[ManifestRecord | ManifestParseError]:
    """Read a JSON Lines manifest; malformed lines become ManifestParseError entries."""
    out: list[ManifestRecord | ManifestParseError] = []
    with open(path, encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                out.append(_record_from_json(json.loads(line)))
            except (ValueError, KeyError, TypeError, IndexError) as exc:
                out.append(ManifestParseError(id=f"line-{line_no}", error=str(exc)))
    return out


def write_manifest(records: Iterable[ManifestRecord], path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for rec in records:
            obj: dict = {
                "id": rec.id,
                "audio_path": rec.audio_path,
                "duration_sec": rec.duration_sec,
                "transcript": rec.transcript,
            }
            if rec.word_confidences is not None:
                obj["word_confidences"] = rec.word_confidences
            if rec.word_times is not None:
                obj["word_times"] = [list(t) for t in rec.word_times]
            if rec.source_lang is not None:
                obj["source_lang"] = rec.source_lang
            if rec.detected_lang is not None:
                obj["detected_lang"] = list(rec.detected_lang)
            if rec.speech_ratio is not None:
                obj["speech_ratio"] = rec.speech_ratio
            if rec.max_silence_sec is not None:
                obj["max_silence_sec"] = rec.max_silence_sec
            fh.write(json.dumps(obj, ensure_ascii=False) + "\n")


def write_rejection_csv(outcomes: Iterable[FilterOutcome], path: str, header_lines: list[str] | None = None) -> None:
    """CSV columns: id, verdict, reasons (;-joined ids), measured_values (;-joined)."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        for line in header_lines or []:
            fh.write(f"# {line}\n")
        writer = csv.writer(fh)
        writer.writerow(["id", "verdict", "reasons", "measured_values"])
        for o in outcomes:
            writer.writerow(
                [
                    o.id,
                    o.verdict,
                    ";".join(r.filter_id for r in o.reasons),
                    ";".join(r.measured for r in o.reasons),
                ]
            )
