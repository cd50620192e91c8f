import dataclasses
import json

import pytest
from hypothesis import given, settings, strategies as st

from asrlab.curation import (
    FilterOutcome,
    ManifestParseError,
    ManifestRecord,
    PipelineConfig,
    compute_wpm,
    filter_confidence,
    filter_language,
    filter_speech_and_silence,
    read_manifest,
    run_pipeline,
    segment,
    write_manifest,
    write_rejection_csv,
)


def record(
    rid="r",
    duration=10.0,
    n_words=20,
    conf=0.9,
    ratio=1.0,
    silence=0.0,
    detected=("en", 0.99),
    source="en",
    word_times="auto",
    **kw,
):
    """Record with evenly spread words; defaults pass every filter."""
    words = " ".join(f"w{i}" for i in range(n_words))
    if word_times == "auto":
        step = duration / max(n_words, 1)
        word_times = [(i * step, i * step + 0.8 * step) for i in range(n_words)]
    return ManifestRecord(
        id=rid,
        audio_path=f"{rid}.wav",
        duration_sec=duration,
        transcript=words,
        word_confidences=[conf] * n_words if conf is not None else None,
        word_times=word_times,
        source_lang=source,
        detected_lang=detected,
        speech_ratio=ratio,
        max_silence_sec=silence,
        **kw,
    )


# --- unit filters -------------------------------------------------------

def test_compute_wpm():
    assert compute_wpm(" ".join(["w"] * 120), 60.0) == 120.0
    assert compute_wpm(" ".join(["w"] * 25), 60.0) == 25.0
    assert compute_wpm("", 30.0) == 0.0
    with pytest.raises(ValueError):
        compute_wpm("a b", 0.0)


def test_filter_confidence():
    ok, mean = filter_confidence(record(conf=0.9), 0.8)
    assert ok and mean == pytest.approx(0.9)
    ok, mean = filter_confidence(record(conf=0.79), 0.8)
    assert not ok and mean == pytest.approx(0.79)
    ok, _ = filter_confidence(record(conf=1.0, n_words=1), 0.8)
    assert ok
    ok, mean = filter_confidence(record(conf=None), 0.8)
    assert not ok and mean is None


def test_filter_speech_and_silence():
    cfg = PipelineConfig()
    assert [r.filter_id for r in filter_speech_and_silence(record(ratio=0.69), cfg)] == ["speech-activity"]
    assert [r.filter_id for r in filter_speech_and_silence(record(silence=5.1), cfg)] == ["silence"]
    assert filter_speech_and_silence(record(ratio=1.0, silence=0.0), cfg) == []
    assert filter_speech_and_silence(record(ratio=0.70, silence=5.0), cfg) == []  # boundary passes
    missing = dataclasses.replace(record(), speech_ratio=None)
    assert [r.filter_id for r in filter_speech_and_silence(missing, cfg)] == ["missing-speech-stats"]


def test_filter_language():
    cfg = PipelineConfig()
    assert filter_language(record(detected=("en", 0.99), source="en"), cfg) == []
    assert [r.filter_id for r in filter_language(record(detected=("es", 0.9)), cfg)] == ["language"]
    assert [r.filter_id for r in filter_language(record(detected=("en", 0.3)), cfg)] == ["language-confidence"]
    assert [r.filter_id for r in filter_language(record(detected=("en", 0.9), source="de"), cfg)] == ["language"]
    assert [r.filter_id for r in filter_language(record(detected=None), cfg)] == ["missing-language"]
    assert filter_language(record(detected=("en", 0.9), source=None), cfg) == []


# --- segmentation ---------------------------------------------------------

def thirty_second_record(rid="r5", conf=0.9):
    # fifteen words per half, 1 s gap between word 14 (ends 14.5) and word 15 (starts 15.5)
    times = [(float(i), i + 0.5) for i in range(15)] + [(15.5 + i, 16.0 + i) for i in range(15)]
    return ManifestRecord(
        id=rid,
        audio_path=f"{rid}.wav",
        duration_sec=30.0,
        transcript=" ".join(f"w{i}" for i in range(30)),
        word_confidences=[conf] * 30,
        word_times=times,
        detected_lang=("en", 0.99),
        source_lang="en",
        speech_ratio=0.97,
        max_silence_sec=1.0,
    )


def test_segment_cuts_at_largest_gap():
    children, reason = segment(thirty_second_record(), PipelineConfig())
    assert reason is None
    assert [c.id for c in children] == ["r5#0", "r5#1"]
    assert [round(c.duration_sec, 2) for c in children] == [14.5, 14.5]
    # children words concatenate to the parent transcript
    assert " ".join(children[0].words + children[1].words) == thirty_second_record().transcript
    # sliced confidences/times stay aligned
    for c in children:
        assert len(c.word_confidences) == len(c.words) == len(c.word_times)


def test_segment_in_range_passes_through():
    rec = record(duration=10.0)
    children, reason = segment(rec, PipelineConfig())
    assert children == [rec] and reason is None


def test_segment_too_short_dropped():
    children, reason = segment(record(duration=6.0), PipelineConfig())
    assert children == [] and reason is None


def test_segment_missing_times():
    long = dataclasses.replace(record(duration=30.0), word_times=None)
    children, reason = segment(long, PipelineConfig())
    assert children == [long] and reason == "unsegmentable"
    short = dataclasses.replace(record(duration=10.0), word_times=None)
    children, reason = segment(short, PipelineConfig())
    assert children == [short] and reason is None


def test_segment_children_duration_in_range():
    cfg = PipelineConfig()
    # 60 s of continuous words: every child span must land in [7, 20]
    times = [(i * 0.5, i * 0.5 + 0.4) for i in range(120)]
    rec = ManifestRecord(
        id="long",
        audio_path="long.wav",
        duration_sec=60.0,
        transcript=" ".join(f"w{i}" for i in range(120)),
        word_times=times,
    )
    children, reason = segment(rec, cfg)
    assert reason is None and children
    for c in children:
        assert cfg.seg_min_sec <= c.duration_sec <= cfg.seg_max_sec
    # prefix-contiguous subsequence of the parent word list
    flat = [w for c in children for w in c.words]
    assert flat == rec.words[: len(flat)]


# --- golden manifest --------------------------------------------------

def golden_manifest():
    return [
        record("r0", duration=12.0, n_words=5),                      # wpm 25 -> fail
        record("r1", duration=10.0, conf=0.79),                      # confidence 0.79 -> fail
        record("r2", duration=10.0, n_words=20, conf=0.9),           # wpm 120 -> kept
        record("r3", ratio=0.69),                                    # speech activity -> fail
        record("r4", silence=5.1),                                   # continuous silence -> fail
        thirty_second_record("r5"),                                  # segmented into two kept children
        record("r6", detected=("es", 0.9), source=None),             # language mismatch -> fail
        record("r7", duration=10.0, n_words=20, conf=0.80, ratio=0.70),  # boundary values -> kept
        record("r8", duration=10.0, n_words=50),                     # wpm 300 -> fail
        record("r9", detected=("en", 0.3), source=None),             # low language confidence -> fail
    ]


EXPECTED_KEPT = ["r2", "r5#0", "r5#1", "r7"]
EXPECTED_REASONS = {
    "r0": ["wpm"],
    "r1": ["confidence"],
    "r3": ["speech-activity"],
    "r4": ["silence"],
    "r6": ["language"],
    "r8": ["wpm"],
    "r9": ["language-confidence"],
}


def test_golden_manifest_kept_set_and_reasons():
    kept, outcomes = run_pipeline(golden_manifest(), PipelineConfig())
    assert [r.id for r in kept] == EXPECTED_KEPT
    verdicts = {o.id: o for o in outcomes}
    assert len(outcomes) == 10
    for rid in ("r2", "r5", "r7"):
        assert verdicts[rid].verdict == "kept"
        assert verdicts[rid].reasons == []
    for rid, expected in EXPECTED_REASONS.items():
        assert verdicts[rid].verdict == "rejected"
        assert [r.filter_id for r in verdicts[rid].reasons] == expected


def test_five_records_per_spec_wpm_example():
    # 120 wpm passes the [50, 250] gate inclusively; 25 and 300 fail
    assert not 50 <= compute_wpm(" ".join(["w"] * 25), 60.0) <= 250
    assert 50 <= compute_wpm(" ".join(["w"] * 120), 60.0) <= 250
    assert not 50 <= compute_wpm(" ".join(["w"] * 300), 60.0) <= 250


# --- pipeline behavior -----------------------------------------------

def test_empty_manifest():
    kept, outcomes = run_pipeline([], PipelineConfig())
    assert kept == [] and outcomes == []


def test_all_passing_manifest():
    recs = [record(f"r{i}") for i in range(4)]
    kept, outcomes = run_pipeline(recs, PipelineConfig())
    assert [r.id for r in kept] == [f"r{i}" for i in range(4)]
    assert all(o.verdict == "kept" for o in outcomes)


def test_parse_error_row_continues():
    entries = [record("ok"), ManifestParseError(id="line-2", error="bad json")]
    kept, outcomes = run_pipeline(entries, PipelineConfig())
    assert [r.id for r in kept] == ["ok"]
    assert outcomes[1].verdict == "rejected"
    assert outcomes[1].reasons[0].filter_id == "parse-error"


def test_blocklist_stage():
    cfg = PipelineConfig(blocklist=[r"\bw3\b"])
    kept, outcomes = run_pipeline([record("r0")], cfg)
    assert kept == []
    assert outcomes[0].reasons[0].filter_id == "blocklist"


def test_pipeline_deterministic():
    a = run_pipeline(golden_manifest(), PipelineConfig())
    b = run_pipeline(golden_manifest(), PipelineConfig())
    assert [r.id for r in a[0]] == [r.id for r in b[0]]
    assert [(o.id, o.verdict, [(r.filter_id, r.measured) for r in o.reasons]) for o in a[1]] == [
        (o.id, o.verdict, [(r.filter_id, r.measured) for r in o.reasons]) for o in b[1]
    ]


@settings(max_examples=150, deadline=None)
@given(
    st.lists(
        st.tuples(
            st.floats(1.0, 40.0),      # duration
            st.integers(0, 60),        # word count
            st.floats(0.0, 1.0),       # confidence
            st.floats(0.0, 1.0),       # speech ratio
            st.floats(0.0, 8.0),       # max silence
            st.floats(0.0, 1.0),       # language confidence
        ),
        max_size=8,
    )
)
def test_conservation_and_monotonicity(rows):
    recs = []
    for i, (dur, n_words, conf, ratio, silence, lang_conf) in enumerate(rows):
        recs.append(
            record(
                f"g{i}",
                duration=dur,
                n_words=n_words,
                conf=round(conf, 3),
                ratio=ratio,
                silence=silence,
                detected=("en", lang_conf),
            )
        )
    cfg = PipelineConfig()
    kept, outcomes = run_pipeline(recs, cfg)
    # conservation: every input id exactly once in outcomes
    assert [o.id for o in outcomes] == [r.id for r in recs]
    # kept children trace back to kept parents
    kept_parents = {r.id.split("#")[0] for r in kept}
    assert kept_parents == {o.id for o in outcomes if o.verdict == "kept"}
    # monotonicity: tightening every threshold never grows the kept set
    tighter = PipelineConfig(
        wpm_min=60.0,
        wpm_max=200.0,
        conf_threshold=0.9,
        min_speech_ratio=0.8,
        max_silence_sec=4.0,
        lang_conf_min=0.7,
    )
    kept2, _ = run_pipeline(recs, tighter)
    assert {r.id for r in kept2} <= {r.id for r in kept}


# --- I/O --------------------------------------------------------------

def test_manifest_round_trip(tmp_path):
    path = tmp_path / "manifest.jsonl"
    recs = golden_manifest()
    write_manifest(recs, str(path))
    back = read_manifest(str(path))
    assert all(isinstance(r, ManifestRecord) for r in back)
    assert [r.id for r in back] == [r.id for r in recs]
    assert back[5].word_times == recs[5].word_times
    assert back[6].detected_lang == ("es", 0.9)


def test_read_manifest_parse_errors(tmp_path):
    path = tmp_path / "broken.jsonl"
    path.write_text(
        json.dumps({"id": "ok", "audio_path": "a.wav", "duration_sec": 3.0, "transcript": "hi there"})
        + "\nnot json at all\n"
        + json.dumps({"id": "bad", "audio_path": "b.wav", "duration_sec": -1, "transcript": "x"})
        + "\n",
        encoding="utf-8",
    )
    entries = read_manifest(str(path))
    assert isinstance(entries[0], ManifestRecord)
    assert isinstance(entries[1], ManifestParseError) and entries[1].id == "line-2"
    assert isinstance(entries[2], ManifestParseError)  # negative duration


def test_rejection_csv(tmp_path):
    path = tmp_path / "rejects.csv"
    _, outcomes = run_pipeline(golden_manifest(), PipelineConfig())
    write_rejection_csv(outcomes, str(path), header_lines=["asrlab test"])
    text = path.read_text(encoding="utf-8")
    assert text.startswith("# asrlab test\n")
    assert "id,verdict,reasons,measured_values" in text
    assert "r0,rejected,wpm,25" in text


def test_record_validation():
    with pytest.raises(ValueError):
        ManifestRecord(id="x", audio_path="a", duration_sec=0.0, transcript="hi")
    with pytest.raises(ValueError):
        ManifestRecord(id="x", audio_path="a", duration_sec=1.0, transcript="hi there", word_confidences=[0.5])
    with pytest.raises(ValueError):
        ManifestRecord(id="x", audio_path="a", duration_sec=1.0, transcript="hi", word_confidences=[1.5])


def test_pipeline_config_validation():
    with pytest.raises(ValueError):
        PipelineConfig(wpm_min=300, wpm_max=200)
    with pytest.raises(ValueError):
        PipelineConfig(seg_min_sec=20, seg_max_sec=7)
    with pytest.raises(ValueError):
        PipelineConfig(conf_threshold=1.5)
