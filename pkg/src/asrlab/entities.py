"""Named-entity alignment and proper-noun scoring for transcript evaluation.

Gold and predicted entity sequences are paired in two stages: an
order-preserving lexical alignment (difflib's Ratcliff-Obershelp sequence
matching over the casefolded surface texts), then a refinement that keeps a
candidate pair only if the entity types agree and the surface strings are
similar enough. Entities left unpaired count as insertions or deletions, each
contributing the maximal distance of 1.0 to the final score.

NER itself is consumed, not computed: spans arrive from annotation files or an
external tagger process (see ``read_entity_file`` / ``run_tagger``).
"""

from __future__ import annotations

import subprocess
from dataclasses import dataclass, field

from .metrics import jaro_winkler, wer

__all__ = [
    "SUPPORTED_TYPES",
    "EntitySpan",
    "EntityAlignment",
    "align_entities",
    "pn_score",
    "read_entity_file",
    "run_tagger",
]

SUPPORTED_TYPES = ("Person", "Organization", "GPE", "LOC")


@dataclass(frozen=True)
class EntitySpan:
    """A typed entity mention with character offsets into its source text."""

    filler: str
    type: str
    start: int
    end: int

    def __post_init__(self) -> None:
        if self.start >= self.end:
            raise ValueError(f"span [{self.start}, {self.end}) is empty or inverted")
        if not self.filler.strip():
            raise ValueError("filler must be nonempty")

    def check_against(self, source: str) -> None:
        if source[self.start : self.end] != self.filler:
            raise ValueError(
                f"filler {self.filler!r} does not match source[{self.start}:{self.end}]"
            )


@dataclass
class EntityAlignment:
    """Pairing result: matched (gold, pred) pairs plus the unpaired residue."""

    matched: list[tuple[EntitySpan, EntitySpan]] = field(default_factory=list)
    unmatched_gold: list[EntitySpan] = field(default_factory=list)
    unmatched_pred: list[EntitySpan] = field(default_factory=list)


def _candidate_pairs(
    gold: list[EntitySpan], pred: list[EntitySpan]
) -> list[tuple[EntitySpan | None, EntitySpan | None]]:
    """Stage 1: order-preserving lexical pairing over casefolded fillers.

    'equal' opcode blocks pair identical fillers; 'replace' blocks pair spans
    positionally, with the longer side's leftovers unpaired.
    """
    from difflib import SequenceMatcher

    g_text = [s.filler.casefold() for s in gold]
    p_text = [s.filler.casefold() for s in pred]
    sm = SequenceMatcher(None, g_text, p_text, autojunk=False)
    out: list[tuple[EntitySpan | None, EntitySpan | None]] = []
    for tag, i1, i2, j1, j2 in sm.get_opcodes():
        if tag == "equal":
            out.extend((gold[i], pred[j]) for i, j in zip(range(i1, i2), range(j1, j2)))
        elif tag == "replace":
            g_block = gold[i1:i2]
            p_block = pred[j1:j2]
            for k in range(max(len(g_block), len(p_block))):
                out.append(
                    (
                        g_block[k] if k < len(g_block) else None,
                        p_block[k] if k < len(p_block) else None,
                    )
                )
        elif tag == "delete":
            out.extend((gold[i], None) for i in range(i1, i2))
        else:  # insert
            out.extend((None, pred[j]) for j in range(j1, j2))
    return out


def align_entities(
    gold: list[EntitySpan], pred: list[EntitySpan], sim_threshold: float = 0.5
) -> EntityAlignment:
    """Two-stage alignment of gold and predicted spans.

    Spans with types outside SUPPORTED_TYPES are dropped before alignment. The
    returned buckets partition the remaining spans exactly: a candidate pair is
    kept only when the types are equal and the casefolded fillers have
    Jaro-Winkler similarity >= sim_threshold; everything else lands in an
    unmatched bucket.
    """
    gold = sorted((s for s in gold if s.type in SUPPORTED_TYPES), key=lambda s: (s.start, s.end))
    pred = sorted((s for s in pred if s.type in SUPPORTED_TYPES), key=lambda s: (s.start, s.end))
    out = EntityAlignment()
    for g, p in _candidate_pairs(gold, pred):
        if g is None:
            out.unmatched_pred.append(p)  # type: ignore[arg-type]
        elif p is None:
            out.unmatched_gold.append(g)
        elif g.type == p.type and jaro_winkler(g.filler.casefold(), p.filler.casefold()) >= sim_threshold:
            out.matched.append((g, p))
        else:
            out.unmatched_gold.append(g)
            out.unmatched_pred.append(p)
    return out


def _pair_distance(gold: EntitySpan, pred: EntitySpan, lexical_metric: str) -> float:
    g = gold.filler.casefold()
    p = pred.filler.casefold()
    if lexical_metric == "jaro_distance":
        return 1.0 - jaro_winkler(g, p)
    if lexical_metric == "pair_wer":
        return wer(g.split(), p.split())
    raise ValueError(f"unknown lexical metric: {lexical_metric!r}")


def pn_score(align: EntityAlignment, lexical_metric: str = "jaro_distance") -> float | None:
    """Proper-noun distance, scaled x100 (lower is better).

    Mean over max(n, m) slots where n/m are the gold/pred span counts: matched
    pairs contribute their lexical distance (1 - Jaro-Winkler, or pair-level
    WER), every unmatched span contributes the maximal distance 1.0. Returns
    None when there are no entities on either side; callers exclude such files
    from aggregation rather than scoring them 0.
    """
    n = len(align.matched) + len(align.unmatched_gold)
    m = len(align.matched) + len(align.unmatched_pred)
    slots = max(n, m)
    if slots == 0:
        return None
    total = sum(_pair_distance(g, p, lexical_metric) for g, p in align.matched)
    total += float(len(align.unmatched_gold) + len(align.unmatched_pred))
    return 100.0 * total / slots


def read_entity_file(path: str) -> dict[str, list[EntitySpan]]:
    """Parse a line-delimited annotation file: file_id<TAB>start<TAB>end<TAB>type<TAB>filler."""
    spans: dict[str, list[EntitySpan]] = {}
    with open(path, encoding="utf-8") as fh:
        for line_no, raw in enumerate(fh, start=1):
            line = raw.rstrip("\n")
            if not line.strip():
                continue
            parts = line.split("\t")
            if len(parts) != 5:
                raise ValueError(f"{path}:{line_no}: expected 5 tab-separated fields")
            file_id, start, end, etype, filler = parts
            spans.setdefault(file_id, []).append(
                EntitySpan(filler=filler, type=etype, start=int(start), end=int(end))
            )
    return spans


def run_tagger(cmd: list[str], text: str) -> list[EntitySpan]:
    """Invoke an external NER tagger on one document.

    Contract: the tagger reads UTF-8 text on stdin, writes five-field records
    (file_id<TAB>start<TAB>end<TAB>type<TAB>filler) on stdout, and exits 0.
    The file_id column is ignored for per-document invocation.
    """
    proc = subprocess.run(cmd, input=text.encode("utf-8"), capture_output=True)
    if proc.returncode != 0:
        raise RuntimeError(
            f"tagger {cmd[0]!r} exited {proc.returncode}: {proc.stderr.decode('utf-8', 'replace')}"
        )
    spans = []
    for line_no, line in enumerate(proc.stdout.decode("utf-8").splitlines(), start=1):
        if not line.strip():
            continue
        parts = line.split("\t")
        if len(parts) != 5:
            raise ValueError(f"tagger output line {line_no}: expected 5 fields")
        _, start, end, etype, filler = parts
        spans.append(EntitySpan(filler=filler, type=etype, start=int(start), end=int(end)))
    return spans
