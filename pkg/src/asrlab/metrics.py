"""Word-level transcript metrics: edit alignment, WER, Jaro-Winkler, aggregation.

WER = (substitutions + insertions + deletions) / reference word count, computed
over a minimum-cost word alignment with unit costs. Dataset-level numbers are
weighted by audio length so long files are not under-represented.
"""

from __future__ import annotations

from dataclasses import dataclass, field

__all__ = [
    "EditAlignment",
    "EmptyReferenceError",
    "word_align",
    "wer",
    "jaro_winkler",
    "weighted_average",
    "EvalRow",
    "EvalReport",
    "build_report",
]


class EmptyReferenceError(ValueError):
    """Raised when WER is requested against an empty reference (undefined denominator)."""


@dataclass
class EditAlignment:
    """Counts and word pairs from a minimum-cost alignment.

    ``pairs`` lists (ref_word, hyp_word) in order; a gap is represented by None
    (None on the ref side is an insertion, None on the hyp side a deletion).
    Invariants: S + D + hits == len(ref) and S + I + hits == len(hyp).
    """

    substitutions: int
    insertions: int
    deletions: int
    hits: int
    pairs: list[tuple[str | None, str | None]]

    @property
    def errors(self) -> int:
        return self.substitutions + self.insertions + self.deletions


def word_align(ref: list[str], hyp: list[str]) -> EditAlignment:
    """Align two token lists with minimal S+I+D under unit costs.

    Ties are broken preferring substitution over insertion over deletion, which
    makes the returned alignment deterministic.
    """
    n, m = len(ref), len(hyp)
    dp = [[0] * (m + 1) for _ in range(n + 1)]
    for i in range(n + 1):
        dp[i][0] = i
    for j in range(m + 1):
        dp[0][j] = j
    for i in range(1, n + 1):
        for j in range(1, m + 1):
            cost = 0 if ref[i - 1] == hyp[j - 1] else 1
            dp[i][j] = min(dp[i - 1][j - 1] + cost, dp[i][j - 1] + 1, dp[i - 1][j] + 1)

    pairs: list[tuple[str | None, str | None]] = []
    subs = ins = dels = hits = 0
    i, j = n, m
    while i > 0 or j > 0:
        if i > 0 and j > 0 and dp[i][j] == dp[i - 1][j - 1] + (0 if ref[i - 1] == hyp[j - 1] else 1):
            pairs.append((ref[i - 1], hyp[j - 1]))
            if ref[i - 1] == hyp[j - 1]:
                hits += 1
            else:
                subs += 1
            i -= 1
            j -= 1
        elif j > 0 and dp[i][j] == dp[i][j - 1] + 1:
            pairs.append((None, hyp[j - 1]))
            ins += 1
            j -= 1
        else:
            pairs.append((ref[i - 1], None))
            dels += 1
            i -= 1
    pairs.reverse()
    return EditAlignment(subs, ins, dels, hits, pairs)


def wer(ref: list[str], hyp: list[str]) -> float:
    """Word error rate (S+I+D)/len(ref); may exceed 1.0.

    Raises EmptyReferenceError for an empty reference rather than silently
    returning 0 or infinity.
    """
    if not ref:
        raise EmptyReferenceError("WER is undefined for an empty reference")
    return word_align(ref, hyp).errors / len(ref)


def jaro_winkler(a: str, b: str) -> float:
    """Jaro-Winkler similarity in [0, 1].

    Jaro similarity uses a matching window of floor(max(|a|,|b|)/2) - 1 and
    half-transposition counting; the Winkler boost J + l*0.1*(1-J) is applied
    unconditionally with common-prefix length l capped at 4. Conventions for
    empty strings: jw("", "") = 1.0 and jw(x, "") = 0.0 for nonempty x.
    """
    if a == b:
        return 1.0
    if not a or not b:
        return 0.0
    la, lb = len(a), len(b)
    window = max(max(la, lb) // 2 - 1, 0)

    a_flags = [False] * la
    b_flags = [False] * lb
    matches = 0
    for i, ch in enumerate(a):
        lo = max(0, i - window)
        hi = min(lb, i + window + 1)
        for j in range(lo, hi):
            if not b_flags[j] and b[j] == ch:
                a_flags[i] = b_flags[j] = True
                matches += 1
                break
    if matches == 0:
        return 0.0

    matched_a = [a[i] for i in range(la) if a_flags[i]]
    matched_b = [b[j] for j in range(lb) if b_flags[j]]
    half_transpositions = sum(x != y for x, y in zip(matched_a, matched_b))
    t = half_transpositions / 2.0

    jaro = (matches / la + matches / lb + (matches - t) / matches) / 3.0

    prefix = 0
    for x, y in zip(a, b):
        if x != y or prefix == 4:
            break
        prefix += 1
    return jaro + prefix * 0.1 * (1.0 - jaro)


def weighted_average(scores: list[float], lengths_sec: list[float]) -> float:
    """Length-weighted mean: sum(s_i * L_i) / sum(L_i)."""
    if len(scores) != len(lengths_sec):
        raise ValueError(f"got {len(scores)} scores but {len(lengths_sec)} lengths")
    if not scores:
        raise ValueError("cannot average an empty list")
    if any(length <= 0 for length in lengths_sec):
        raise ValueError("all lengths must be positive")
    total = sum(lengths_sec)
    return sum(s * length for s, length in zip(scores, lengths_sec)) / total


@dataclass
class EvalRow:
    """Per-file metric row. PN fields are None when the file has no entities."""

    file_id: str
    audio_sec: float
    wer: float
    pn_jaro: float | None = None
    pn_wer: float | None = None


@dataclass
class EvalReport:
    rows: list[EvalRow] = field(default_factory=list)
    aggregates: dict[str, float | None] = field(default_factory=dict)


def build_report(rows: list[EvalRow]) -> EvalReport:
    """Aggregate per-file rows into length-weighted dataset averages.

    Files whose PN score is None (no entities on either side) are excluded
    from the PN aggregates instead of contributing a zero.
    """
    aggregates: dict[str, float | None] = {}
    if rows:
        aggregates["wer"] = weighted_average([r.wer for r in rows], [r.audio_sec for r in rows])
    else:
        aggregates["wer"] = None
    for name in ("pn_jaro", "pn_wer"):
        scored = [(getattr(r, name), r.audio_sec) for r in rows if getattr(r, name) is not None]
        if scored:
            aggregates[name] = weighted_average([s for s, _ in scored], [l for _, l in scored])
        else:
            aggregates[name] = None
    return EvalReport(rows=rows, aggregates=aggregates)
