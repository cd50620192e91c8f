"""Deterministic English text normalization applied before word error rate scoring.

Both reference and hypothesis transcripts go through the same rule set so that
formatting differences (casing, punctuation, contractions, filler words) do not
count as recognition errors. The default rule set is frozen and documented here;
a user-supplied rule file can replace the tables.
"""

from __future__ import annotations

import unicodedata
from dataclasses import dataclass, field

__all__ = [
    "NormRuleSet",
    "DEFAULT_RULES",
    "normalize",
    "tokenize_words",
    "load_rules",
]

# Apostrophe look-alikes folded to U+0027 before any other step.
_APOSTROPHES = {"’": "'", "ʼ": "'", "‘": "'"}

_DEFAULT_CONTRACTIONS = {
    # negations
    "ain't": "is not",
    "aren't": "are not",
    "can't": "cannot",
    "couldn't": "could not",
    "daren't": "dare not",
    "didn't": "did not",
    "doesn't": "does not",
    "don't": "do not",
    "hadn't": "had not",
    "hasn't": "has not",
    "haven't": "have not",
    "isn't": "is not",
    "mightn't": "might not",
    "mustn't": "must not",
    "needn't": "need not",
    "oughtn't": "ought not",
    "shan't": "shall not",
    "shouldn't": "should not",
    "wasn't": "was not",
    "weren't": "were not",
    "won't": "will not",
    "wouldn't": "would not",
    # pronoun + be/have/will/would
    "i'm": "i am",
    "i've": "i have",
    "i'll": "i will",
    "i'd": "i would",
    "you're": "you are",
    "you've": "you have",
    "you'll": "you will",
    "you'd": "you would",
    "he's": "he is",
    "he'll": "he will",
    "he'd": "he would",
    "she's": "she is",
    "she'll": "she will",
    "she'd": "she would",
    "it's": "it is",
    "it'll": "it will",
    "it'd": "it would",
    "we're": "we are",
    "we've": "we have",
    "we'll": "we will",
    "we'd": "we would",
    "they're": "they are",
    "they've": "they have",
    "they'll": "they will",
    "they'd": "they would",
    "that's": "that is",
    "that'll": "that will",
    "that'd": "that would",
    "there's": "there is",
    "there've": "there have",
    "there'll": "there will",
    "there'd": "there would",
    "here's": "here is",
    # interrogatives
    "who's": "who is",
    "who're": "who are",
    "who've": "who have",
    "who'll": "who will",
    "who'd": "who would",
    "what's": "what is",
    "what're": "what are",
    "what've": "what have",
    "what'll": "what will",
    "what'd": "what did",
    "where's": "where is",
    "where're": "where are",
    "where've": "where have",
    "where'll": "where will",
    "where'd": "where did",
    "when's": "when is",
    "when'd": "when did",
    "why's": "why is",
    "why're": "why are",
    "why'd": "why did",
    "how's": "how is",
    "how're": "how are",
    "how'll": "how will",
    "how'd": "how did",
    # modal + have
    "could've": "could have",
    "should've": "should have",
    "would've": "would have",
    "might've": "might have",
    "must've": "must have",
    # misc
    "let's": "let us",
    "ma'am": "madam",
    "y'all": "you all",
    "c'mon": "come on",
}

_DEFAULT_FILLERS = frozenset(
    {"um", "umm", "ummm", "uh", "uhh", "er", "ah", "mhm", "mm-hmm"}
)


@dataclass(frozen=True)
class NormRuleSet:
    """Normalization rules: contraction expansions, filler words, and two flags.

    Invariants: contraction keys and filler words are lowercase, and expansion
    values contain no apostrophes, so applying the rule set twice gives the
    same result as applying it once.
    """

    contractions: dict[str, str] = field(default_factory=lambda: dict(_DEFAULT_CONTRACTIONS))
    fillers: frozenset[str] = _DEFAULT_FILLERS
    casefold: bool = True
    strip_punct: bool = True

    def __post_init__(self) -> None:
        for key in self.contractions:
            if key != key.casefold():
                raise ValueError(f"contraction key not lowercase: {key!r}")
        for word in self.fillers:
            if word != word.casefold():
                raise ValueError(f"filler word not lowercase: {word!r}")


DEFAULT_RULES = NormRuleSet()


def _strip_punctuation(text: str) -> str:
    """Replace punctuation with spaces, keeping intra-word apostrophes and hyphens.

    Apostrophes must survive until contraction expansion; hyphens must survive
    so hyphenated fillers like "mm-hmm" stay matchable as single tokens.
    """
    out = []
    n = len(text)
    for i, ch in enumerate(text):
        if unicodedata.category(ch).startswith("P"):
            if ch in "'-":
                prev_ok = i > 0 and text[i - 1].isalnum()
                next_ok = i + 1 < n and text[i + 1].isalnum()
                if prev_ok and next_ok:
                    out.append(ch)
                    continue
            out.append(" ")
        else:
            out.append(ch)
    return "".join(out)


def normalize(text: str, rules: NormRuleSet = DEFAULT_RULES) -> str:
    """Normalize a transcript into the canonical scoring form.

    Output is casefolded (if enabled), free of punctuation except intra-word
    apostrophes/hyphens (if enabled), has contractions expanded and filler
    words removed, and uses single spaces throughout. Idempotent: running the
    result through again returns it unchanged.
    """
    if not text:
        return ""
    for variant, plain in _APOSTROPHES.items():
        text = text.replace(variant, plain)
    if rules.casefold:
        text = text.casefold()
    if rules.strip_punct:
        text = _strip_punctuation(text)
    expanded: list[str] = []
    for token in text.split():
        expanded.extend(rules.contractions.get(token, token).split())
    kept = [tok for tok in expanded if tok not in rules.fillers]
    return " ".join(kept)


def tokenize_words(text: str) -> list[str]:
    """Split normalized text on whitespace runs.

    Joining the result with single spaces reproduces the normalized input.
    """
    return text.split()


def load_rules(path: str, casefold: bool = True, strip_punct: bool = True) -> NormRuleSet:
    """Read a rule file with ``[contractions]`` (key<TAB>value) and ``[fillers]`` sections."""
    contractions: dict[str, str] = {}
    fillers: set[str] = set()
    section = None
    with open(path, encoding="utf-8") as fh:
        for line_no, raw in enumerate(fh, start=1):
            line = raw.rstrip("\n")
            if not line.strip() or line.lstrip().startswith("#"):
                continue
            stripped = line.strip()
            if stripped in ("[contractions]", "[fillers]"):
                section = stripped
                continue
            if section == "[contractions]":
                if "\t" not in line:
                    raise ValueError(f"{path}:{line_no}: expected key<TAB>value")
                key, value = line.split("\t", 1)
                contractions[key.strip().casefold()] = value.strip().casefold()
            elif section == "[fillers]":
                fillers.add(stripped.casefold())
            else:
                raise ValueError(f"{path}:{line_no}: content before a section header")
    return NormRuleSet(
        contractions=contractions,
        fillers=frozenset(fillers),
        casefold=casefold,
        strip_punct=strip_punct,
    )
