"""Text normalization, language detection and tokenization.

Normalization is deliberately conservative: it only applies transformations
that are safe for both Arabic and Latin-script text, and it is idempotent so
stored ``norm_text`` can be re-normalized without drift.
"""

from __future__ import annotations

import re
import unicodedata
from functools import lru_cache
from importlib import resources

# Arabic harakat/tanwin marks (U+064B..U+065F) plus tatweel (U+0640).
_AR_MARKS_RE = re.compile("[ـً-ٟ]")

# Alef variants collapse to bare alef, alef maqsura to ya.
_AR_LETTER_MAP = str.maketrans(
    {
        "آ": "ا",  # آ
        "أ": "ا",  # أ
        "إ": "ا",  # إ
        "ى": "ي",  # ى -> ي
    }
)

_WS_RE = re.compile(r"\s+")
_TOKEN_RE = re.compile(r"\w+", re.UNICODE)

_ARABIC_BLOCKS = (
    (0x0600, 0x06FF),
    (0x0750, 0x077F),
    (0x08A0, 0x08FF),
    (0xFB50, 0xFDFF),
    (0xFE70, 0xFEFF),
)


def normalize_text(text: str, lang_hint: str = "unknown") -> str:
    """Normalize raw post text.

    Applied steps: NFC, whitespace collapse, control/format character
    removal, Arabic alef/ya folding, Arabic diacritic and tatweel removal,
    lowercasing.  The Arabic steps are keyed on the characters themselves,
    not on ``lang_hint``, so mixed-script text is handled uniformly;
    the hint is accepted for interface stability.

    Idempotent: ``normalize_text(normalize_text(x)) == normalize_text(x)``.
    """
    t = unicodedata.normalize("NFC", text)
    t = _WS_RE.sub(" ", t)
    t = "".join(ch for ch in t if unicodedata.category(ch) not in ("Cc", "Cf"))
    t = t.translate(_AR_LETTER_MAP)
    t = _AR_MARKS_RE.sub("", t)
    t = t.lower()
    t = _WS_RE.sub(" ", t).strip()
    return unicodedata.normalize("NFC", t)


def tokenize(norm_text: str, stopwords: frozenset[str] | set[str] = frozenset()) -> list[str]:
    """Split normalized text into tokens.

    Splits on everything that is not a word character (whitespace and
    punctuation alike), drops tokens shorter than 2 characters and tokens in
    ``stopwords``.  Order is preserved; no empty tokens are produced.
    """
    return [t for t in _TOKEN_RE.findall(norm_text) if len(t) >= 2 and t not in stopwords]


def detect_lang(text: str) -> str:
    """Classify text as ``ar``/``en``/``unknown`` by script majority.

    A text is ``ar`` if at least half of its letters are Arabic-block
    codepoints, ``en`` if at least half are Latin; otherwise ``unknown``.
    """
    arabic = latin = letters = 0
    for ch in text:
        if not ch.isalpha():
            continue
        letters += 1
        cp = ord(ch)
        if any(lo <= cp <= hi for lo, hi in _ARABIC_BLOCKS):
            arabic += 1
        elif cp < 0x250:  # Basic Latin through Latin Extended-B
            latin += 1
    if letters == 0:
        return "unknown"
    if arabic * 2 >= letters:
        return "ar"
    if latin * 2 >= letters:
        return "en"
    return "unknown"


@lru_cache(maxsize=None)
def builtin_stopwords(lang: str | None = None) -> frozenset[str]:
    """Bundled stopword lists, pre-normalized with :func:`normalize_text`.

    ``lang`` may be ``"ar"``, ``"en"`` or ``None`` for the union.
    """
    langs = ("ar", "en") if lang is None else (lang,)
    words: set[str] = set()
    for lg in langs:
        raw = resources.files("marsad.data").joinpath(f"stopwords_{lg}.txt").read_text("utf-8")
        for line in raw.splitlines():
            word = line.strip()
            if word and not word.startswith("#"):
                words.add(normalize_text(word))
    return frozenset(words)
