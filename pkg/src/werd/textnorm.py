"""Normalization of noisy dialectal text, segment file I/O, and Buckwalter transliteration.

The normalization pipeline is applied in a fixed order so that corpora and
transcripts tokenized at different times agree byte for byte:

1. removal of Arabic diacritics (U+064B..U+065F, U+0670) and tatweel (U+0640)
2. orthographic surface folding (alef/hamza forms -> bare alef, alef maksura ->
   yah, teh marbuta -> heh)
3. letter-repetition capping (runs longer than ``repetition_cap`` are truncated)
4. placeholders: URLs -> ``<URL>``, @-mentions -> ``<USER>``, emoticons -> ``<EMO>``
5. hashtag unwrapping: leading ``#`` stripped, ``_`` inside the tag becomes a
   space; applied repeatedly, since a freed underscore can expose a nested tag
6. whitespace tokenization

Character-level rewrites run before the pattern replacements on purpose: a
stripped diacritic or a folded letter can complete a mention, an emoticon, or
an over-long run, and the later stages must see that final form.  Applying the
pipeline to its own output is then a no-op; ``normalize_idempotence_check``
asserts exactly that and is exercised by the test suite on fuzzed input.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from functools import lru_cache

from ._util import DataError

ARABIC_DIACRITICS = "".join(chr(c) for c in range(0x064B, 0x0660)) + "ٰ"
TATWEEL = "ـ"

_DIACRITIC_DELETE = {ord(c): None for c in ARABIC_DIACRITICS}

# hamza-carrying alefs and alef wasla fold to bare alef; dotless yah and teh
# marbuta fold to their unmarked skeletons
_SURFACE_FOLD = str.maketrans({
    "آ": "ا", "أ": "ا", "إ": "ا", "ٱ": "ا",
    "ى": "ي",
    "ة": "ه",
})

_URL_RE = re.compile(r"(?:[A-Za-z][A-Za-z0-9+.\-]*://|www\.)\S+")
_MENTION_RE = re.compile(r"@[A-Za-z0-9_]+")

_EMOJI_CORE = "\U0001F000-\U0001FAFF☀-➿⬀-⯿"
_ASCII_EMOTICONS = (
    ":-)", ":-(", ":-D", ":-P", ":')", ":'(", "^_^", "-_-",
    ":)", ":(", ";)", ";-)", ":D", ":P", ":p", "xD", "XD", "<3", ":O", ":o",
)
# one placeholder per emoticon run: an emoji plus trailing emoji/modifiers
# counts as a single occurrence
_EMOTICON_RE = re.compile(
    "|".join([f"[{_EMOJI_CORE}][{_EMOJI_CORE}︎️‍]*"]
             + [re.escape(e) for e in sorted(_ASCII_EMOTICONS, key=len, reverse=True)])
)

_HASHTAG_RE = re.compile(r"(?:(?<=\s)|^)#+(\S+)")


@dataclass(frozen=True)
class NormalizationConfig:
    """Switches for the normalization pipeline; defaults match the mining setup."""

    replace_urls: bool = True
    replace_mentions: bool = True
    replace_emoticons: bool = True
    unwrap_hashtags: bool = True
    strip_diacritics: bool = True
    strip_tatweel: bool = True
    repetition_cap: int = 3
    arabic_surface: bool = True

    def __post_init__(self):
        if self.repetition_cap < 1:
            raise ValueError(f"repetition_cap must be >= 1, got {self.repetition_cap}")

    def meta_items(self) -> dict[str, str]:
        """Config echo for table/report metadata (stable key order)."""
        return {
            "replace_urls": "1" if self.replace_urls else "0",
            "replace_mentions": "1" if self.replace_mentions else "0",
            "replace_emoticons": "1" if self.replace_emoticons else "0",
            "unwrap_hashtags": "1" if self.unwrap_hashtags else "0",
            "strip_diacritics": "1" if self.strip_diacritics else "0",
            "strip_tatweel": "1" if self.strip_tatweel else "0",
            "repetition_cap": str(self.repetition_cap),
            "arabic_surface": "1" if self.arabic_surface else "0",
        }


@lru_cache(maxsize=8)
def _cap_re(cap: int) -> re.Pattern:
    return re.compile(r"(.)\1{%d,}" % cap, re.DOTALL)


def normalize_text(raw: str, cfg: NormalizationConfig | None = None) -> list[str]:
    """Run the full pipeline on one line of raw text and return its tokens.

    Tokens never contain whitespace and are never empty.
    """
    if cfg is None:
        cfg = NormalizationConfig()
    s = raw
    if cfg.strip_diacritics:
        s = s.translate(_DIACRITIC_DELETE)
    if cfg.strip_tatweel:
        s = s.replace(TATWEEL, "")
    if cfg.arabic_surface:
        # before capping: folding can merge distinct hamza forms into one run
        s = s.translate(_SURFACE_FOLD)
    cap = cfg.repetition_cap
    s = _cap_re(cap).sub(lambda m: m.group(1) * cap, s)
    if cfg.replace_urls:
        s = _URL_RE.sub("<URL>", s)
    if cfg.replace_mentions:
        s = _MENTION_RE.sub("<USER>", s)
    if cfg.replace_emoticons:
        s = _EMOTICON_RE.sub("<EMO>", s)
    if cfg.unwrap_hashtags:
        # repeat until settled: an underscore turned into a space can expose
        # a nested tag (#a_#b -> a #b); every round consumes a '#'
        while True:
            unwrapped = _HASHTAG_RE.sub(lambda m: m.group(1).replace("_", " "), s)
            if unwrapped == s:
                break
            s = unwrapped
    return s.split()


def normalize_idempotence_check(raw: str, cfg: NormalizationConfig | None = None) -> bool:
    """True iff normalizing the joined output reproduces the output."""
    first = normalize_text(raw, cfg)
    return normalize_text(" ".join(first), cfg) == first


# ---------------------------------------------------------------------------
# Buckwalter transliteration (one-to-one, reversible on the mapped sets)

_BW2AR = {
    "'": "ء", "|": "آ", ">": "أ", "&": "ؤ", "<": "إ",
    "}": "ئ", "A": "ا", "b": "ب", "p": "ة", "t": "ت",
    "v": "ث", "j": "ج", "H": "ح", "x": "خ", "d": "د",
    "*": "ذ", "r": "ر", "z": "ز", "s": "س", "$": "ش",
    "S": "ص", "D": "ض", "T": "ط", "Z": "ظ", "E": "ع",
    "g": "غ", "_": "ـ", "f": "ف", "q": "ق", "k": "ك",
    "l": "ل", "m": "م", "n": "ن", "h": "ه", "w": "و",
    "Y": "ى", "y": "ي", "F": "ً", "N": "ٌ", "K": "ٍ",
    "a": "َ", "u": "ُ", "i": "ِ", "~": "ّ", "o": "ْ",
    "`": "ٰ", "{": "ٱ",
}
_ENCODE_TABLE = str.maketrans({ar: bw for bw, ar in _BW2AR.items()})
_DECODE_TABLE = str.maketrans(_BW2AR)


def buckwalter_encode(text: str) -> str:
    """Arabic script -> Buckwalter ASCII; unmapped characters pass through."""
    return text.translate(_ENCODE_TABLE)


def buckwalter_decode(text: str) -> str:
    """Buckwalter ASCII -> Arabic script; unmapped characters pass through."""
    return text.translate(_DECODE_TABLE)


# ---------------------------------------------------------------------------
# Segments

@dataclass(frozen=True)
class Segment:
    """One scoring unit: an id plus its (possibly empty) token sequence."""

    id: str
    tokens: tuple[str, ...]

    def __post_init__(self):
        if not self.id or any(c.isspace() for c in self.id):
            raise ValueError(f"segment id must be non-empty and whitespace-free: {self.id!r}")
        for t in self.tokens:
            if not t or any(c.isspace() for c in t):
                raise ValueError(f"invalid token {t!r} in segment {self.id!r}")

    @property
    def text(self) -> str:
        return " ".join(self.tokens)


def read_segments(path, cfg: NormalizationConfig | None = None) -> list[Segment]:
    """Read a segment file: one ``<id>\\t<text>`` per line, UTF-8.

    Blank lines are skipped.  When ``cfg`` is given the text is normalized,
    otherwise it is split on whitespace as-is.  Malformed lines and duplicate
    ids raise :class:`DataError` with the offending line number.
    """
    segments: list[Segment] = []
    seen: set[str] = set()
    try:
        fh = open(path, encoding="utf-8")
    except OSError as exc:
        raise DataError(f"cannot read segment file: {exc}", path=path) from exc
    with fh:
        for ln, line in enumerate(fh, 1):
            line = line.rstrip("\r\n")
            if not line.strip():
                continue
            if "\t" not in line:
                raise DataError("expected '<id>\\t<text>'", path=path, line=ln)
            seg_id, text = line.split("\t", 1)
            if not seg_id or any(c.isspace() for c in seg_id):
                raise DataError(f"bad segment id {seg_id!r}", path=path, line=ln)
            if seg_id in seen:
                raise DataError(f"duplicate segment id {seg_id!r}", path=path, line=ln)
            seen.add(seg_id)
            tokens = normalize_text(text, cfg) if cfg is not None else text.split()
            segments.append(Segment(seg_id, tuple(tokens)))
    return segments
