"""Character-level Levenshtein distance and length-normalized phrase distance."""

from __future__ import annotations

from enum import Enum
from typing import Sequence

# phrases compared or substituted anywhere in this package span 1..4 tokens
MAX_PHRASE_WORDS = 4


class DistanceMode(Enum):
    """Denominator for normalized distance: shorter string, or both averaged."""

    MIN = "min"
    AVG = "avg"

    @classmethod
    def parse(cls, text: str) -> "DistanceMode":
        try:
            return cls(text.lower())
        except ValueError:
            raise ValueError(f"unknown distance mode {text!r} (expected 'min' or 'avg')") from None


def edit_distance(a: str, b: str) -> int:
    """Unit-cost Levenshtein distance over code points; spaces count like any symbol."""
    if a == b:
        return 0
    if len(a) < len(b):
        a, b = b, a
    if not b:
        return len(a)
    # two-row DP
    prev = list(range(len(b) + 1))
    for i, ca in enumerate(a, 1):
        cur = [i]
        for j, cb in enumerate(b, 1):
            if ca == cb:
                cur.append(prev[j - 1])
            else:
                cur.append(1 + min(prev[j - 1], prev[j], cur[-1]))
        prev = cur
    return prev[-1]


def join_phrase(phrase: str | Sequence[str]) -> str:
    """Single-space-joined form of a phrase given as tokens (strings pass through)."""
    return phrase if isinstance(phrase, str) else " ".join(phrase)


def normalized_distance(a: str | Sequence[str], b: str | Sequence[str],
                        mode: DistanceMode = DistanceMode.MIN) -> float:
    """Edit distance between the joined phrases, scaled by their lengths.

    MIN divides by the shorter joined length; AVG averages the two per-side
    ratios.  Empty phrases are rejected.
    """
    ja, jb = join_phrase(a), join_phrase(b)
    if not ja or not jb:
        raise ValueError("phrases must be non-empty")
    d = edit_distance(ja, jb)
    if mode is DistanceMode.MIN:
        return d / min(len(ja), len(jb))
    if mode is DistanceMode.AVG:
        return (d / len(ja) + d / len(jb)) / 2
    raise ValueError(f"unknown mode: {mode!r}")
