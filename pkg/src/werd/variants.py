"""Spelling-variant phrase pairs: the table type, TSV persistence, filtering,
lookup, classification, and match sampling."""

from __future__ import annotations

import random
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Iterator, NamedTuple

from ._util import DataError, atomic_open, fmt_num
from .editdist import MAX_PHRASE_WORDS, join_phrase


class VariantClass(Enum):
    SPLITTING = "splitting"       # rare form has fewer tokens than frequent form
    MERGING = "merging"           # rare form has more tokens
    SUBSTITUTION = "substitution" # same token count


def _as_phrase(value) -> tuple[str, ...]:
    if isinstance(value, str):
        value = value.split(" ")
    return tuple(value)


@dataclass(frozen=True)
class VariantPair:
    """One mined pair: ``target`` is the frequent form, ``source`` the rare one.

    ``score`` is the normalized edit distance between the two forms, held at
    4-decimal precision so the TSV representation is lossless.
    """

    target: tuple[str, ...]
    source: tuple[str, ...]
    target_count: int
    source_count: int
    score: float

    def __post_init__(self):
        object.__setattr__(self, "target", _as_phrase(self.target))
        object.__setattr__(self, "source", _as_phrase(self.source))
        object.__setattr__(self, "score", round(float(self.score), 4))
        for side, phrase in (("target", self.target), ("source", self.source)):
            if not 1 <= len(phrase) <= MAX_PHRASE_WORDS:
                raise ValueError(f"{side} must span 1..{MAX_PHRASE_WORDS} tokens: {phrase!r}")
            for t in phrase:
                if not t or any(c.isspace() for c in t):
                    raise ValueError(f"invalid token {t!r} in {side} phrase")
        if self.target == self.source:
            raise ValueError(f"target and source must differ: {self.target!r}")
        if self.target_count < 1 or self.source_count < 1:
            raise ValueError("pair counts must be positive")
        if not self.score > 0:
            raise ValueError(f"pair score must be > 0, got {self.score!r}")

    @property
    def target_text(self) -> str:
        return " ".join(self.target)

    @property
    def source_text(self) -> str:
        return " ".join(self.source)


def classify(pair: VariantPair) -> VariantClass:
    """Class of the rewrite taking the rare form to the frequent one."""
    if len(pair.source) < len(pair.target):
        return VariantClass.SPLITTING
    if len(pair.source) > len(pair.target):
        return VariantClass.MERGING
    return VariantClass.SUBSTITUTION


def _unordered_key(a: str, b: str) -> tuple[str, str]:
    return (a, b) if a <= b else (b, a)


class VariantTable:
    """An immutable collection of variant pairs with symmetric phrase lookup."""

    def __init__(self, pairs: Iterable[VariantPair] = (), meta: dict[str, str] | None = None):
        ordered = sorted(pairs, key=lambda p: (p.target_text, p.source_text))
        seen: set[tuple[str, str]] = set()
        index: dict[str, dict[str, VariantPair]] = {}
        for p in ordered:
            key = _unordered_key(p.target_text, p.source_text)
            if key in seen:
                raise ValueError(f"duplicate pair {key[0]!r} / {key[1]!r}")
            seen.add(key)
            index.setdefault(p.target_text, {})[p.source_text] = p
            index.setdefault(p.source_text, {})[p.target_text] = p
        self.pairs: tuple[VariantPair, ...] = tuple(ordered)
        self.meta: dict[str, str] | None = dict(meta) if meta is not None else None
        self._index = index

    def __len__(self) -> int:
        return len(self.pairs)

    def __iter__(self) -> Iterator[VariantPair]:
        return iter(self.pairs)

    def __eq__(self, other) -> bool:
        if not isinstance(other, VariantTable):
            return NotImplemented
        return self.pairs == other.pairs and self.meta == other.meta

    def __repr__(self) -> str:
        return f"VariantTable({len(self.pairs)} pairs)"

    def lookup_pair(self, a, b) -> VariantPair | None:
        """The pair containing phrases ``a`` and ``b`` in either order, if any."""
        return self._index.get(join_phrase(a), {}).get(join_phrase(b))

    def partners(self, phrase) -> dict[str, VariantPair]:
        """Map from partner phrase text to pair, for every pair containing ``phrase``."""
        return self._index.get(join_phrase(phrase), {})

    def pairs_for_phrase(self, phrase) -> tuple[VariantPair, ...]:
        return tuple(self.partners(phrase).values())

    @property
    def max_score(self) -> float:
        return max((p.score for p in self.pairs), default=0.0)

    def filter(self, max_ed: float) -> "VariantTable":
        """Sub-table keeping pairs with score <= ``max_ed``; metadata records the bound."""
        if max_ed < 0:
            raise ValueError(f"max_ed must be >= 0, got {max_ed}")
        kept = [p for p in self.pairs if p.score <= max_ed]
        meta = dict(self.meta) if self.meta is not None else {}
        meta["max_distance"] = fmt_num(max_ed)
        return VariantTable(kept, meta)

    # -- persistence --------------------------------------------------------

    def save(self, path) -> None:
        """Write the table as TSV; byte-stable for a given table.

        Leading ``# key=value`` comment lines carry the metadata (sorted by
        key); each pair is ``target\\tsource\\ttarget_count\\tsource_count\\tscore``.
        An empty table with no metadata produces an empty file.
        """
        with atomic_open(path) as fh:
            if self.meta:
                for key in sorted(self.meta):
                    fh.write(f"# {key}={self.meta[key]}\n")
            for p in self.pairs:
                fh.write(f"{p.target_text}\t{p.source_text}\t{p.target_count}"
                         f"\t{p.source_count}\t{fmt_num(p.score)}\n")

    @classmethod
    def load(cls, path) -> "VariantTable":
        """Read a table written by :meth:`save`; malformed lines are fatal."""
        pairs: list[VariantPair] = []
        meta: dict[str, str] = {}
        seen: set[tuple[str, str]] = set()
        try:
            fh = open(path, encoding="utf-8")
        except OSError as exc:
            raise DataError(f"cannot read table: {exc}", path=path) from exc
        with fh:
            for ln, line in enumerate(fh, 1):
                line = line.rstrip("\r\n")
                if not line.strip():
                    continue
                if line.startswith("#"):
                    body = line.lstrip("#").strip()
                    if "=" in body:
                        key, value = body.split("=", 1)
                        meta[key.strip()] = value
                    continue
                cols = line.split("\t")
                if len(cols) != 5:
                    raise DataError(f"expected 5 tab-separated columns, got {len(cols)}",
                                    path=path, line=ln)
                try:
                    pair = VariantPair(cols[0], cols[1], int(cols[2]), int(cols[3]),
                                       float(cols[4]))
                except ValueError as exc:
                    raise DataError(str(exc), path=path, line=ln) from exc
                key = _unordered_key(pair.target_text, pair.source_text)
                if key in seen:
                    raise DataError(f"duplicate pair {key[0]!r} / {key[1]!r}",
                                    path=path, line=ln)
                seen.add(key)
                pairs.append(pair)
        return cls(pairs, meta or None)


def class_histogram(table: VariantTable) -> dict[VariantClass, float]:
    """Percentage of pairs per class; rejects an empty table."""
    if len(table) == 0:
        raise ValueError("cannot build a class histogram for an empty table")
    counts = {cls: 0 for cls in VariantClass}
    for p in table:
        counts[classify(p)] += 1
    total = len(table)
    return {cls: 100.0 * n / total for cls, n in counts.items()}


class MatchSample(NamedTuple):
    segment_id: str
    hyp_text: str
    ref_text: str
    score: float


def sample_matches(reports, k: int, seed: int = 0) -> list[MatchSample]:
    """Reproducible uniform sample of variant matches drawn from score reports.

    ``reports`` is any iterable of report objects whose ``segments`` entries
    expose ``segment_id`` and ``variant_ops`` (see ``werd.metrics``).  Returns
    all matches when fewer than ``k`` exist.
    """
    if k < 1:
        raise ValueError(f"sample size must be >= 1, got {k}")
    flat = [MatchSample(seg.segment_id, m.hyp_text, m.ref_text, m.score)
            for rep in reports for seg in rep.segments for m in seg.variant_ops]
    if len(flat) <= k:
        return flat
    return random.Random(seed).sample(flat, k)
