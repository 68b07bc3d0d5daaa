"""Unsupervised mining of spelling-variant phrase pairs from raw text.

The pipeline: normalize each corpus line, slide n-gram windows of length
``n_min..n_max`` over its tokens, and treat each window as a two-word left
context, a middle target phrase of 1..4 tokens, and a two-word right context.
Two distinct targets observed under the same exact context are variant
candidates; a pair survives when the normalized edit distance between the
forms is at most ``max_distance`` and one form is at least ``ratio`` times as
frequent as the other, with frequencies aggregated over the contexts the two
forms share.  The frequent form becomes the pair's target.

Aggregation counts exactly and can spill sorted runs to disk, so corpora far
larger than memory are processable; results do not depend on spill points,
input order, or worker count.
"""

from __future__ import annotations

import heapq
import logging
import multiprocessing
import os
import tempfile
from dataclasses import dataclass
from operator import itemgetter
from typing import Iterable, Iterator, Mapping, NamedTuple, Sequence

from ._util import DataError, fmt_num
from .editdist import DistanceMode, MAX_PHRASE_WORDS, edit_distance, join_phrase
from .textnorm import NormalizationConfig, normalize_text
from .variants import VariantPair, VariantTable

log = logging.getLogger(__name__)

_CONTEXT_WORDS = 4
_FIELD_SEP = "\x1f"  # never appears inside a token: it splits as whitespace


class ContextKey(NamedTuple):
    """The two words left and two words right of a target phrase."""

    l1: str
    l2: str
    r1: str
    r2: str


class ContextObservation(NamedTuple):
    context: ContextKey
    target: tuple[str, ...]
    count: int = 1


@dataclass(frozen=True)
class MiningConfig:
    n_min: int = 5
    n_max: int = 8
    max_distance: float = 0.6
    ratio: float = 3.0
    min_pair_contexts: int = 1
    distance_mode: DistanceMode = DistanceMode.MIN
    fanout_cap: int = 64
    spill_entries: int = 2_000_000  # in-memory key budget before spilling a run

    def __post_init__(self):
        lo = _CONTEXT_WORDS + 1
        hi = _CONTEXT_WORDS + MAX_PHRASE_WORDS
        if not lo <= self.n_min <= self.n_max <= hi:
            raise ValueError(f"need {lo} <= n_min <= n_max <= {hi}, "
                             f"got [{self.n_min}, {self.n_max}]")
        if not 0 < self.max_distance <= 1:
            raise ValueError(f"max_distance must be in (0, 1], got {self.max_distance}")
        if self.ratio < 1:
            raise ValueError(f"ratio must be >= 1, got {self.ratio}")
        if self.min_pair_contexts < 1:
            raise ValueError(f"min_pair_contexts must be >= 1, got {self.min_pair_contexts}")
        if self.fanout_cap < 2:
            raise ValueError(f"fanout_cap must be >= 2, got {self.fanout_cap}")
        if self.spill_entries < 1:
            raise ValueError(f"spill_entries must be >= 1, got {self.spill_entries}")

    def meta_items(self) -> dict[str, str]:
        return {
            "n_min": str(self.n_min),
            "n_max": str(self.n_max),
            "max_distance": fmt_num(self.max_distance),
            "ratio": fmt_num(self.ratio),
            "min_pair_contexts": str(self.min_pair_contexts),
            "distance_mode": self.distance_mode.value,
            "fanout_cap": str(self.fanout_cap),
        }


def extract_contexts(tokens: Sequence[str],
                     cfg: MiningConfig | None = None) -> Iterator[ContextObservation]:
    """All (context, target) windows of one token sequence, each with count 1.

    A sequence of length L emits sum over n of max(0, L - n + 1) observations;
    overlapping windows are all kept.
    """
    if cfg is None:
        cfg = MiningConfig()
    toks = list(tokens)
    length = len(toks)
    for n in range(cfg.n_min, cfg.n_max + 1):
        if length < n:
            break
        for s in range(length - n + 1):
            w = toks[s:s + n]
            yield ContextObservation(ContextKey(w[0], w[1], w[-2], w[-1]),
                                     tuple(w[2:n - 2]))


def _serialize_key(context: ContextKey, target: tuple[str, ...]) -> str:
    return _FIELD_SEP.join((*context, " ".join(target)))


def _deserialize_key(key: str) -> tuple[ContextKey, tuple[str, ...]]:
    parts = key.split(_FIELD_SEP)
    return ContextKey(*parts[:4]), tuple(parts[4].split(" "))


class _SpillStore:
    """Exact counting of serialized keys with bounded memory.

    Past ``max_entries`` distinct in-memory keys, the store writes a sorted
    ``key\\tcount`` run file; :meth:`items` merge-sorts all runs with whatever
    is still in memory and sums counts per key.
    """

    def __init__(self, tmp_dir: str, max_entries: int):
        self._tmp_dir = tmp_dir
        self._max = max_entries
        self._mem: dict[str, int] = {}
        self.run_paths: list[str] = []

    def add(self, key: str, count: int = 1) -> None:
        mem = self._mem
        mem[key] = mem.get(key, 0) + count
        if len(mem) >= self._max:
            self.spill()

    def spill(self) -> None:
        if not self._mem:
            return
        fd, path = tempfile.mkstemp(dir=self._tmp_dir, prefix="run.", suffix=".tsv")
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            for key, count in sorted(self._mem.items()):
                fh.write(f"{key}\t{count}\n")
        self.run_paths.append(path)
        self._mem.clear()

    @staticmethod
    def _iter_run(path: str) -> Iterator[tuple[str, int]]:
        with open(path, encoding="utf-8") as fh:
            for line in fh:
                key, _, count = line.rstrip("\n").rpartition("\t")
                yield key, int(count)

    def items(self) -> Iterator[tuple[str, int]]:
        """Globally sorted (key, total count) stream."""
        sources: list[Iterable[tuple[str, int]]] = [self._iter_run(p) for p in self.run_paths]
        if self._mem:
            sources.append(sorted(self._mem.items()))
        merged = heapq.merge(*sources, key=itemgetter(0))
        pending_key: str | None = None
        pending_count = 0
        for key, count in merged:
            if key == pending_key:
                pending_count += count
            else:
                if pending_key is not None:
                    yield pending_key, pending_count
                pending_key, pending_count = key, count
        if pending_key is not None:
            yield pending_key, pending_count


def _group_by_context(items: Iterator[tuple[str, int]]
                      ) -> Iterator[tuple[ContextKey, list[tuple[tuple[str, ...], int]]]]:
    # serialized keys sort with all targets of one context adjacent
    ctx: ContextKey | None = None
    targets: list[tuple[tuple[str, ...], int]] = []
    for key, count in items:
        context, target = _deserialize_key(key)
        if context != ctx:
            if ctx is not None:
                yield ctx, targets
            ctx, targets = context, []
        targets.append((target, count))
    if ctx is not None:
        yield ctx, targets


def iter_aggregated(observations: Iterable[ContextObservation],
                    tmp_dir: str | None = None,
                    max_entries: int = 2_000_000
                    ) -> Iterator[tuple[ContextKey, list[tuple[tuple[str, ...], int]]]]:
    """Stream exact per-context target counts, grouped by context."""
    with tempfile.TemporaryDirectory(dir=tmp_dir, prefix="werd-mine-") as tmp:
        store = _SpillStore(tmp, max_entries)
        for obs in observations:
            store.add(_serialize_key(obs.context, obs.target), obs.count)
        yield from _group_by_context(store.items())


def aggregate_counts(observations: Iterable[ContextObservation],
                     tmp_dir: str | None = None,
                     max_entries: int = 2_000_000
                     ) -> dict[ContextKey, dict[tuple[str, ...], int]]:
    """Materialized form of :func:`iter_aggregated` for corpora that fit in memory."""
    return {ctx: dict(targets)
            for ctx, targets in iter_aggregated(observations, tmp_dir, max_entries)}


def _normalize_d(d: int, ja: str, jb: str, mode: DistanceMode) -> float:
    if mode is DistanceMode.MIN:
        return d / min(len(ja), len(jb))
    return (d / len(ja) + d / len(jb)) / 2


def generate_candidates(counts, cfg: MiningConfig | None = None) -> list[VariantPair]:
    """Turn aggregated context counts into gated, oriented variant pairs.

    ``counts`` is either the mapping returned by :func:`aggregate_counts` or
    the stream from :func:`iter_aggregated`.  Frequencies are accumulated over
    shared contexts only, across all n-gram lengths.  Output is sorted by
    (target text, source text).
    """
    if cfg is None:
        cfg = MiningConfig()
    if isinstance(counts, Mapping):
        groups: Iterable = ((ctx, list(targets.items())) for ctx, targets in counts.items())
    else:
        groups = counts

    t = cfg.max_distance
    mode = cfg.distance_mode
    # pair key -> [count_a, count_b, shared contexts]; keys are (ja, jb) with ja < jb
    stats: dict[tuple[str, str], list] = {}
    phrases: dict[str, tuple[str, ...]] = {}
    dist_memo: dict[tuple[str, str], float | None] = {}
    capped = 0

    for _ctx, targets in groups:
        if len(targets) < 2:
            continue
        if len(targets) > cfg.fanout_cap:
            capped += 1
            targets = sorted(targets, key=lambda e: (-e[1], " ".join(e[0])))[:cfg.fanout_cap]
        entries = sorted(((" ".join(tgt), tgt, cnt) for tgt, cnt in targets),
                         key=itemgetter(0))
        for ia in range(len(entries) - 1):
            ja, ta, ca = entries[ia]
            for ib in range(ia + 1, len(entries)):
                jb, tb, cb = entries[ib]
                key = (ja, jb)
                dist = dist_memo.get(key, -1.0)
                if dist == -1.0:
                    # cheap lower bound from the length difference first
                    lb = abs(len(ja) - len(jb))
                    if lb and _normalize_d(lb, ja, jb, mode) > t:
                        dist = None
                    else:
                        dist = _normalize_d(edit_distance(ja, jb), ja, jb, mode)
                        if dist > t:
                            dist = None
                    dist_memo[key] = dist
                    if dist is not None:
                        phrases[ja] = ta
                        phrases[jb] = tb
                if dist is None:
                    continue
                st = stats.get(key)
                if st is None:
                    stats[key] = [ca, cb, 1]
                else:
                    st[0] += ca
                    st[1] += cb
                    st[2] += 1

    if capped:
        log.warning("per-context target fan-out exceeded %d in %d context(s); "
                    "kept the most frequent targets", cfg.fanout_cap, capped)

    pairs: list[VariantPair] = []
    for (ja, jb), (ca, cb, n_ctx) in stats.items():
        if n_ctx < cfg.min_pair_contexts:
            continue
        if max(ca, cb) < cfg.ratio * min(ca, cb):
            continue
        # the frequent form is the target; on a tie the lexicographically
        # smaller joined form wins (only reachable when ratio == 1)
        if ca > cb or (ca == cb and ja < jb):
            target, source, tc, sc = phrases[ja], phrases[jb], ca, cb
        else:
            target, source, tc, sc = phrases[jb], phrases[ja], cb, ca
        pairs.append(VariantPair(target, source, tc, sc, dist_memo[(ja, jb)]))
    pairs.sort(key=lambda p: (p.target_text, p.source_text))
    return pairs


def _map_corpus_file(args) -> list[str]:
    """Worker: one corpus file -> sorted run files of serialized key counts."""
    path, mining_cfg, norm_cfg, tmp_dir, max_entries = args
    store = _SpillStore(tmp_dir, max_entries)
    try:
        fh = open(path, encoding="utf-8")
    except OSError as exc:
        raise DataError(f"cannot read corpus: {exc}", path=path) from exc
    with fh:
        for line in fh:
            tokens = normalize_text(line, norm_cfg)
            for obs in extract_contexts(tokens, mining_cfg):
                store.add(_serialize_key(obs.context, obs.target))
    store.spill()
    return store.run_paths


def mine(paths: Sequence[str | os.PathLike],
         cfg: MiningConfig | None = None,
         norm_cfg: NormalizationConfig | None = None,
         out_path: str | os.PathLike | None = None,
         jobs: int = 1,
         tmp_dir: str | None = None) -> VariantTable:
    """Mine a variant table from raw corpus files (one document per line).

    With ``jobs > 1`` input files are mapped in parallel; the reduce is a
    deterministic merge of sorted runs, so the table is identical for any
    worker count.  The table's metadata echoes the mining and normalization
    configuration; when ``out_path`` is given the table is also saved there.
    """
    if cfg is None:
        cfg = MiningConfig()
    if norm_cfg is None:
        norm_cfg = NormalizationConfig()
    if not paths:
        raise ValueError("at least one corpus path is required")
    if jobs < 1:
        raise ValueError(f"jobs must be >= 1, got {jobs}")

    with tempfile.TemporaryDirectory(dir=tmp_dir, prefix="werd-mine-") as tmp:
        tasks = [(os.fspath(p), cfg, norm_cfg, tmp, cfg.spill_entries) for p in paths]
        if jobs > 1 and len(tasks) > 1:
            with multiprocessing.Pool(min(jobs, len(tasks))) as pool:
                run_lists = pool.map(_map_corpus_file, tasks)
        else:
            run_lists = [_map_corpus_file(task) for task in tasks]
        store = _SpillStore(tmp, 1)
        store.run_paths = [p for runs in run_lists for p in runs]
        pairs = generate_candidates(_group_by_context(store.items()), cfg)

    meta = dict(cfg.meta_items())
    meta.update(norm_cfg.meta_items())
    table = VariantTable(pairs, meta)
    if out_path is not None:
        table.save(out_path)
    return table
