"""Corpus-level scoring and analysis on top of the alignment engines.

All corpus values are ``100 * total cost / total reference length``.  A
segment whose reference is empty while the hypothesis is not contributes its
full hypothesis length to the cost and nothing to the denominator; such
segments are flagged.
"""

from __future__ import annotations

import math
import multiprocessing
from dataclasses import dataclass, field
from typing import Iterable, NamedTuple, Sequence

from ._util import DataError, atomic_open, fmt_num
from .align import (Alignment, CostMode, OpKind, TABLE_COST, ter_align, wer_align,
                    werd_align)
from .textnorm import Segment
from .variants import VariantTable

METRICS = ("wer", "werd", "ter", "mrwer")


class VariantMatch(NamedTuple):
    hyp_text: str
    ref_text: str
    score: float


@dataclass(frozen=True)
class SegmentScore:
    segment_id: str
    cost: float
    ref_len: int
    insertions: int
    deletions: int
    substitutions: int
    variant_matches: int
    variant_ops: tuple[VariantMatch, ...] = ()
    empty_reference: bool = False


@dataclass
class ScoreReport:
    """Per-segment scores plus a config echo; the corpus value is recomputed
    from the entries, never stored."""

    metric: str
    segments: list[SegmentScore]
    config: dict[str, str] = field(default_factory=dict)

    @property
    def total_cost(self) -> float:
        return sum(s.cost for s in self.segments)

    @property
    def total_ref_len(self) -> int:
        return sum(s.ref_len for s in self.segments)

    @property
    def total_variant_matches(self) -> int:
        return sum(s.variant_matches for s in self.segments)

    @property
    def corpus_value(self) -> float:
        denom = self.total_ref_len
        if denom == 0:
            return 0.0 if self.total_cost == 0 else math.inf
        return 100.0 * self.total_cost / denom


def _check_same_ids(hyp_ids: Iterable[str], ref_ids: Iterable[str],
                    what: str = "reference") -> None:
    hyp_set, ref_set = set(hyp_ids), set(ref_ids)
    if hyp_set == ref_set:
        if not hyp_set:
            raise DataError("empty id intersection: no segments to score")
        return
    def _show(ids: set[str]) -> str:
        shown = sorted(ids)[:20]
        extra = f" (+{len(ids) - 20} more)" if len(ids) > 20 else ""
        return ", ".join(shown) + extra
    parts = []
    only_hyp = hyp_set - ref_set
    only_ref = ref_set - hyp_set
    if only_hyp:
        parts.append(f"ids without a {what}: {_show(only_hyp)}")
    if only_ref:
        parts.append(f"{what} ids without a hypothesis: {_show(only_ref)}")
    raise DataError("segment id mismatch; " + "; ".join(parts))


def align_segment(metric: str, hyp: tuple[str, ...],
                  refs: Sequence[tuple[str, ...]],
                  table: VariantTable | None = None,
                  cost_mode: CostMode = TABLE_COST) -> tuple[Alignment, int, int]:
    """Align one segment; returns (alignment, shift count, chosen ref index)."""
    if metric == "wer":
        return wer_align(hyp, refs[0]), 0, 0
    if metric == "werd":
        return werd_align(hyp, refs[0], table, cost_mode), 0, 0
    if metric == "ter":
        alignment, shifts = ter_align(hyp, refs[0])
        return alignment, shifts, 0
    if metric == "mrwer":
        # oracle choice: fewest edits, then fewer reference words, then lowest index
        best = None
        for idx, ref in enumerate(refs):
            alignment = wer_align(hyp, ref)
            key = (alignment.total_cost, len(ref), idx)
            if best is None or key < best[0]:
                best = (key, alignment, idx)
        return best[1], 0, best[2]
    raise ValueError(f"unknown metric {metric!r}")


def _segment_score(metric: str, seg_id: str, hyp: tuple[str, ...],
                   refs: Sequence[tuple[str, ...]],
                   table: VariantTable | None,
                   cost_mode: CostMode) -> SegmentScore:
    alignment, shifts, ref_idx = align_segment(metric, hyp, refs, table, cost_mode)
    ref = refs[ref_idx]
    matches = tuple(
        VariantMatch(" ".join(hyp[op.hyp_span[0]:op.hyp_span[1]]),
                     " ".join(ref[op.ref_span[0]:op.ref_span[1]]),
                     op.pair.score)
        for op in alignment.ops if op.kind is OpKind.VARIANT)
    return SegmentScore(
        segment_id=seg_id,
        cost=alignment.total_cost + shifts,
        ref_len=len(ref),
        insertions=alignment.insertions,
        deletions=alignment.deletions,
        substitutions=alignment.substitutions,
        variant_matches=len(matches),
        variant_ops=matches,
        empty_reference=(not ref and bool(hyp)),
    )


_worker_cfg: dict = {}


def _init_worker(metric, table, cost_mode):
    _worker_cfg.update(metric=metric, table=table, cost_mode=cost_mode)


def _worker_score(task):
    seg_id, hyp, refs = task
    return _segment_score(_worker_cfg["metric"], seg_id, hyp, refs,
                          _worker_cfg["table"], _worker_cfg["cost_mode"])


def _score_tasks(metric: str, tasks: list[tuple[str, tuple[str, ...], tuple]],
                 table: VariantTable | None, cost_mode: CostMode,
                 jobs: int) -> list[SegmentScore]:
    if jobs > 1 and len(tasks) > 1:
        with multiprocessing.Pool(jobs, _init_worker, (metric, table, cost_mode)) as pool:
            chunk = max(1, len(tasks) // (jobs * 4))
            return pool.map(_worker_score, tasks, chunksize=chunk)
    return [_segment_score(metric, sid, hyp, refs, table, cost_mode)
            for sid, hyp, refs in tasks]


def score_corpus(hyps: Sequence[Segment], refs: Sequence[Segment], *,
                 metric: str = "wer",
                 table: VariantTable | None = None,
                 cost_mode: CostMode = TABLE_COST,
                 config: dict[str, str] | None = None,
                 jobs: int = 1) -> ScoreReport:
    """Score hypotheses against single references with WER, WERd, or TER.

    Segment ids must match bijectively; report rows follow hypothesis order.
    """
    if metric not in ("wer", "werd", "ter"):
        raise ValueError(f"score_corpus handles wer/werd/ter, got {metric!r}")
    ref_by_id = {s.id: s for s in refs}
    _check_same_ids((s.id for s in hyps), ref_by_id)
    tasks = [(s.id, s.tokens, (ref_by_id[s.id].tokens,)) for s in hyps]
    segments = _score_tasks(metric, tasks, table, cost_mode, jobs)
    return ScoreReport(metric, segments, dict(config or {}))


def mr_wer(hyps: Sequence[Segment], ref_sets: Sequence[Sequence[Segment]],
           mode: str = "oracle",
           config: dict[str, str] | None = None,
           jobs: int = 1) -> ScoreReport:
    """Multi-reference WER: per segment, the oracle reference (fewest raw edits)
    provides both the edit count and the denominator contribution.

    ``ref_sets`` holds one segment list per reference source; sets may be
    ragged as long as every hypothesis id appears in at least one of them.
    """
    if mode != "oracle":
        raise ValueError(f"unsupported multi-reference mode {mode!r}")
    if not ref_sets:
        raise ValueError("at least one reference set is required")
    by_id: dict[str, list[tuple[str, ...]]] = {}
    for ref_set in ref_sets:
        for seg in ref_set:
            by_id.setdefault(seg.id, []).append(seg.tokens)
    _check_same_ids((s.id for s in hyps), by_id)
    tasks = [(s.id, s.tokens, tuple(by_id[s.id])) for s in hyps]
    segments = _score_tasks("mrwer", tasks, None, TABLE_COST, jobs)
    return ScoreReport("mrwer", segments, dict(config or {}))


def pairwise_overlap(ref_a: Sequence[Segment], ref_b: Sequence[Segment]) -> float:
    """Similarity of two reference sets on matching ids, as a percentage:
    ``100 * (1 - total word edits / total max segment length)``."""
    b_by_id = {s.id: s for s in ref_b}
    _check_same_ids((s.id for s in ref_a), b_by_id, what="counterpart")
    edits = 0
    denom = 0
    for seg in ref_a:
        other = b_by_id[seg.id]
        edits += int(wer_align(seg.tokens, other.tokens).total_cost)
        denom += max(len(seg.tokens), len(other.tokens))
    if denom == 0:
        return 100.0
    return 100.0 * (1.0 - edits / denom)


@dataclass(frozen=True)
class CorrelationResult:
    metric_a: str
    metric_b: str
    n: int
    r: float | None          # None when a side has zero variance
    degenerate: bool = False


def pearson(a: Sequence[float], b: Sequence[float],
            names: tuple[str, str] = ("a", "b")) -> CorrelationResult:
    """Pearson correlation via the two-pass centered-sums formula.

    Zero variance on either side yields an explicit degenerate marker rather
    than a number.
    """
    if len(a) != len(b):
        raise ValueError(f"length mismatch: {len(a)} vs {len(b)}")
    n = len(a)
    if n < 2:
        raise ValueError(f"need at least 2 points, got {n}")
    mean_a = math.fsum(a) / n
    mean_b = math.fsum(b) / n
    sxy = math.fsum((x - mean_a) * (y - mean_b) for x, y in zip(a, b))
    sxx = math.fsum((x - mean_a) ** 2 for x in a)
    syy = math.fsum((y - mean_b) ** 2 for y in b)
    if sxx == 0.0 or syy == 0.0:
        return CorrelationResult(names[0], names[1], n, None, True)
    r = sxy / math.sqrt(sxx * syy)
    r = max(-1.0, min(1.0, r))
    return CorrelationResult(names[0], names[1], n, r, False)


@dataclass(frozen=True)
class SweepPoint:
    threshold: float
    report: ScoreReport
    variant_matches: int
    table_pairs: int


def threshold_sweep(hyps: Sequence[Segment], refs: Sequence[Segment],
                    table: VariantTable, thresholds: Sequence[float],
                    cost_mode: CostMode = TABLE_COST,
                    jobs: int = 1) -> list[SweepPoint]:
    """WERd at each distance threshold, scored with the table filtered to it.

    Thresholds must be strictly increasing, so the filtered tables are nested.
    """
    ths = list(thresholds)
    if not ths:
        raise ValueError("at least one threshold is required")
    if any(t2 <= t1 for t1, t2 in zip(ths, ths[1:])):
        raise ValueError("thresholds must be strictly increasing")
    points = []
    for th in ths:
        sub = table.filter(th)
        report = score_corpus(hyps, refs, metric="werd", table=sub,
                              cost_mode=cost_mode, jobs=jobs,
                              config={"max_distance": fmt_num(th)})
        points.append(SweepPoint(th, report, report.total_variant_matches, len(sub)))
    return points


# ---------------------------------------------------------------------------
# Report persistence

def save_report(report: ScoreReport, path, stamp: str | None = None) -> None:
    """Write the per-segment TSV with a final commented corpus summary line."""
    with atomic_open(path) as fh:
        for s in report.segments:
            fh.write(f"{s.segment_id}\t{fmt_num(s.cost)}\t{s.ref_len}\t{s.insertions}"
                     f"\t{s.deletions}\t{s.substitutions}\t{s.variant_matches}\n")
        extras = "".join(f" {k}={v}" for k, v in sorted(report.config.items()))
        if stamp:
            extras += f" stamped={stamp}"
        empty_refs = sum(1 for s in report.segments if s.empty_reference)
        fh.write(f"# metric={report.metric} corpus={report.corpus_value:.2f}"
                 f" cost={fmt_num(report.total_cost)} ref_len={report.total_ref_len}"
                 f" segments={len(report.segments)}"
                 f" empty_references={empty_refs}{extras}\n")


def load_report(path) -> ScoreReport:
    """Read a report written by :func:`save_report` (variant op details are
    not persisted, only their counts)."""
    segments: list[SegmentScore] = []
    metric = "wer"
    config: dict[str, str] = {}
    seen: set[str] = set()
    try:
        fh = open(path, encoding="utf-8")
    except OSError as exc:
        raise DataError(f"cannot read report: {exc}", path=path) from exc
    with fh:
        for ln, line in enumerate(fh, 1):
            line = line.rstrip("\r\n")
            if not line.strip():
                continue
            if line.startswith("#"):
                for item in line.lstrip("#").split():
                    if "=" in item:
                        key, value = item.split("=", 1)
                        if key == "metric":
                            metric = value
                        elif key not in ("corpus", "cost", "ref_len", "segments",
                                         "empty_references"):
                            config[key] = value
                continue
            cols = line.split("\t")
            if len(cols) != 7:
                raise DataError(f"expected 7 tab-separated columns, got {len(cols)}",
                                path=path, line=ln)
            try:
                seg = SegmentScore(cols[0], float(cols[1]), int(cols[2]), int(cols[3]),
                                   int(cols[4]), int(cols[5]), int(cols[6]))
            except ValueError as exc:
                raise DataError(str(exc), path=path, line=ln) from exc
            if seg.segment_id in seen:
                raise DataError(f"duplicate segment id {seg.segment_id!r}",
                                path=path, line=ln)
            seen.add(seg.segment_id)
            segments.append(seg)
    return ScoreReport(metric, segments, config)
