"""Dialect-aware ASR evaluation.

Scores transcripts with WER, WERd (edit alignment that accepts known spelling
variants), TER, and multi-reference WER, and mines the spelling-variant pairs
that WERd consumes from raw text corpora without supervision.
"""

from ._util import DataError, WerdError
from .align import (Alignment, CostMode, EditOp, OpKind, TABLE_COST, ZERO_COST,
                    brute_force_align, render_alignment, ter_align, wer_align,
                    werd_align)
from .editdist import (DistanceMode, MAX_PHRASE_WORDS, edit_distance, join_phrase,
                       normalized_distance)
from .metrics import (CorrelationResult, ScoreReport, SegmentScore, SweepPoint,
                      VariantMatch, load_report, mr_wer, pairwise_overlap, pearson,
                      save_report, score_corpus, threshold_sweep)
from .miner import (ContextKey, ContextObservation, MiningConfig, aggregate_counts,
                    extract_contexts, generate_candidates, iter_aggregated, mine)
from .textnorm import (NormalizationConfig, Segment, buckwalter_decode,
                       buckwalter_encode, normalize_idempotence_check,
                       normalize_text, read_segments)
from .variants import (MatchSample, VariantClass, VariantPair, VariantTable,
                       class_histogram, classify, sample_matches)

__version__ = "0.1.0"

__all__ = [
    "Alignment", "ContextKey", "ContextObservation", "CorrelationResult",
    "CostMode", "DataError", "DistanceMode", "EditOp", "MAX_PHRASE_WORDS",
    "MatchSample", "MiningConfig", "NormalizationConfig", "OpKind",
    "ScoreReport", "Segment", "SegmentScore", "SweepPoint", "TABLE_COST",
    "VariantClass", "VariantMatch", "VariantPair", "VariantTable", "WerdError",
    "ZERO_COST", "aggregate_counts", "brute_force_align", "buckwalter_decode",
    "buckwalter_encode", "class_histogram", "classify", "edit_distance",
    "extract_contexts", "generate_candidates", "iter_aggregated", "join_phrase",
    "load_report", "mine", "mr_wer", "normalize_idempotence_check",
    "normalize_text", "normalized_distance", "pairwise_overlap", "pearson",
    "read_segments", "render_alignment", "sample_matches", "save_report",
    "score_corpus", "ter_align", "threshold_sweep", "wer_align", "werd_align",
    "__version__",
]
