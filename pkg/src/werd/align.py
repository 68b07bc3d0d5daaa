"""Word-level alignment engines.

``wer_align`` is the classic monotonic edit alignment.  ``werd_align`` extends
it with VARIANT moves: a hypothesis span of 1..4 tokens may be matched against
a reference span of 1..4 tokens whenever the span pair is present in a variant
table, at a cost controlled by :class:`CostMode`.  No reordering moves exist in
either engine; ``ter_align`` adds greedy block shifts on top of the plain
alignment.  ``brute_force_align`` is an independent reference implementation
used by the tests.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Sequence

from ._util import fmt_num
from .editdist import MAX_PHRASE_WORDS
from .variants import VariantPair, VariantTable


class OpKind(Enum):
    MATCH = "C"
    SUB = "S"
    INS = "I"    # hypothesis token with no reference counterpart
    DEL = "D"    # reference token missing from the hypothesis
    VARIANT = "V"


@dataclass(frozen=True)
class CostMode:
    """Charge applied when a VARIANT move fires.

    ``table`` charges the pair's stored score, ``zero`` charges nothing, and
    ``const`` charges a fixed non-negative value.
    """

    kind: str
    value: float = 0.0

    def __post_init__(self):
        if self.kind not in ("table", "zero", "const"):
            raise ValueError(f"unknown cost mode {self.kind!r}")
        if self.kind == "const" and not (math.isfinite(self.value) and self.value >= 0):
            raise ValueError(f"const cost must be finite and >= 0, got {self.value!r}")

    def pair_cost(self, pair: VariantPair) -> float:
        if self.kind == "table":
            return pair.score
        if self.kind == "zero":
            return 0.0
        return self.value

    @classmethod
    def parse(cls, text: str) -> "CostMode":
        """Parse ``table``, ``zero``, or ``const:<x>``."""
        if text == "table":
            return TABLE_COST
        if text == "zero":
            return ZERO_COST
        if text.startswith("const:"):
            try:
                return cls("const", float(text.split(":", 1)[1]))
            except ValueError:
                raise ValueError(f"bad const cost in {text!r}") from None
        raise ValueError(f"unknown variant cost {text!r} (expected table|zero|const:<x>)")


TABLE_COST = CostMode("table")
ZERO_COST = CostMode("zero")


@dataclass(frozen=True)
class EditOp:
    kind: OpKind
    hyp_span: tuple[int, int]
    ref_span: tuple[int, int]
    cost: float
    pair: VariantPair | None = None


@dataclass(frozen=True)
class Alignment:
    """An op sequence tiling both sides left to right, plus its total cost."""

    ops: tuple[EditOp, ...]
    total_cost: float
    hyp_len: int
    ref_len: int

    def count(self, kind: OpKind) -> int:
        return sum(1 for op in self.ops if op.kind is kind)

    @property
    def matches(self) -> int:
        return self.count(OpKind.MATCH)

    @property
    def substitutions(self) -> int:
        return self.count(OpKind.SUB)

    @property
    def insertions(self) -> int:
        return self.count(OpKind.INS)

    @property
    def deletions(self) -> int:
        return self.count(OpKind.DEL)

    @property
    def variant_matches(self) -> int:
        return self.count(OpKind.VARIANT)


# backpointer move codes
_M_MATCH, _M_VARIANT, _M_SUB, _M_DEL, _M_INS = range(5)


def werd_align(hyp: Sequence[str], ref: Sequence[str],
               table: VariantTable | None = None,
               cost_mode: CostMode = TABLE_COST) -> Alignment:
    """Minimum-cost monotonic alignment with variant-aware span moves.

    Ties are broken with the fixed preference MATCH > VARIANT > SUB > DEL > INS;
    among variant candidates, shorter hypothesis spans win first, then shorter
    reference spans.  Backtraces and op counts are therefore reproducible.
    """
    hyp = list(hyp)
    ref = list(ref)
    n, m = len(hyp), len(ref)
    inf = math.inf

    use_table = table is not None and len(table) > 0
    # hyp_partners[i][p]: pairs containing the hyp span ending at i with length p
    hyp_partners: list[list[dict[str, VariantPair] | None]] = []
    ref_span_text: list[list[str]] = []
    if use_table:
        hyp_partners = [[None] * (MAX_PHRASE_WORDS + 1) for _ in range(n + 1)]
        for i in range(1, n + 1):
            for p in range(1, min(MAX_PHRASE_WORDS, i) + 1):
                d = table.partners(" ".join(hyp[i - p:i]))
                hyp_partners[i][p] = d if d else None
        ref_span_text = [[""] * (MAX_PHRASE_WORDS + 1) for _ in range(m + 1)]
        for j in range(1, m + 1):
            for q in range(1, min(MAX_PHRASE_WORDS, j) + 1):
                ref_span_text[j][q] = " ".join(ref[j - q:j])

    dist = [[0.0] * (m + 1) for _ in range(n + 1)]
    back: list[list[tuple | None]] = [[None] * (m + 1) for _ in range(n + 1)]

    for i in range(n + 1):
        row = dist[i]
        brow = back[i]
        for j in range(m + 1):
            if i == 0 and j == 0:
                continue
            best = inf
            choice = None
            if i > 0 and j > 0 and hyp[i - 1] == ref[j - 1]:
                best = dist[i - 1][j - 1]
                choice = (_M_MATCH, 1, 1, None)
            if use_table and i > 0 and j > 0:
                partners = hyp_partners[i]
                for p in range(1, min(MAX_PHRASE_WORDS, i) + 1):
                    pd = partners[p]
                    if pd is None:
                        continue
                    rtexts = ref_span_text[j]
                    for q in range(1, min(MAX_PHRASE_WORDS, j) + 1):
                        pair = pd.get(rtexts[q])
                        if pair is None:
                            continue
                        c = dist[i - p][j - q] + cost_mode.pair_cost(pair)
                        if c < best:
                            best = c
                            choice = (_M_VARIANT, p, q, pair)
            if i > 0 and j > 0 and hyp[i - 1] != ref[j - 1]:
                c = dist[i - 1][j - 1] + 1
                if c < best:
                    best = c
                    choice = (_M_SUB, 1, 1, None)
            if j > 0:
                c = row[j - 1] + 1
                if c < best:
                    best = c
                    choice = (_M_DEL, 0, 1, None)
            if i > 0:
                c = dist[i - 1][j] + 1
                if c < best:
                    best = c
                    choice = (_M_INS, 1, 0, None)
            row[j] = best
            brow[j] = choice

    ops: list[EditOp] = []
    i, j = n, m
    while i > 0 or j > 0:
        move, p, q, pair = back[i][j]
        if move == _M_MATCH:
            ops.append(EditOp(OpKind.MATCH, (i - 1, i), (j - 1, j), 0.0))
        elif move == _M_VARIANT:
            ops.append(EditOp(OpKind.VARIANT, (i - p, i), (j - q, j),
                              cost_mode.pair_cost(pair), pair))
        elif move == _M_SUB:
            ops.append(EditOp(OpKind.SUB, (i - 1, i), (j - 1, j), 1.0))
        elif move == _M_DEL:
            ops.append(EditOp(OpKind.DEL, (i, i), (j - 1, j), 1.0))
        else:
            ops.append(EditOp(OpKind.INS, (i - 1, i), (j, j), 1.0))
        i -= p
        j -= q
    ops.reverse()
    return Alignment(tuple(ops), dist[n][m], n, m)


def wer_align(hyp: Sequence[str], ref: Sequence[str]) -> Alignment:
    """Plain monotonic edit alignment (the empty-table case of ``werd_align``)."""
    return werd_align(hyp, ref, None)


def brute_force_align(hyp: Sequence[str], ref: Sequence[str],
                      table: VariantTable | None = None,
                      cost_mode: CostMode = TABLE_COST) -> float:
    """Minimal alignment cost by exhaustive recursion over monotonic moves.

    Independent of the iterative engine above: top-down, public ``lookup_pair``
    calls, joins computed on the fly.  Suffixes are shared through a memo dict,
    which does not change the searched move space.  Sides are capped at 7
    tokens to keep the search honest-sized.
    """
    hyp = list(hyp)
    ref = list(ref)
    n, m = len(hyp), len(ref)
    if n > 7 or m > 7:
        raise ValueError("brute_force_align is limited to sides of at most 7 tokens")
    use_table = table is not None and len(table) > 0
    memo: dict[tuple[int, int], float] = {}

    def best(i: int, j: int) -> float:
        if i == n and j == m:
            return 0.0
        got = memo.get((i, j))
        if got is not None:
            return got
        out = math.inf
        if i < n and j < m:
            out = best(i + 1, j + 1) + (0.0 if hyp[i] == ref[j] else 1.0)
        if i < n:
            out = min(out, best(i + 1, j) + 1.0)
        if j < m:
            out = min(out, best(i, j + 1) + 1.0)
        if use_table:
            for p in range(1, min(MAX_PHRASE_WORDS, n - i) + 1):
                for q in range(1, min(MAX_PHRASE_WORDS, m - j) + 1):
                    pair = table.lookup_pair(hyp[i:i + p], ref[j:j + q])
                    if pair is not None:
                        out = min(out, best(i + p, j + q) + cost_mode.pair_cost(pair))
        memo[(i, j)] = out
        return out

    return best(0, 0)


def _word_edit_count(a: list[str], b: list[str]) -> int:
    # token-level two-row Levenshtein, counts only
    if a == b:
        return 0
    if len(a) < len(b):
        a, b = b, a
    if not b:
        return len(a)
    prev = list(range(len(b) + 1))
    for i, ta in enumerate(a, 1):
        cur = [i]
        for j, tb in enumerate(b, 1):
            if ta == tb:
                cur.append(prev[j - 1])
            else:
                cur.append(1 + min(prev[j - 1], prev[j], cur[-1]))
        prev = cur
    return prev[-1]


def ter_align(hyp: Sequence[str], ref: Sequence[str],
              max_block: int = 10) -> tuple[Alignment, int]:
    """Greedy block-shift alignment; returns (final edit alignment, shift count).

    Repeatedly picks the shift that most reduces the remaining edit distance.
    A candidate block is a contiguous hypothesis span that exactly matches a
    reference span it is not already aligned to; every insertion point is
    tried for it.  Each applied shift costs 1, so the full score of the result
    is ``alignment.total_cost + shifts``.  Candidates are scanned in a fixed
    order (block start, block length, insertion point), so the outcome is
    deterministic.
    """
    current = list(hyp)
    ref = list(ref)
    shifts = 0
    base = _word_edit_count(current, ref)
    while base > 0:
        align = wer_align(current, ref)
        matched = {op.hyp_span[0]: op.ref_span[0]
                   for op in align.ops if op.kind is OpKind.MATCH}
        best_gain = 0
        best_hyp: list[str] | None = None
        for s in range(len(current)):
            for blk_len in range(1, min(max_block, len(current) - s) + 1):
                block = current[s:s + blk_len]
                qualifies = False
                for r in range(len(ref) - blk_len + 1):
                    if ref[r:r + blk_len] != block:
                        continue
                    if any(matched.get(s + k) != r + k for k in range(blk_len)):
                        qualifies = True
                        break
                if not qualifies:
                    continue
                reduced = current[:s] + current[s + blk_len:]
                for pos in range(len(reduced) + 1):
                    cand = reduced[:pos] + block + reduced[pos:]
                    if cand == current:
                        continue
                    gain = base - _word_edit_count(cand, ref)
                    if gain > best_gain:
                        best_gain = gain
                        best_hyp = cand
        if best_gain < 1:
            break
        current = best_hyp
        shifts += 1
        base -= best_gain
    return wer_align(current, ref), shifts


def render_alignment(alignment: Alignment, hyp: Sequence[str], ref: Sequence[str]) -> str:
    """Stable plain-text rendering, one op per line.

    Columns are tab-separated: op tag (C/S/I/D/V), hypothesis text or ``*``,
    reference text or ``*``, op cost.
    """
    hyp = list(hyp)
    ref = list(ref)
    lines = []
    for op in alignment.ops:
        h = " ".join(hyp[op.hyp_span[0]:op.hyp_span[1]]) or "*"
        r = " ".join(ref[op.ref_span[0]:op.ref_span[1]]) or "*"
        lines.append(f"{op.kind.value}\t{h}\t{r}\t{fmt_num(op.cost)}")
    return "\n".join(lines)
