"""Independent oracles and generators shared across the test modules.

Everything in here deliberately avoids the package's own DP code paths:
the distance oracle is a memoized recursion, the alignment oracle
enumerates complete move sequences, and the correlation oracle uses the
covariance formula directly.  Agreement between these and the shipped
implementations is what the equivalence tests check.
"""

from __future__ import annotations

import random
from typing import Sequence

from werd.align import TABLE_COST, CostMode
from werd.editdist import MAX_PHRASE_WORDS
from werd.variants import VariantPair, VariantTable


def oracle_edit_distance(a: str, b: str) -> int:
    """Levenshtein via top-down recursion with a dict memo."""
    memo: dict[tuple[int, int], int] = {}

    def go(i: int, j: int) -> int:
        if i == len(a):
            return len(b) - j
        if j == len(b):
            return len(a) - i
        key = (i, j)
        hit = memo.get(key)
        if hit is not None:
            return hit
        best = min(
            go(i + 1, j) + 1,
            go(i, j + 1) + 1,
            go(i + 1, j + 1) + (a[i] != b[j]),
        )
        memo[key] = best
        return best

    return go(0, 0)


def char_runs_ok(s: str, cap: int) -> bool:
    """True iff no character occurs more than cap times in a row."""
    run = 0
    prev = None
    for ch in s:
        run = run + 1 if ch == prev else 1
        prev = ch
        if run > cap:
            return False
    return True


def enumerate_alignment_cost(hyp: Sequence[str], ref: Sequence[str],
                             table: VariantTable | None = None,
                             cost_mode: CostMode = TABLE_COST) -> float:
    """Minimal alignment cost by brute enumeration of move sequences.

    No memoization at all, so keep the inputs tiny (a handful of tokens
    per side).  Exists purely to cross-check the memoized oracle.
    """
    n, m = len(hyp), len(ref)
    best = float("inf")

    stack = [(0, 0, 0.0)]
    while stack:
        i, j, acc = stack.pop()
        if acc >= best:
            continue
        if i == n and j == m:
            best = acc
            continue
        if i < n and j < m:
            stack.append((i + 1, j + 1, acc + (0.0 if hyp[i] == ref[j] else 1.0)))
        if i < n:
            stack.append((i + 1, j, acc + 1.0))
        if j < m:
            stack.append((i, j + 1, acc + 1.0))
        if table is not None:
            for p in range(1, min(MAX_PHRASE_WORDS, n - i) + 1):
                for q in range(1, min(MAX_PHRASE_WORDS, m - j) + 1):
                    pair = table.lookup_pair(hyp[i:i + p], ref[j:j + q])
                    if pair is not None:
                        stack.append((i + p, j + q, acc + cost_mode.pair_cost(pair)))
    return best


def naive_pearson(xs: Sequence[float], ys: Sequence[float]) -> float | None:
    """Pearson r in covariance form, None when a side has zero variance."""
    n = len(xs)
    mx = sum(xs) / n
    my = sum(ys) / n
    cov = sum(x * y for x, y in zip(xs, ys)) / n - mx * my
    vx = sum(x * x for x in xs) / n - mx * mx
    vy = sum(y * y for y in ys) / n - my * my
    if vx <= 0.0 or vy <= 0.0:
        return None
    return cov / (vx ** 0.5 * vy ** 0.5)


# ---------------------------------------------------------------------------
# random-instance generators


def random_phrase(rng: random.Random, vocab: Sequence[str],
                  max_words: int = 2) -> tuple[str, ...]:
    k = rng.randint(1, max_words)
    return tuple(rng.choice(vocab) for _ in range(k))


def random_table(rng: random.Random, vocab: Sequence[str],
                 max_pairs: int = 5,
                 score_lo: float = 0.0002, score_hi: float = 1.0) -> VariantTable:
    """Small table over vocab; scores quantized, duplicates skipped."""
    pairs = []
    seen: set[frozenset[str]] = set()
    want = rng.randint(1, max_pairs)
    attempts = 0
    while len(pairs) < want and attempts < 50:
        attempts += 1
        tgt = random_phrase(rng, vocab)
        src = random_phrase(rng, vocab)
        if tgt == src:
            continue
        key = frozenset((" ".join(tgt), " ".join(src)))
        if key in seen:
            continue
        seen.add(key)
        score = round(rng.uniform(score_lo, score_hi), 4)
        if score <= 0.0:
            score = 0.0001
        tc = rng.randint(3, 900)
        pairs.append(VariantPair(tgt, src, tc, max(1, tc // 3), score))
    if not pairs:
        pairs.append(VariantPair(("a",), ("b",), 9, 3, 0.5))
    return VariantTable(pairs)


def disjoint_pair_table(rng: random.Random, n_pairs: int,
                        tag: str = "v") -> VariantTable:
    """Table whose pairs share no words with each other.

    Every token carries the pair index, so a span matching one pair's
    phrase can never overlap a span matching another's.  A few pairs are
    one-to-two so split and merge moves get exercised too.
    """
    pairs = []
    for k in range(n_pairs):
        score = round(rng.uniform(0.05, 0.6), 4)
        tc = rng.randint(30, 900)
        sc = max(1, tc // rng.randint(3, 9))
        shape = rng.randint(0, 2)
        if shape == 0:
            tgt: tuple[str, ...] = (f"{tag}{k}t",)
            src: tuple[str, ...] = (f"{tag}{k}s",)
        elif shape == 1:
            tgt = (f"{tag}{k}ta", f"{tag}{k}tb")
            src = (f"{tag}{k}s",)
        else:
            tgt = (f"{tag}{k}t",)
            src = (f"{tag}{k}sa", f"{tag}{k}sb")
        pairs.append(VariantPair(tgt, src, tc, sc, score))
    return VariantTable(pairs)


def perturbed_hyp(rng: random.Random, ref: Sequence[str], vocab: Sequence[str],
                  table: VariantTable | None = None) -> list[str]:
    """Noisy copy of ref: substitutions, drops, inserts, variant swaps."""
    out: list[str] = []
    for tok in ref:
        swapped = False
        if table is not None and rng.random() < 0.5:
            partners = table.partners((tok,))
            if partners:
                other = rng.choice(sorted(partners))
                out.extend(other.split(" "))
                swapped = True
        if swapped:
            continue
        roll = rng.random()
        if roll < 0.12:
            out.append(rng.choice(vocab))
        elif roll < 0.2:
            pass
        else:
            out.append(tok)
        if rng.random() < 0.08:
            out.append(rng.choice(vocab))
    return out
