import collections
import logging
import random

import pytest

from werd import (
    ContextKey,
    ContextObservation,
    MiningConfig,
    NormalizationConfig,
    VariantTable,
    aggregate_counts,
    extract_contexts,
    generate_candidates,
    iter_aggregated,
    mine,
)


def obs(l1, l2, target, r1, r2, count=1):
    return ContextObservation(ContextKey(l1, l2, r1, r2), tuple(target.split()), count)


def test_window_extraction_by_hand():
    got = set(extract_contexts("a b c d e f".split()))
    expected = {
        # five-token windows: one middle word
        obs("a", "b", "c", "d", "e"),
        obs("b", "c", "d", "e", "f"),
        # the six-token window: two middle words
        obs("a", "b", "c d", "e", "f"),
    }
    assert got == expected


def test_window_count_matches_the_closed_form():
    rng = random.Random(13)
    cfg = MiningConfig()
    for _ in range(50):
        length = rng.randint(0, 30)
        tokens = [f"w{rng.randint(0, 9)}" for _ in range(length)]
        n_windows = sum(max(0, length - n + 1)
                        for n in range(cfg.n_min, cfg.n_max + 1))
        assert sum(1 for _ in extract_contexts(tokens, cfg)) == n_windows
    assert list(extract_contexts(["a"] * 4)) == []


def random_observations(rng, n):
    out = []
    for _ in range(n):
        ctx = ContextKey(*(f"c{rng.randint(0, 5)}" for _ in range(4)))
        target = tuple(f"t{rng.randint(0, 8)}" for _ in range(rng.randint(1, 3)))
        out.append(ContextObservation(ctx, target, rng.randint(1, 4)))
    return out


def test_aggregation_matches_a_counter_and_survives_spilling(tmp_path):
    rng = random.Random(19)
    observations = random_observations(rng, 4000)

    oracle: dict = collections.defaultdict(lambda: collections.Counter())
    for o in observations:
        oracle[o.context][o.target] += o.count

    in_memory = aggregate_counts(observations, tmp_path)
    assert {c: dict(t) for c, t in in_memory.items()} == \
           {c: dict(t) for c, t in oracle.items()}

    # force many tiny spill runs; totals and grouping must not change
    spilled = {}
    for ctx, targets in iter_aggregated(observations, tmp_path, max_entries=10):
        assert ctx not in spilled   # each context surfaces exactly once
        spilled[ctx] = dict(targets)
    assert spilled == in_memory


def counts_for(groups):
    return {ctx: {t: c for t, c in targets} for ctx, targets in groups}


def test_candidate_gates():
    ctx = [ContextKey("l1", "l2", "r1", "r2"),
           ContextKey("x1", "x2", "y1", "y2"),
           ContextKey("z1", "z2", "w1", "w2")]
    base = {
        ctx[0]: {("ktb",): 9, ("ktp",): 3},
        ctx[1]: {("ktb",): 9, ("ktp",): 3},
        ctx[2]: {("ktb",): 9, ("ktp",): 3},
    }
    pairs = generate_candidates(base)
    assert len(pairs) == 1
    p = pairs[0]
    assert p.target == ("ktb",) and p.source == ("ktp",)
    assert (p.target_count, p.source_count) == (27, 9)
    assert p.score == pytest.approx(1 / 3, abs=5e-5)

    # 27 vs 10 misses the 3:1 bar
    short = {ctx[0]: {("ktb",): 9, ("ktp",): 4},
             ctx[1]: {("ktb",): 9, ("ktp",): 3},
             ctx[2]: {("ktb",): 9, ("ktp",): 3}}
    assert generate_candidates(short) == []

    # distance above the gate
    far = {ctx[0]: {("aaaaa",): 9, ("zzzzz",): 3}}
    assert generate_candidates(far) == []
    # boundary: score exactly at the gate passes
    cfg = MiningConfig(max_distance=0.2)
    assert generate_candidates({ctx[0]: {("aaaaa",): 9, ("aaaaz",): 3}}, cfg) != []

    cfg = MiningConfig(min_pair_contexts=4)
    assert generate_candidates(base, cfg) == []
    cfg = MiningConfig(min_pair_contexts=3)
    assert len(generate_candidates(base, cfg)) == 1


def test_tie_orientation_is_lexicographic():
    cfg = MiningConfig(ratio=1.0)
    counts = {ContextKey("a", "b", "c", "d"): {("nb",): 5, ("na",): 5}}
    pairs = generate_candidates(counts, cfg)
    assert len(pairs) == 1
    assert pairs[0].target == ("na",) and pairs[0].source == ("nb",)


def test_counts_come_from_shared_contexts_only():
    c1 = ContextKey("a", "b", "c", "d")
    c2 = ContextKey("e", "f", "g", "h")
    c3 = ContextKey("i", "j", "k", "l")
    counts = {
        c1: {("fm",): 50},                 # fm alone: must not count
        c2: {("fm",): 9, ("fn",): 3},      # the only shared context
        c3: {("fn",): 40},                 # fn alone: must not count
    }
    pairs = generate_candidates(counts)
    assert len(pairs) == 1
    assert (pairs[0].target_count, pairs[0].source_count) == (9, 3)


def test_pair_accumulates_across_window_lengths():
    # the same two targets seen under different contexts add up
    counts = {
        ContextKey("a", "b", "c", "d"): {("mA", "fy$"): 6, ("mfy$",): 2},
        ContextKey("a", "b", "e", "f"): {("mA", "fy$"): 6, ("mfy$",): 2},
    }
    pairs = generate_candidates(counts)
    assert len(pairs) == 1
    p = pairs[0]
    assert p.target == ("mA", "fy$") and p.source == ("mfy$",)
    assert (p.target_count, p.source_count) == (12, 4)
    # "mA fy$" -> "mfy$" drops one letter and one space
    assert p.score == 0.5


def test_fanout_cap_drops_rare_targets(caplog):
    cfg = MiningConfig(fanout_cap=2, ratio=1.0)
    counts = {ContextKey("a", "b", "c", "d"):
              {("fa",): 9, ("fb",): 8, ("fc",): 7, ("fd",): 6}}
    with caplog.at_level(logging.WARNING, logger="werd.miner"):
        pairs = generate_candidates(counts, cfg)
    assert {(p.target_text, p.source_text) for p in pairs} == {("fa", "fb")}
    assert any("fan-out" in r.message for r in caplog.records)


def test_config_validation():
    for kwargs in (dict(n_min=4), dict(n_max=9), dict(n_min=7, n_max=6),
                   dict(max_distance=0.0), dict(max_distance=1.5),
                   dict(ratio=0.5), dict(min_pair_contexts=0),
                   dict(fanout_cap=1), dict(spill_entries=0)):
        with pytest.raises(ValueError):
            MiningConfig(**kwargs)
    meta = MiningConfig().meta_items()
    assert meta["max_distance"] == "0.6" and meta["ratio"] == "3"


def write_corpus(path, lines):
    path.write_text("".join(line + "\n" for line in lines), encoding="utf-8")
    return path


def corpus_lines():
    lines = []
    for j in range(3):
        ctx = (f"c{j}a", f"c{j}b", f"c{j}x", f"c{j}y")
        lines += [f"{ctx[0]} {ctx[1]} Alywm {ctx[2]} {ctx[3]}"] * 9
        lines += [f"{ctx[0]} {ctx[1]} Alyym {ctx[2]} {ctx[3]}"] * 3
        # a same-context decoy too far away to pair with anything
        lines += [f"{ctx[0]} {ctx[1]} qqqqq {ctx[2]} {ctx[3]}"] * 2
    return lines


def test_mine_end_to_end(tmp_path):
    corpus = write_corpus(tmp_path / "corpus.txt", corpus_lines())
    out = tmp_path / "table.tsv"
    table = mine([corpus], out_path=out)
    assert [(p.target_text, p.source_text, p.target_count, p.source_count, p.score)
            for p in table] == [("Alywm", "Alyym", 27, 9, 0.2)]
    # configuration is echoed into the metadata and the saved file
    assert table.meta["max_distance"] == "0.6"
    assert table.meta["repetition_cap"] == "3"
    assert VariantTable.load(out).pairs == table.pairs


def test_mine_is_stable_across_sharding_and_workers(tmp_path):
    lines = corpus_lines()
    rng = random.Random(43)
    rng.shuffle(lines)
    whole = write_corpus(tmp_path / "all.txt", lines)
    part1 = write_corpus(tmp_path / "p1.txt", lines[:20])
    part2 = write_corpus(tmp_path / "p2.txt", lines[20:])

    one = mine([whole])
    split = mine([part1, part2])
    swapped = mine([part2, part1])
    parallel = mine([part1, part2], jobs=2)
    assert one.pairs == split.pairs == swapped.pairs == parallel.pairs


def test_mine_applies_normalization(tmp_path):
    # the unwrapped hashtag supplies the last two context words
    lines = [f"c{i}a c{i}b wrd #c{i}x_c{i}y" for i in range(3)] * 9
    lines += [f"c{i}a c{i}b wrdd #c{i}x_c{i}y" for i in range(3)] * 3
    corpus = write_corpus(tmp_path / "tagged.txt", lines)
    table = mine([corpus], cfg=MiningConfig(), norm_cfg=NormalizationConfig())
    assert [(p.target_text, p.source_text, p.target_count, p.source_count)
            for p in table] == [("wrd", "wrdd", 27, 9)]


def test_mine_error_paths(tmp_path):
    from werd import DataError
    with pytest.raises(ValueError):
        mine([])
    with pytest.raises(ValueError):
        mine([tmp_path / "x.txt"], jobs=0)
    with pytest.raises(DataError):
        mine([tmp_path / "missing.txt"])
