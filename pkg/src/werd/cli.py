"""Command-line entry points: mine, filter, classify, score, sweep, correlate,
normalize.

Exit codes: 0 on success, 1 on usage errors, 2 on malformed data (reported
with file and line).  Outputs are byte-identical across reruns unless
``--stamp`` is given; partially written output files never survive a failure.
"""

from __future__ import annotations

import argparse
import logging
import sys
from datetime import datetime, timezone

from ._util import DataError, atomic_open, fmt_num
from .align import CostMode, render_alignment
from .editdist import DistanceMode
from .metrics import (METRICS, align_segment, load_report, mr_wer, pearson,
                      save_report, score_corpus, threshold_sweep)
from .miner import MiningConfig, mine
from .textnorm import NormalizationConfig, normalize_text, read_segments
from .variants import VariantClass, VariantTable, class_histogram, classify, sample_matches

log = logging.getLogger("werd")

DEFAULT_THRESHOLDS = "0.1,0.2,0.3,0.4,0.5,0.6"


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(1)


def _add_norm_flags(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("normalization")
    g.add_argument("--no-urls", action="store_true", help="keep URLs verbatim")
    g.add_argument("--no-mentions", action="store_true", help="keep @-mentions verbatim")
    g.add_argument("--no-emoticons", action="store_true", help="keep emoticons verbatim")
    g.add_argument("--no-hashtag-unwrap", action="store_true",
                   help="keep hashtags verbatim")
    g.add_argument("--keep-diacritics", action="store_true",
                   help="keep Arabic diacritics")
    g.add_argument("--keep-tatweel", action="store_true", help="keep tatweel")
    g.add_argument("--repetition-cap", type=int, default=3, metavar="N",
                   help="cap repeated-character runs at N (default 3)")
    g.add_argument("--no-arabic-surface", action="store_true",
                   help="disable alef/yah/teh-marbuta surface folding")


def _norm_config(args) -> NormalizationConfig:
    return NormalizationConfig(
        replace_urls=not args.no_urls,
        replace_mentions=not args.no_mentions,
        replace_emoticons=not args.no_emoticons,
        unwrap_hashtags=not args.no_hashtag_unwrap,
        strip_diacritics=not args.keep_diacritics,
        strip_tatweel=not args.keep_tatweel,
        repetition_cap=args.repetition_cap,
        arabic_surface=not args.no_arabic_surface,
    )


def _stamp(args) -> str | None:
    if getattr(args, "stamp", False):
        return datetime.now(timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ")
    return None


def _load_table(args, norm_cfg: NormalizationConfig) -> VariantTable | None:
    if not getattr(args, "table", None):
        return None
    table = VariantTable.load(args.table)
    if getattr(args, "max_ed", None) is not None:
        table = table.filter(args.max_ed)
    if table.meta:
        ours = norm_cfg.meta_items()
        mismatched = [k for k, v in ours.items()
                      if k in table.meta and table.meta[k] != v]
        if mismatched:
            log.warning("table %s was built under different normalization "
                        "settings (%s); variant spans may fail to match",
                        args.table, ", ".join(sorted(mismatched)))
    return table


def cmd_mine(args) -> int:
    norm_cfg = _norm_config(args)
    cfg = MiningConfig(
        n_min=args.nmin,
        n_max=args.nmax,
        max_distance=args.max_distance,
        ratio=args.ratio,
        min_pair_contexts=args.min_pair_contexts,
        distance_mode=DistanceMode.parse(args.distance_mode),
        fanout_cap=args.fanout_cap,
    )
    table = mine(args.input, cfg, norm_cfg, out_path=args.out, jobs=args.jobs)
    print(f"mined {len(table)} pairs -> {args.out}")
    return 0


def cmd_filter(args) -> int:
    table = VariantTable.load(args.table).filter(args.max_ed)
    table.save(args.out)
    print(f"kept {len(table)} pairs -> {args.out}")
    return 0


def cmd_classify(args) -> int:
    table = VariantTable.load(args.table)
    if len(table) == 0:
        raise DataError("table is empty, nothing to classify", path=args.table)
    hist = class_histogram(table)
    counts = {cls: 0 for cls in VariantClass}
    for pair in table:
        counts[classify(pair)] += 1
    for cls in VariantClass:
        print(f"{cls.value}\t{counts[cls]}\t{hist[cls]:.2f}")
    print(f"total\t{len(table)}")
    return 0


def _read_refs(args, norm_cfg) -> list[list]:
    return [read_segments(p, norm_cfg) for p in args.ref.split(",")]


def cmd_score(args) -> int:
    norm_cfg = _norm_config(args)
    cost_mode = CostMode.parse(args.variant_cost)
    table = _load_table(args, norm_cfg)
    if args.metric == "werd" and table is None:
        raise ValueError("--metric werd requires --table")
    hyps = read_segments(args.hyp, norm_cfg)
    ref_sets = _read_refs(args, norm_cfg)
    if args.metric != "mrwer" and len(ref_sets) != 1:
        raise ValueError(f"--metric {args.metric} takes exactly one reference file")

    config = {"hyp": args.hyp, "ref": args.ref}
    config.update(norm_cfg.meta_items())
    if table is not None:
        config["table"] = args.table
        config["variant_cost"] = args.variant_cost
        if args.max_ed is not None:
            config["max_ed"] = fmt_num(args.max_ed)

    if args.metric == "mrwer":
        report = mr_wer(hyps, ref_sets, config=config, jobs=args.jobs)
    else:
        report = score_corpus(hyps, ref_sets[0], metric=args.metric, table=table,
                              cost_mode=cost_mode, config=config, jobs=args.jobs)

    totals = report
    print(f"{report.metric}: {report.corpus_value:.2f} "
          f"[cost {fmt_num(totals.total_cost)} / ref {totals.total_ref_len}; "
          f"ins {sum(s.insertions for s in report.segments)}, "
          f"del {sum(s.deletions for s in report.segments)}, "
          f"sub {sum(s.substitutions for s in report.segments)}, "
          f"variant {totals.total_variant_matches}; "
          f"{len(report.segments)} segments]")

    if args.report:
        save_report(report, args.report, stamp=_stamp(args))
    if args.align_dump:
        _write_align_dump(args, report, hyps, ref_sets, table, cost_mode)
    if args.sample:
        for m in sample_matches([report], args.sample, seed=args.sample_seed):
            print(f"sample\t{m.segment_id}\t{m.hyp_text}\t{m.ref_text}\t{fmt_num(m.score)}")
    return 0


def _write_align_dump(args, report, hyps, ref_sets, table, cost_mode) -> None:
    refs_by_id = [{s.id: s for s in ref_set} for ref_set in ref_sets]
    with atomic_open(args.align_dump) as fh:
        for seg in hyps:
            refs = tuple(d[seg.id].tokens for d in refs_by_id if seg.id in d)
            alignment, shifts, ref_idx = align_segment(args.metric, seg.tokens, refs,
                                                       table, cost_mode)
            cost = alignment.total_cost + shifts
            fh.write(f"== {seg.id} cost={fmt_num(cost)} shifts={shifts} "
                     f"ref_index={ref_idx}\n")
            fh.write(render_alignment(alignment, seg.tokens, refs[ref_idx]))
            fh.write("\n\n")


def cmd_sweep(args) -> int:
    norm_cfg = _norm_config(args)
    cost_mode = CostMode.parse(args.variant_cost)
    table = VariantTable.load(args.table)
    hyps = read_segments(args.hyp, norm_cfg)
    refs = read_segments(args.ref, norm_cfg)
    try:
        thresholds = [float(t) for t in args.thresholds.split(",") if t.strip()]
    except ValueError:
        raise ValueError(f"bad --thresholds value {args.thresholds!r}") from None
    points = threshold_sweep(hyps, refs, table, thresholds, cost_mode=cost_mode,
                             jobs=args.jobs)
    print("# threshold\twerd\tvariant_matches\ttable_pairs")
    for pt in points:
        print(f"{fmt_num(pt.threshold)}\t{pt.report.corpus_value:.2f}"
              f"\t{pt.variant_matches}\t{pt.table_pairs}")
    return 0


def cmd_correlate(args) -> int:
    rep_a = load_report(args.a)
    rep_b = load_report(args.b)
    by_id_b = {s.segment_id: s for s in rep_b.segments}
    ids_a = {s.segment_id for s in rep_a.segments}
    if ids_a != set(by_id_b):
        raise DataError("reports cover different segment ids")
    xs, ys, skipped = [], [], 0
    for seg in rep_a.segments:
        other = by_id_b[seg.segment_id]
        if seg.ref_len == 0 or other.ref_len == 0:
            skipped += 1
            continue
        xs.append(100.0 * seg.cost / seg.ref_len)
        ys.append(100.0 * other.cost / other.ref_len)
    if len(xs) < 2:
        raise DataError("fewer than 2 comparable segments")
    result = pearson(xs, ys, names=(rep_a.metric, rep_b.metric))
    if result.degenerate:
        print("pearson_r\tdegenerate (zero variance)")
    else:
        print(f"pearson_r\t{result.r:.6f}")
    print(f"n\t{result.n}")
    print(f"metrics\t{result.metric_a},{result.metric_b}")
    if skipped:
        print(f"skipped_empty_ref\t{skipped}")
    return 0


def cmd_normalize(args) -> int:
    norm_cfg = _norm_config(args)
    try:
        fh = open(args.input, encoding="utf-8")
    except OSError as exc:
        raise DataError(f"cannot read corpus: {exc}", path=args.input) from exc
    with fh, atomic_open(args.out) as out:
        for line in fh:
            out.write(" ".join(normalize_text(line, norm_cfg)) + "\n")
    print(f"normalized {args.input} -> {args.out}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="werd",
                     description="Dialect-aware ASR evaluation and variant mining.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("mine", help="mine a variant table from raw corpora")
    p.add_argument("--input", nargs="+", required=True, metavar="PATH",
                   help="corpus files, one document per line")
    p.add_argument("--out", required=True, help="output table TSV")
    p.add_argument("--max-distance", type=float, default=0.6,
                   help="normalized distance gate (default 0.6)")
    p.add_argument("--ratio", type=float, default=3.0,
                   help="minimum frequent/rare frequency ratio (default 3)")
    p.add_argument("--nmin", type=int, default=5, help="smallest window (default 5)")
    p.add_argument("--nmax", type=int, default=8, help="largest window (default 8)")
    p.add_argument("--distance-mode", choices=("min", "avg"), default="min",
                   help="normalized distance denominator (default min)")
    p.add_argument("--min-pair-contexts", type=int, default=1,
                   help="shared contexts required per pair (default 1)")
    p.add_argument("--fanout-cap", type=int, default=64,
                   help="max distinct targets considered per context (default 64)")
    p.add_argument("--jobs", type=int, default=1, help="parallel workers over input files")
    _add_norm_flags(p)
    p.set_defaults(func=cmd_mine)

    p = sub.add_parser("filter", help="keep pairs at or below a distance bound")
    p.add_argument("--table", required=True)
    p.add_argument("--max-ed", type=float, required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_filter)

    p = sub.add_parser("classify", help="class histogram of a table")
    p.add_argument("--table", required=True)
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("score", help="score hypotheses against references")
    p.add_argument("--metric", choices=METRICS, required=True)
    p.add_argument("--hyp", required=True, help="hypothesis segment TSV")
    p.add_argument("--ref", required=True,
                   help="reference segment TSV (comma-separated list for mrwer)")
    p.add_argument("--table", help="variant table (required for werd)")
    p.add_argument("--max-ed", type=float, help="filter the table before scoring")
    p.add_argument("--variant-cost", default="table", metavar="MODE",
                   help="variant charge: table|zero|const:<x> (default table)")
    p.add_argument("--report", help="write the per-segment report TSV here")
    p.add_argument("--align-dump", help="write readable per-segment alignments here")
    p.add_argument("--sample", type=int, metavar="K",
                   help="print K sampled variant matches")
    p.add_argument("--sample-seed", type=int, default=0)
    p.add_argument("--jobs", type=int, default=1, help="parallel scoring workers")
    p.add_argument("--stamp", action="store_true",
                   help="stamp the report with the generation time")
    _add_norm_flags(p)
    p.set_defaults(func=cmd_score)

    p = sub.add_parser("sweep", help="WERd across table distance thresholds")
    p.add_argument("--hyp", required=True)
    p.add_argument("--ref", required=True)
    p.add_argument("--table", required=True)
    p.add_argument("--thresholds", default=DEFAULT_THRESHOLDS,
                   help=f"comma-separated, increasing (default {DEFAULT_THRESHOLDS})")
    p.add_argument("--variant-cost", default="table", metavar="MODE",
                   help="variant charge: table|zero|const:<x> (default table)")
    p.add_argument("--jobs", type=int, default=1)
    _add_norm_flags(p)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("correlate", help="Pearson correlation of two reports")
    p.add_argument("--a", required=True, help="first report TSV")
    p.add_argument("--b", required=True, help="second report TSV")
    p.set_defaults(func=cmd_correlate)

    p = sub.add_parser("normalize", help="normalize a raw corpus line by line")
    p.add_argument("--input", required=True)
    p.add_argument("--out", required=True)
    _add_norm_flags(p)
    p.set_defaults(func=cmd_normalize)

    return parser


def main(argv: list[str] | None = None) -> int:
    logging.basicConfig(format="%(levelname)s: %(message)s", level=logging.WARNING)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except DataError as exc:
        print(f"werd: error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"werd: error: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"werd: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
