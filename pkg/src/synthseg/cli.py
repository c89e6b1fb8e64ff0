"""Command-line entry point.

Subcommands: generate, validate, freq, split, sample, eval-iou, stats,
report.  Machine-readable output goes to files under --out; stdout stays
quiet unless --summary asks for a human-readable table.  Exit codes:
0 success, 1 usage error, 2 data error.  All output is deterministic
given --seed.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .config import load_config, preset_config
from .errors import DataError, ParameterError, SynthsegError
from .evaluate import aggregate_mean, evaluate_predictions
from .generate import generate_dataset
from .manifest import (DatasetManifest, SizeGrid, compute_frequency_table,
                       nested_subsets, sample_subset, split_holdout, validate_manifest)
from .randomizer import with_resolution
from .reports import REPORT_FORMATS, emit_reports
from .scene import default_feature_classes
from .stats import aggregate_matrix, compute_stats, read_run_records, stats_from_dict, stats_to_dict


class _Parser(argparse.ArgumentParser):
    """argparse parser that exits 1 (not 2) on usage errors."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _resolution(text: str) -> tuple[int, int]:
    try:
        w, h = text.lower().split("x")
        return (int(w), int(h))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected WIDTHxHEIGHT, got {text!r}") from None


def build_parser() -> _Parser:
    p = _Parser(prog="synthseg", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    g = sub.add_parser("generate", help="render a labeled dataset")
    src = g.add_mutually_exclusive_group(required=True)
    src.add_argument("--config", type=Path, help="generation config JSON")
    src.add_argument("--preset", choices=("A", "B"), help="built-in domain preset")
    g.add_argument("--count", type=int, required=True)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--out", type=Path, required=True)
    g.add_argument("--workers", type=int, default=None,
                   help="render threads (default: $SYNTHSEG_WORKERS or 1)")
    g.add_argument("--resolution", type=_resolution, default=None, help="override WxH")
    g.add_argument("--summary", action="store_true")

    v = sub.add_parser("validate", help="check manifest/disk consistency")
    v.add_argument("--manifest", type=Path, required=True)
    v.add_argument("--summary", action="store_true")

    f = sub.add_parser("freq", help="per-class example frequency table")
    f.add_argument("--manifest", type=Path, required=True)
    f.add_argument("--out", type=Path, default=None, help="write JSON instead of printing")

    s = sub.add_parser("split", help="random holdout split")
    s.add_argument("--manifest", type=Path, required=True)
    s.add_argument("--fraction", type=float, default=0.10)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--out", type=Path, required=True, help="directory for train/holdout manifests")
    s.add_argument("--summary", action="store_true")

    m = sub.add_parser("sample", help="subset sampling (single size or nested grid)")
    m.add_argument("--manifest", type=Path, required=True)
    m.add_argument("--seed", type=int, default=0)
    size = m.add_mutually_exclusive_group(required=True)
    size.add_argument("--size", type=int, help="one subset of this size; --out is a file")
    size.add_argument("--grid-max", type=int,
                      help="nested subsets for grid {0,16,32,...}; --out is a directory")
    m.add_argument("--out", type=Path, required=True)

    e = sub.add_parser("eval-iou", help="score predicted masks against truth masks")
    e.add_argument("--manifest", type=Path, required=True)
    e.add_argument("--pred", type=Path, required=True)
    e.add_argument("--threshold", type=float, default=0.5)
    e.add_argument("--out", type=Path, required=True, help="per-frame JSONL output")
    e.add_argument("--summary", action="store_true")

    t = sub.add_parser("stats", help="aggregate run records into per-cell statistics")
    t.add_argument("--runs", type=Path, required=True)
    t.add_argument("--alpha", type=float, default=0.95)
    t.add_argument("--out", type=Path, required=True)

    r = sub.add_parser("report", help="emit CSV/JSON/SVG reports from statistics")
    r.add_argument("--stats", type=Path, required=True)
    r.add_argument("--format", choices=REPORT_FORMATS, required=True)
    r.add_argument("--significance", type=float, default=0.05)
    r.add_argument("--out", type=Path, required=True, help="output directory")

    return p


def _cmd_generate(args) -> int:
    if args.config is not None:
        config = load_config(args.config)
    else:
        config = preset_config(args.preset)
    if args.resolution is not None:
        from dataclasses import replace
        config = replace(config, randomization=with_resolution(config.randomization, args.resolution))
    manifest = generate_dataset(config, args.count, args.seed, args.out, workers=args.workers)
    if args.summary:
        print(f"generated {len(manifest)} frames into {args.out}")
    return 0


def _cmd_validate(args) -> int:
    manifest = DatasetManifest.read(args.manifest)
    problems = validate_manifest(manifest, args.manifest.parent)
    if problems:
        for p in problems:
            print(p, file=sys.stderr)
        return 2
    if args.summary:
        print(f"OK: {len(manifest)} records consistent")
    return 0


def _freq_rows(manifest) -> list[tuple[str, int, float]]:
    table = compute_frequency_table(manifest)
    return [(slug, table.counts[slug], table.frequencies[slug]) for slug in manifest.classes]


def _cmd_freq(args) -> int:
    manifest = DatasetManifest.read(args.manifest)
    rows = _freq_rows(manifest)
    if args.out is not None:
        doc = {"total": len(manifest),
               "classes": [{"slug": slug, "count": c, "frequency": f} for slug, c, f in rows]}
        args.out.write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n", encoding="utf-8")
        return 0
    name_width = max(len(slug) for slug, _, _ in rows)
    for slug, count, freq in rows:
        print(f"{slug:<{name_width}}  {count:>8}  {freq:8.2%}")
    return 0


def _cmd_split(args) -> int:
    manifest = DatasetManifest.read(args.manifest)
    train, holdout = split_holdout(manifest, args.fraction, args.seed)
    args.out.mkdir(parents=True, exist_ok=True)
    train.write(args.out / "train.jsonl")
    holdout.write(args.out / "holdout.jsonl")
    if args.summary:
        print(f"train {len(train)} / holdout {len(holdout)}")
    return 0


def _cmd_sample(args) -> int:
    manifest = DatasetManifest.read(args.manifest)
    if args.size is not None:
        subset = sample_subset(manifest, args.size, args.seed)
        args.out.parent.mkdir(parents=True, exist_ok=True)
        subset.write(args.out)
        return 0
    grid = SizeGrid.up_to(args.grid_max)
    subsets = nested_subsets(manifest, grid, args.seed)
    args.out.mkdir(parents=True, exist_ok=True)
    for size, sub in zip(grid.sizes, subsets):
        sub.write(args.out / f"subset_{size:06}.jsonl")
    return 0


def _cmd_eval_iou(args) -> int:
    manifest = DatasetManifest.read(args.manifest)
    results = evaluate_predictions(manifest, args.manifest.parent, args.pred, args.threshold)
    args.out.parent.mkdir(parents=True, exist_ok=True)
    with open(args.out, "w", encoding="utf-8") as fh:
        for r in results:
            fh.write(json.dumps(r, sort_keys=True) + "\n")
    if args.summary:
        print(f"mean IoU over {len(results)} frames: {aggregate_mean(results):.4f}")
    return 0


def _cmd_stats(args) -> int:
    records = read_run_records(args.runs)
    stats = compute_stats(aggregate_matrix(records), alpha=args.alpha)
    args.out.parent.mkdir(parents=True, exist_ok=True)
    args.out.write_text(json.dumps(stats_to_dict(stats, args.alpha), indent=2, sort_keys=True) + "\n",
                        encoding="utf-8")
    return 0


def _cmd_report(args) -> int:
    doc = json.loads(args.stats.read_text(encoding="utf-8"))
    stats = stats_from_dict(doc)
    emit_reports(stats, args.format, args.out, significance=args.significance,
                 alpha=float(doc.get("alpha", 0.95)))
    return 0


_COMMANDS = {
    "generate": _cmd_generate,
    "validate": _cmd_validate,
    "freq": _cmd_freq,
    "split": _cmd_split,
    "sample": _cmd_sample,
    "eval-iou": _cmd_eval_iou,
    "stats": _cmd_stats,
    "report": _cmd_report,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    try:
        return _COMMANDS[args.command](args)
    except ParameterError as e:
        print(f"synthseg: {e}", file=sys.stderr)
        return 1
    except (SynthsegError, FileNotFoundError) as e:
        print(f"synthseg: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
