"""Command-line interface: train, generate, featurize, eval, render."""
from __future__ import annotations

import argparse
import csv
import logging
import os
import sys
from pathlib import Path

import numpy as np

from .errors import ScanPathError
from .eval_harness import cross_validate, deception_rate, featurize_recordings, format_report
from .gaze_data import CsvFormat, Dataset, load_recordings, normalize, write_recordings
from .generator import GeneratorConfig, generate_batch
from .model_builder import BuildConfig, UpdateRule, generate_model, load_model, save_model

log = logging.getLogger("scanpathgen")


def _default_threads() -> int:
    return int(os.environ.get("SCANPATH_THREADS", "1"))


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--seed", type=int, default=0, help="RNG seed (runs are reproducible)")
    p.add_argument("--verbose", action="store_true")
    p.add_argument("--threads", type=int, default=_default_threads())
    p.add_argument("--delimiter", default=",", help="CSV delimiter (default comma)")


def _load_normalized(path: str, delimiter: str, class_key: str = "stimulus") -> Dataset:
    ds = load_recordings(path, CsvFormat(delimiter=delimiter), class_key=class_key)
    return normalize(ds)


def _parse_grid(text: str) -> tuple[int, int]:
    w, _, h = text.partition("x")
    return int(w), int(h)


def cmd_train(args) -> int:
    dataset = _load_normalized(args.input, args.delimiter)
    config = BuildConfig(
        num_clusters=args.clusters,
        max_level=args.max_level,
        dyn_cluster=args.dyn_cluster,
        rule=UpdateRule(args.rule),
        merge_radius=args.merge_radius,
        variance_fraction=args.pca_variance,
        time_weight=args.time_weight,
        seed=args.seed,
    )
    model = generate_model(dataset, config)
    save_model(model, args.out)
    counts = ", ".join(str(len(level)) for level in model.levels)
    print(f"model: dim={model.dim} levels={model.max_level} nodes per level: {counts}")
    print(f"wrote {args.out}")
    return 0


def cmd_generate(args) -> int:
    model = load_model(args.model)
    config = GeneratorConfig(
        max_clusters=args.max_clusters,
        max_subclusters=args.max_subclusters,
        dyn_cluster=args.dyn_cluster,
        rule=UpdateRule(args.rule),
        seed=args.seed,
        clamp_to_unit=not args.no_clamp,
    )
    recs = generate_batch(
        model,
        config,
        args.count,
        threads=args.threads,
        stimulus_label=args.stimulus,
        participant_label=args.participant,
    )
    write_recordings(Dataset(tuple(recs)), args.out)
    print(f"wrote {args.count} scan paths to {args.out}")
    return 0


def cmd_featurize(args) -> int:
    dataset = _load_normalized(args.input, args.delimiter)
    grid = _parse_grid(args.grid)
    X = featurize_recordings(dataset.recordings, args.kind, grid=grid, bins=args.bins)
    with Path(args.out).open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(
            ["rec", "stimulus", "participant"] + [f"f{i}" for i in range(X.shape[1])]
        )
        for rec, row in zip(dataset.recordings, X):
            writer.writerow(
                [rec.recording_id, rec.stimulus_label, rec.participant_label]
                + [repr(v) for v in row]
            )
    print(f"wrote {X.shape[0]}x{X.shape[1]} features to {args.out}")
    return 0


def _emit_report(report, out: str | None) -> None:
    text = format_report(report)
    print(text)
    if out:
        Path(out).write_text(text + "\n")


def cmd_eval_cv(args) -> int:
    dataset = _load_normalized(args.input, args.delimiter, class_key=args.classes)
    extra = None
    if args.gen:
        gen = _load_normalized(args.gen, args.delimiter, class_key=args.classes)
        extra = list(gen.recordings)
    report = cross_validate(
        dataset,
        feature_kind=args.feature,
        classifier_kind=args.clf,
        folds=args.folds,
        extra_training=extra,
        augment_training=args.augment,
        seed=args.seed,
        use_real_training=not args.no_real,
        grid=_parse_grid(args.grid),
        bins=args.bins,
        threads=args.threads,
    )
    _emit_report(report, args.out)
    return 0


def cmd_eval_deceive(args) -> int:
    real = _load_normalized(args.real, args.delimiter, class_key=args.classes)
    gen = _load_normalized(args.gen, args.delimiter, class_key=args.classes)
    per_class: dict[str, list] = {}
    for rec in gen.recordings:
        per_class.setdefault(rec.label(args.classes), []).append(rec)
    report = deception_rate(
        real,
        per_class,
        feature_kind=args.feature,
        classifier_kind=args.clf,
        seed=args.seed,
        grid=_parse_grid(args.grid),
        bins=args.bins,
    )
    _emit_report(report, args.out)
    return 0


_RAMP_START = (40, 60, 220)
_RAMP_END = (220, 50, 40)


def _ramp_color(frac: float) -> str:
    r, g, b = (
        int(round(a + (b - a) * frac)) for a, b in zip(_RAMP_START, _RAMP_END)
    )
    return f"rgb({r},{g},{b})"


def render_svg(dataset: Dataset, size: int = 800) -> str:
    """Polyline per recording, drawn as per-segment strokes colored by time."""
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" '
        f'viewBox="0 0 {size} {size}">',
        f'<rect width="{size}" height="{size}" fill="white"/>',
    ]
    for rec in dataset.recordings:
        n = len(rec.points)
        parts.append(f'<g data-recording="{rec.recording_id}">')
        for i in range(n - 1):
            a, b = rec.points[i], rec.points[i + 1]
            frac = a.t if a.t is not None else (i / (n - 1) if n > 1 else 0.0)
            parts.append(
                f'<line x1="{a.x * size:.2f}" y1="{(1 - a.y) * size:.2f}" '
                f'x2="{b.x * size:.2f}" y2="{(1 - b.y) * size:.2f}" '
                f'stroke="{_ramp_color(frac)}" stroke-width="1.5"/>'
            )
        parts.append("</g>")
    parts.append("</svg>")
    return "\n".join(parts)


def cmd_render(args) -> int:
    dataset = _load_normalized(args.input, args.delimiter)
    Path(args.out).write_text(render_svg(dataset, size=args.size))
    print(f"wrote {args.out}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="scanpathgen",
        description="Learn hierarchical scan path models from gaze data and generate new scan paths.",
    )
    sub = parser.add_subparsers(dest="cmd")

    p = sub.add_parser("train", help="learn a model from a gaze CSV")
    p.add_argument("--input", required=True)
    p.add_argument("--max-level", type=int, required=True)
    p.add_argument("--clusters", type=int, required=True)
    p.add_argument("--dyn-cluster", action="store_true")
    p.add_argument("--rule", default="constant", choices=("constant", "halving", "linear_decay"))
    p.add_argument("--merge-radius", type=float, default=None)
    p.add_argument("--pca-variance", type=float, default=0.95)
    p.add_argument("--time-weight", type=float, default=1.0)
    p.add_argument("--out", required=True)
    _add_common(p)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("generate", help="generate scan paths from a model")
    p.add_argument("--model", required=True)
    p.add_argument("--count", type=int, required=True)
    p.add_argument("--max-clusters", type=int, required=True)
    p.add_argument("--max-subclusters", type=int, required=True)
    p.add_argument("--dyn-cluster", action="store_true")
    p.add_argument("--rule", default="constant", choices=("constant", "halving", "linear_decay"))
    p.add_argument("--no-clamp", action="store_true", help="do not clamp points into [0,1]")
    p.add_argument("--stimulus", default="", help="stimulus label for generated recordings")
    p.add_argument("--participant", default="", help="participant label for generated recordings")
    p.add_argument("--out", required=True)
    _add_common(p)
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("featurize", help="compute heatmap/HOV features")
    p.add_argument("--input", required=True)
    p.add_argument("--kind", required=True, choices=("heatmap", "hov"))
    p.add_argument("--grid", default="16x16")
    p.add_argument("--bins", type=int, default=36)
    p.add_argument("--out", required=True)
    _add_common(p)
    p.set_defaults(func=cmd_featurize)

    p = sub.add_parser("eval", help="classification experiments")
    eval_sub = p.add_subparsers(dest="eval_cmd")

    q = eval_sub.add_parser("cv", help="stratified cross-validation")
    q.add_argument("--input", required=True)
    q.add_argument("--classes", default="stimulus", choices=("stimulus", "participant"))
    q.add_argument("--feature", default="heatmap", choices=("heatmap", "hov"))
    q.add_argument("--clf", default="centroid", choices=("centroid", "mlp"))
    q.add_argument("--folds", type=int, default=5)
    q.add_argument("--gen", default=None, help="generated recordings to add to training folds")
    q.add_argument("--no-real", action="store_true", help="train on generated data only")
    q.add_argument("--augment", action="store_true")
    q.add_argument("--grid", default="16x16")
    q.add_argument("--bins", type=int, default=36)
    q.add_argument("--out", default=None)
    _add_common(q)
    q.set_defaults(func=cmd_eval_cv)

    q = eval_sub.add_parser("deceive", help="deception rate of generated data")
    q.add_argument("--real", required=True)
    q.add_argument("--gen", required=True)
    q.add_argument("--classes", default="participant", choices=("stimulus", "participant"))
    q.add_argument("--feature", default="heatmap", choices=("heatmap", "hov"))
    q.add_argument("--clf", default="centroid", choices=("centroid", "mlp"))
    q.add_argument("--grid", default="16x16")
    q.add_argument("--bins", type=int, default=36)
    q.add_argument("--out", default=None)
    _add_common(q)
    q.set_defaults(func=cmd_eval_deceive)

    p = sub.add_parser("render", help="draw recordings as an SVG")
    p.add_argument("--input", required=True)
    p.add_argument("--size", type=int, default=800)
    p.add_argument("--out", required=True)
    _add_common(p)
    p.set_defaults(func=cmd_render)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    if not hasattr(args, "func"):
        parser.print_usage(sys.stderr)
        return 2
    logging.basicConfig(level=logging.DEBUG if getattr(args, "verbose", False) else logging.INFO)
    try:
        return args.func(args)
    except (ScanPathError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
