"""Command-line entry point for batch attention cropping."""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .batch import JobConfig, run_batch
from .crop import ACConfig
from .errors import AttentionCropError
from .saliency import ScaleSpaceConfig


def _parse_size(text: str) -> tuple[int, int]:
    try:
        w, h = text.lower().split("x")
        return int(w), int(h)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected WxH, got {text!r}") from exc


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="attention-crop",
        description="Saliency-driven batch image cropping for dataset preprocessing.",
    )
    parser.add_argument("--input", required=True, type=Path, help="input image tree")
    parser.add_argument("--output", required=True, type=Path, help="output directory")
    parser.add_argument(
        "--mode",
        choices=["crop", "augment", "saliency-debug"],
        default="crop",
        help="crop: AC output only; augment: original + AC; "
        "saliency-debug: also emit saliency/label PNGs",
    )
    parser.add_argument("--clusters", type=int, default=3, help="cluster count N")
    parser.add_argument(
        "--lambda",
        dest="crop_ratio",
        type=float,
        default=1.0 / 3.0,
        help="fraction of clusters to crop out (threshold = N * lambda)",
    )
    parser.add_argument(
        "--target-size", type=_parse_size, default=None, metavar="WxH",
        help="resize crops to this size, e.g. 224x224",
    )
    parser.add_argument("--workers", type=int, default=1)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--manifest", type=Path, default=None)
    parser.add_argument(
        "--manual-scale", type=int, default=None,
        help="fix the smoothing scale index instead of entropy selection",
    )
    parser.add_argument(
        "--min-box-frac", type=float, default=0.0,
        help="fall back to the original when the box covers less than this fraction",
    )
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        config = JobConfig(
            input_dir=args.input,
            output_dir=args.output,
            mode=args.mode,
            ac=ACConfig(
                cluster_count=args.clusters,
                crop_ratio=args.crop_ratio,
                target_size=args.target_size,
                min_box_fraction=args.min_box_frac,
            ),
            saliency=ScaleSpaceConfig(manual_scale=args.manual_scale),
            workers=args.workers,
            global_seed=args.seed,
            manifest_path=args.manifest,
        )
        summary = run_batch(config)
    except (AttentionCropError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1

    print(
        f"processed {summary.processed} image(s), skipped {summary.skipped}, "
        f"{summary.throughput:.1f} img/s"
    )
    for rel, message in summary.failures:
        print(f"  failed {rel}: {message}", file=sys.stderr)
    return 2 if summary.failures else 0


if __name__ == "__main__":
    sys.exit(main())
