#!/usr/bin/env python3
"""End-to-end demo: synthesize a tiny corpus, crop it, dump debug artifacts.

Usage: python3 scripts/run_demo.py [workdir]

Creates workdir/corpus with blob images in two classes, then runs the
batch pipeline in saliency-debug mode so the intermediate saliency and
segmentation PNGs land next to the crops.
"""

import sys
from pathlib import Path

import numpy as np

from attncrop import ACConfig, JobConfig, ScaleSpaceConfig, run_batch, save_image


def make_corpus(root: Path, per_class: int = 5, size: int = 256) -> None:
    rng = np.random.default_rng(42)
    for cls, channel in (("red_blobs", 0), ("green_blobs", 1)):
        for i in range(per_class):
            img = np.full((size, size, 3), 0.25)
            img += rng.normal(0, 0.02, img.shape)
            side = int(rng.integers(40, 80))
            r0 = int(rng.integers(10, size - side - 10))
            c0 = int(rng.integers(10, size - side - 10))
            img[r0 : r0 + side, c0 : c0 + side, channel] = 0.95
            save_image(root / cls / f"sample{i:02d}.png", np.clip(img, 0, 1))


def main() -> int:
    workdir = Path(sys.argv[1]) if len(sys.argv) > 1 else Path("demo_out")
    corpus = workdir / "corpus"
    make_corpus(corpus)
    summary = run_batch(
        JobConfig(
            input_dir=corpus,
            output_dir=workdir / "cropped",
            mode="saliency-debug",
            ac=ACConfig(cluster_count=3, crop_ratio=1.0 / 3.0),
            saliency=ScaleSpaceConfig(),
            workers=1,
            global_seed=0,
        )
    )
    print(
        f"processed {summary.processed} images at {summary.throughput:.1f} img/s; "
        f"outputs + manifest under {workdir / 'cropped'}"
    )
    return 0 if not summary.failures else 2


if __name__ == "__main__":
    sys.exit(main())
