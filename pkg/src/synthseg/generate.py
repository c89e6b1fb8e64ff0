"""Batch frame generation: render, write PNGs, assemble the manifest.

Frames fan out across worker threads keyed by frame index; the manifest
is assembled in index order, so output is byte-identical for any worker
count.  Regenerating with identical (config, count, seed) reproduces
identical files.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

from .config import GenerationConfig
from .errors import ParameterError
from .images import frame_image_name, frame_mask_name, save_beauty_png, save_mask_png
from .manifest import DatasetManifest, ManifestRecord
from .randomizer import sample_scene
from .render import render_labeled_frame
from .scene import class_slugs

WORKERS_ENV = "SYNTHSEG_WORKERS"


def default_workers() -> int:
    try:
        return max(1, int(os.environ.get(WORKERS_ENV, "1")))
    except ValueError:
        return 1


def generate_dataset(config: GenerationConfig, count: int, master_seed: int,
                     out_dir, workers: int | None = None) -> DatasetManifest:
    """Render ``count`` labeled frames into ``out_dir`` plus manifest.jsonl."""
    if count < 1:
        raise ParameterError(f"count must be >= 1, got {count}")
    workers = default_workers() if workers is None else max(1, int(workers))
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    subject = config.subject.build()
    digest = config.digest()
    slugs = class_slugs()

    def one_frame(index: int) -> ManifestRecord:
        scene = sample_scene(config.randomization, master_seed, index)
        frame = render_labeled_frame(scene, subject, config.render,
                                     mask_mode=config.mask_mode,
                                     frame_index=index, config_digest=digest)
        image_name = frame_image_name(index)
        save_beauty_png(frame.beauty.pixels, out / image_name)
        mask_names = {}
        for mask in frame.masks:
            name = frame_mask_name(index, mask.feature_class.slug)
            save_mask_png(mask.pixels, out / name)
            mask_names[mask.feature_class.slug] = name
        return ManifestRecord(frame=index, image=image_name, masks=mask_names,
                              present=dict(frame.provenance.presence),
                              seed=scene.seed, domain=scene.domain_tag)

    indices = list(range(count))
    if workers <= 1:
        records = [one_frame(i) for i in indices]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            records = list(pool.map(one_frame, indices))

    manifest = DatasetManifest(role=config.role, config_digest=digest,
                               classes=slugs, records=tuple(records))
    manifest.write(out / "manifest.jsonl")
    return manifest
