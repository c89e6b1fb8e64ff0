"""Dataset manifests: JSONL bookkeeping, splits, subsets, frequencies.

A manifest is one header line followed by one record per frame:

    {"kind": "synthseg-manifest", "version": 1, "role": "S",
     "config_digest": "...", "classes": ["back_door", ...]}
    {"frame": 0, "image": "frame_000000.png", "masks": {"back_door": "..."},
     "present": {"back_door": true, ...}, "seed": 123, "domain": "A"}

Paths are POSIX-relative to the manifest's directory.  Selection
operations (holdout split, subset sampling) are deterministic per seed
via the counter-based RNG and operate on records only, so they work on
manifests whose image files are elsewhere or absent.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from . import rng
from .errors import DataError, ParameterError, SamplingError
from .images import load_mask_png
from .scene import class_slugs

MANIFEST_KIND = "synthseg-manifest"
MANIFEST_VERSION = 1


@dataclass(frozen=True)
class ManifestRecord:
    frame: int
    image: str
    masks: dict[str, str]
    present: dict[str, bool]
    seed: int
    domain: str

    def to_json(self) -> str:
        return json.dumps({"frame": self.frame, "image": self.image, "masks": self.masks,
                           "present": self.present, "seed": self.seed, "domain": self.domain},
                          separators=(",", ":"), sort_keys=True)


@dataclass(frozen=True)
class DatasetManifest:
    role: str
    config_digest: str
    classes: tuple[str, ...]
    records: tuple[ManifestRecord, ...]

    def __post_init__(self):
        ids = [r.frame for r in self.records]
        if len(set(ids)) != len(ids):
            raise DataError("frame ids must be unique")
        object.__setattr__(self, "records", tuple(self.records))
        object.__setattr__(self, "classes", tuple(self.classes))

    def __len__(self) -> int:
        return len(self.records)

    def subset(self, indices) -> "DatasetManifest":
        recs = tuple(self.records[int(i)] for i in indices)
        return replace(self, records=recs)

    def write(self, path) -> None:
        path = Path(path)
        header = json.dumps({"kind": MANIFEST_KIND, "version": MANIFEST_VERSION,
                             "role": self.role, "config_digest": self.config_digest,
                             "classes": list(self.classes)},
                            separators=(",", ":"), sort_keys=True)
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(header + "\n")
            for r in self.records:
                fh.write(r.to_json() + "\n")

    @staticmethod
    def read(path) -> "DatasetManifest":
        path = Path(path)
        with open(path, "r", encoding="utf-8") as fh:
            lines = [ln for ln in (l.strip() for l in fh) if ln]
        if not lines:
            raise DataError(f"manifest {path} is empty")
        try:
            header = json.loads(lines[0])
        except json.JSONDecodeError as e:
            raise DataError(f"manifest {path} header is not JSON: {e}") from None
        if header.get("kind") != MANIFEST_KIND:
            raise DataError(f"{path} is not a dataset manifest")
        records = []
        for ln in lines[1:]:
            try:
                d = json.loads(ln)
                records.append(ManifestRecord(frame=int(d["frame"]), image=d["image"],
                                              masks=dict(d["masks"]), present=dict(d["present"]),
                                              seed=int(d["seed"]), domain=d["domain"]))
            except (json.JSONDecodeError, KeyError) as e:
                raise DataError(f"bad manifest record in {path}: {e}") from None
        return DatasetManifest(role=header.get("role", "S"),
                               config_digest=header.get("config_digest", ""),
                               classes=tuple(header.get("classes", class_slugs())),
                               records=tuple(records))


def validate_manifest(manifest: DatasetManifest, base_dir) -> list[str]:
    """Re-scan mask files and check every path and presence flag.

    Returns a list of problems; empty means the manifest is consistent.
    """
    base = Path(base_dir)
    problems = []
    for rec in manifest.records:
        img = base / rec.image
        if not img.is_file():
            problems.append(f"frame {rec.frame}: missing image {rec.image}")
        for slug in manifest.classes:
            if slug not in rec.masks:
                problems.append(f"frame {rec.frame}: no mask path for {slug}")
                continue
            mpath = base / rec.masks[slug]
            if not mpath.is_file():
                problems.append(f"frame {rec.frame}: missing mask {rec.masks[slug]}")
                continue
            actual = bool(load_mask_png(mpath).any())
            flagged = bool(rec.present.get(slug, False))
            if actual != flagged:
                problems.append(f"frame {rec.frame}: presence flag for {slug} is "
                                f"{flagged} but mask re-scan says {actual}")
    return problems


@dataclass(frozen=True)
class FrequencyTable:
    total: int
    counts: dict[str, int]
    frequencies: dict[str, float]


def compute_frequency_table(manifest: DatasetManifest) -> FrequencyTable:
    """Per-class example counts and frequencies over the manifest."""
    if len(manifest) == 0:
        raise DataError("frequency undefined for an empty manifest")
    counts = {slug: 0 for slug in manifest.classes}
    for rec in manifest.records:
        for slug in manifest.classes:
            if rec.present.get(slug, False):
                counts[slug] += 1
    total = len(manifest)
    freqs = {slug: counts[slug] / total for slug in manifest.classes}
    return FrequencyTable(total=total, counts=counts, frequencies=freqs)


def split_holdout(manifest: DatasetManifest, fraction: float, seed: int
                  ) -> tuple[DatasetManifest, DatasetManifest]:
    """Disjoint (train, holdout) partition; holdout size rounds half-up."""
    if not 0.0 < fraction < 1.0:
        raise ParameterError(f"holdout fraction must be in (0, 1), got {fraction}")
    n = len(manifest)
    k = int(math.floor(fraction * n + 0.5))
    perm = rng.permutation(n, seed, rng.tag_hash("holdout"))
    hold = np.sort(perm[:k])
    train = np.sort(perm[k:])
    return manifest.subset(train), manifest.subset(hold)


def sample_subset(manifest: DatasetManifest, size: int, seed: int) -> DatasetManifest:
    """Uniform sample without replacement, deterministic per seed."""
    n = len(manifest)
    if size < 0 or size > n:
        raise SamplingError(f"cannot sample {size} records from {n}")
    perm = rng.permutation(n, seed, rng.tag_hash("subset"))
    return manifest.subset(perm[:size])


@dataclass(frozen=True)
class SizeGrid:
    """Ordered sizes {0, 16, 32, 64, ...}: zero, then doubling from 16."""

    sizes: tuple[int, ...]

    def __post_init__(self):
        s = tuple(int(x) for x in self.sizes)
        if not s or s[0] != 0:
            raise ParameterError("size grid must start at 0")
        for a, b in zip(s[1:], s[2:]):
            if b != 2 * a:
                raise ParameterError("each nonzero grid size must double its predecessor")
        if len(s) > 1 and s[1] != 16:
            raise ParameterError("first nonzero grid size must be 16")
        if any(b <= a for a, b in zip(s, s[1:])):
            raise ParameterError("grid sizes must be strictly increasing")
        object.__setattr__(self, "sizes", s)

    @staticmethod
    def up_to(max_size: int) -> "SizeGrid":
        sizes = [0]
        k = 16
        while k <= max_size:
            sizes.append(k)
            k *= 2
        return SizeGrid(tuple(sizes))

    @property
    def max(self) -> int:
        return self.sizes[-1]


def nested_subsets(manifest: DatasetManifest, grid: SizeGrid, seed: int) -> list[DatasetManifest]:
    """One manifest per grid size; each is a prefix of the same permutation,
    so every subset contains all smaller ones."""
    if grid.max > len(manifest):
        raise SamplingError(f"grid max {grid.max} exceeds manifest size {len(manifest)}")
    perm = rng.permutation(len(manifest), seed, rng.tag_hash("subset"))
    return [manifest.subset(perm[:size]) for size in grid.sizes]
