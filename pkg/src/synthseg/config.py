"""Generation config: subject + randomization + render settings as JSON.

The document shape (all keys required unless noted):

    {
      "role": "S" | "R",
      "mask_mode": "per-class-pass" | "id-buffer",
      "subject": {"kind": "procedural", "length": .., "width": .., "height": .., "detail": ..}
               | {"kind": "obj", "path": "...", "group_map": {group: class name},
                  "paintable" (optional): [group, ...]},
      "render": {"samples_per_pixel": .., "max_reflection_depth": ..,
                 "exposure": .., "gamma": .., "tile_size": ..},
      "randomization": {
        "translation_ranges": [[xlo,xhi],[ylo,yhi],[zlo,zhi]],
        "yaw_range": [lo,hi],
        "palette": [{"kind": .., "base_color": [r,g,b], "specular_reflectance": ..,
                     "roughness": .., "opacity": ..}, ...],
        "sun_azimuth_range": [lo,hi], "sun_elevation_range": [lo,hi],
        "sun_irradiance": [r,g,b],
        "sky_rotation_ranges": [[..],[..],[..]],
        "sky": {"family": .., "width": .., "height": .., "seed": ..},
        "camera": {"focal_length": .., "sensor_width": .., "sensor_height": ..,
                   "resolution": [w,h], "distance_range": [..], "azimuth_range": [..],
                   "height_range": [..], "target_height": ..},
        "domain_tag": "A" | "B",
        "sensor_noise_std": ..
      }
    }

``config_digest`` is the SHA-256 of the canonical (sorted-keys, compact)
JSON encoding and is stamped into manifests and frame provenance.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path

from .errors import ParameterError
from .meshes import VehicleParams, build_procedural_subject
from .obj_io import load_obj_subject
from .randomizer import CameraConfig, RandomizationConfig, SkyConfig, preset
from .render import MASK_MODES, RenderSettings
from .scene import Material, SubjectModel

ROLES = ("R", "S")


@dataclass(frozen=True)
class SubjectConfig:
    kind: str = "procedural"
    length: float = 4.4
    width: float = 1.8
    height: float = 1.5
    detail: int = 0
    path: str = ""
    group_map: dict[str, str] = field(default_factory=dict)
    paintable: tuple[str, ...] | None = None

    def __post_init__(self):
        if self.kind not in ("procedural", "obj"):
            raise ParameterError("subject kind must be 'procedural' or 'obj'")
        if self.kind == "obj" and not self.path:
            raise ParameterError("obj subject needs a path")

    def build(self) -> SubjectModel:
        if self.kind == "procedural":
            return build_procedural_subject(
                VehicleParams(self.length, self.width, self.height, self.detail))
        paintable = set(self.paintable) if self.paintable is not None else None
        return load_obj_subject(self.path, self.group_map, paintable)


@dataclass(frozen=True)
class GenerationConfig:
    randomization: RandomizationConfig
    render: RenderSettings = field(default_factory=RenderSettings)
    subject: SubjectConfig = field(default_factory=SubjectConfig)
    mask_mode: str = "id-buffer"
    role: str = "S"

    def __post_init__(self):
        if self.mask_mode not in MASK_MODES:
            raise ParameterError(f"mask_mode must be one of {MASK_MODES}")
        if self.role not in ROLES:
            raise ParameterError(f"role must be one of {ROLES}")

    def to_dict(self) -> dict:
        d = {
            "role": self.role,
            "mask_mode": self.mask_mode,
            "subject": {k: v for k, v in asdict(self.subject).items()
                        if not (k == "paintable" and v is None)},
            "render": asdict(self.render),
            "randomization": _randomization_to_dict(self.randomization),
        }
        if self.subject.paintable is not None:
            d["subject"]["paintable"] = list(self.subject.paintable)
        return d

    def digest(self) -> str:
        blob = json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode("utf-8")).hexdigest()


def _randomization_to_dict(r: RandomizationConfig) -> dict:
    return {
        "translation_ranges": [list(x) for x in r.translation_ranges],
        "yaw_range": list(r.yaw_range),
        "palette": [asdict(m) | {"base_color": list(m.base_color)} for m in r.palette],
        "sun_azimuth_range": list(r.sun_azimuth_range),
        "sun_elevation_range": list(r.sun_elevation_range),
        "sun_irradiance": list(r.sun_irradiance),
        "sky_rotation_ranges": [list(x) for x in r.sky_rotation_ranges],
        "sky": asdict(r.sky),
        "camera": asdict(r.camera) | {
            "resolution": list(r.camera.resolution),
            "distance_range": list(r.camera.distance_range),
            "azimuth_range": list(r.camera.azimuth_range),
            "height_range": list(r.camera.height_range),
        },
        "domain_tag": r.domain_tag,
        "sensor_noise_std": r.sensor_noise_std,
    }


def _pair(v, name) -> tuple[float, float]:
    if not isinstance(v, (list, tuple)) or len(v) != 2:
        raise ParameterError(f"{name} must be a [low, high] pair")
    return (float(v[0]), float(v[1]))


def _randomization_from_dict(d: dict) -> RandomizationConfig:
    try:
        palette = tuple(Material(kind=m["kind"], base_color=tuple(m["base_color"]),
                                 specular_reflectance=m.get("specular_reflectance", 0.0),
                                 roughness=m.get("roughness", 0.5),
                                 opacity=m.get("opacity", 1.0))
                        for m in d["palette"])
        cam = d["camera"]
        return RandomizationConfig(
            translation_ranges=tuple(_pair(x, "translation range") for x in d["translation_ranges"]),
            yaw_range=_pair(d["yaw_range"], "yaw_range"),
            palette=palette,
            sun_azimuth_range=_pair(d["sun_azimuth_range"], "sun_azimuth_range"),
            sun_elevation_range=_pair(d["sun_elevation_range"], "sun_elevation_range"),
            sun_irradiance=tuple(float(x) for x in d["sun_irradiance"]),
            sky_rotation_ranges=tuple(_pair(x, "sky rotation range") for x in d["sky_rotation_ranges"]),
            sky=SkyConfig(**d["sky"]),
            camera=CameraConfig(
                focal_length=cam["focal_length"], sensor_width=cam["sensor_width"],
                sensor_height=cam["sensor_height"], resolution=tuple(cam["resolution"]),
                distance_range=_pair(cam["distance_range"], "distance_range"),
                azimuth_range=_pair(cam["azimuth_range"], "azimuth_range"),
                height_range=_pair(cam["height_range"], "height_range"),
                target_height=cam.get("target_height", 0.75)),
            domain_tag=d["domain_tag"],
            sensor_noise_std=d.get("sensor_noise_std", 0.0))
    except KeyError as e:
        raise ParameterError(f"randomization config missing key {e.args[0]!r}") from None


def config_from_dict(d: dict) -> GenerationConfig:
    try:
        sub = dict(d.get("subject", {}))
        if "paintable" in sub and sub["paintable"] is not None:
            sub["paintable"] = tuple(sub["paintable"])
        if "group_map" in sub:
            sub["group_map"] = dict(sub["group_map"])
        return GenerationConfig(
            randomization=_randomization_from_dict(d["randomization"]),
            render=RenderSettings(**d.get("render", {})),
            subject=SubjectConfig(**sub),
            mask_mode=d.get("mask_mode", "id-buffer"),
            role=d.get("role", "S"))
    except KeyError as e:
        raise ParameterError(f"config missing key {e.args[0]!r}") from None
    except TypeError as e:
        raise ParameterError(f"bad config field: {e}") from None


def load_config(path) -> GenerationConfig:
    with open(Path(path), "r", encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as e:
            raise ParameterError(f"config {path} is not valid JSON: {e}") from None
    return config_from_dict(doc)


def save_config(config: GenerationConfig, path) -> None:
    with open(Path(path), "w", encoding="utf-8") as fh:
        json.dump(config.to_dict(), fh, indent=2, sort_keys=True)
        fh.write("\n")


def preset_config(domain: str, resolution: tuple[int, int] = (256, 256),
                  mask_mode: str = "id-buffer") -> GenerationConfig:
    """Full generation preset: domain A is the synthetic set (role S),
    domain B the pseudo-real stand-in (role R)."""
    rand = preset(domain, resolution)
    return GenerationConfig(randomization=rand, mask_mode=mask_mode,
                            role="S" if domain == "A" else "R")
