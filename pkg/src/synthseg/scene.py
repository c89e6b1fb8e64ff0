"""Scene model: meshes, feature classes, materials, camera, light, sky.

Everything validates on construction and freezes its array fields, so
instances can be shared across renderer threads without copies or locks.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .errors import ParameterError
from .geometry import RigidTransform, is_rotation

FEATURE_CLASS_NAMES = (
    "back door",
    "back window",
    "rear window",
    "front door",
    "front window",
    "door handle",
    "mirror",
    "tail light",
)

MATERIAL_KINDS = ("matte", "painted-metal", "glass", "rubber", "plastic")

DOMAIN_TAGS = ("A", "B")


@dataclass(frozen=True)
class FeatureClass:
    id: int
    name: str

    def __post_init__(self):
        if not 0 <= self.id <= 7:
            raise ParameterError(f"feature class id must be in 0..7, got {self.id}")
        if self.name not in FEATURE_CLASS_NAMES:
            raise ParameterError(f"unknown feature class name: {self.name!r}")

    @property
    def slug(self) -> str:
        return self.name.replace(" ", "_")


def default_feature_classes() -> tuple[FeatureClass, ...]:
    return tuple(FeatureClass(i, n) for i, n in enumerate(FEATURE_CLASS_NAMES))


def feature_class_by_name(name: str) -> FeatureClass:
    try:
        return FeatureClass(FEATURE_CLASS_NAMES.index(name), name)
    except ValueError:
        raise ParameterError(f"unknown feature class name: {name!r}") from None


def class_slugs() -> tuple[str, ...]:
    return tuple(c.slug for c in default_feature_classes())


def _read_only(arr: np.ndarray) -> np.ndarray:
    arr = arr.copy()
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class Mesh:
    """Triangle mesh with per-vertex unit normals, positions in meters."""

    vertices: np.ndarray
    triangles: np.ndarray
    normals: np.ndarray

    def __post_init__(self):
        verts = np.asarray(self.vertices, dtype=np.float64).reshape(-1, 3)
        tris = np.asarray(self.triangles, dtype=np.int32).reshape(-1, 3)
        norms = np.asarray(self.normals, dtype=np.float64).reshape(-1, 3)
        if tris.shape[0] == 0:
            raise ParameterError("mesh must contain at least one triangle")
        if norms.shape != verts.shape:
            raise ParameterError("one normal per vertex required")
        if tris.min(initial=0) < 0 or tris.max(initial=-1) >= len(verts):
            raise ParameterError("triangle index out of range")
        lengths = np.linalg.norm(norms, axis=1)
        if np.any(np.abs(lengths - 1.0) > 1e-6):
            raise ParameterError("normals must be unit length (within 1e-6)")
        object.__setattr__(self, "vertices", _read_only(verts))
        object.__setattr__(self, "triangles", _read_only(tris))
        object.__setattr__(self, "normals", _read_only(norms))

    @property
    def triangle_count(self) -> int:
        return int(self.triangles.shape[0])


@dataclass(frozen=True)
class Material:
    kind: str
    base_color: tuple[float, float, float]
    specular_reflectance: float = 0.0
    roughness: float = 0.5
    opacity: float = 1.0

    def __post_init__(self):
        if self.kind not in MATERIAL_KINDS:
            raise ParameterError(f"unknown material kind: {self.kind!r}")
        color = tuple(float(c) for c in self.base_color)
        if len(color) != 3 or any(not 0.0 <= c <= 1.0 for c in color):
            raise ParameterError("base_color must be three values in [0, 1]")
        object.__setattr__(self, "base_color", color)
        for name in ("specular_reflectance", "roughness", "opacity"):
            v = float(getattr(self, name))
            if not 0.0 <= v <= 1.0:
                raise ParameterError(f"{name} must be in [0, 1], got {v}")
            object.__setattr__(self, name, v)

    @property
    def kind_code(self) -> int:
        return MATERIAL_KINDS.index(self.kind)


@dataclass(frozen=True, eq=False)
class PartGroup:
    """Named set of meshes sharing one material and at most one feature class."""

    name: str
    meshes: tuple[Mesh, ...]
    feature_class: FeatureClass | None = None
    material: Material = Material("painted-metal", (0.6, 0.6, 0.62), 0.35, 0.3)

    def __post_init__(self):
        if not self.meshes:
            raise ParameterError(f"part group {self.name!r} has no meshes")
        object.__setattr__(self, "meshes", tuple(self.meshes))

    @property
    def triangle_count(self) -> int:
        return sum(m.triangle_count for m in self.meshes)


@dataclass(frozen=True, eq=False)
class SubjectModel:
    """Part groups plus paintable flags and the local bounding box."""

    part_groups: tuple[PartGroup, ...]
    paintable: tuple[bool, ...]
    bbox_min: np.ndarray
    bbox_max: np.ndarray

    def __post_init__(self):
        if len(self.paintable) != len(self.part_groups):
            raise ParameterError("one paintable flag per part group required")
        names = [g.name for g in self.part_groups]
        if len(set(names)) != len(names):
            raise ParameterError("part group names must be unique")
        seen: set[int] = set()
        for g in self.part_groups:
            for m in g.meshes:
                if id(m) in seen:
                    raise ParameterError("each mesh must belong to exactly one part group")
                seen.add(id(m))
        object.__setattr__(self, "bbox_min", _read_only(np.asarray(self.bbox_min, dtype=np.float64)))
        object.__setattr__(self, "bbox_max", _read_only(np.asarray(self.bbox_max, dtype=np.float64)))

    @classmethod
    def build(cls, part_groups, paintable) -> "SubjectModel":
        groups = tuple(part_groups)
        if not groups:
            raise ParameterError("subject needs at least one part group")
        pts = np.concatenate([m.vertices for g in groups for m in g.meshes])
        return cls(groups, tuple(bool(p) for p in paintable), pts.min(axis=0), pts.max(axis=0))

    @property
    def triangle_count(self) -> int:
        return sum(g.triangle_count for g in self.part_groups)

    @property
    def center(self) -> np.ndarray:
        return (self.bbox_min + self.bbox_max) / 2.0

    def classes_present(self) -> set[str]:
        return {g.feature_class.name for g in self.part_groups if g.feature_class is not None}


@dataclass(frozen=True, eq=False)
class PhysicalCamera:
    """Pinhole camera with physical focal length and sensor size (mm)."""

    focal_length: float
    sensor_width: float
    sensor_height: float
    resolution: tuple[int, int]
    position: np.ndarray = field(default_factory=lambda: np.zeros(3))
    rotation: np.ndarray = field(default_factory=lambda: np.eye(3))

    def __post_init__(self):
        for name in ("focal_length", "sensor_width", "sensor_height"):
            if float(getattr(self, name)) <= 0:
                raise ParameterError(f"{name} must be positive")
        w, h = (int(v) for v in self.resolution)
        if w < 16 or h < 16:
            raise ParameterError("resolution must be at least 16x16")
        object.__setattr__(self, "resolution", (w, h))
        pos = np.asarray(self.position, dtype=np.float64).reshape(3)
        rot = np.asarray(self.rotation, dtype=np.float64)
        if not is_rotation(rot):
            raise ParameterError("camera rotation must be a proper rotation")
        object.__setattr__(self, "position", _read_only(pos))
        object.__setattr__(self, "rotation", _read_only(rot))

    @property
    def horizontal_fov(self) -> float:
        return 2.0 * np.arctan(self.sensor_width / (2.0 * self.focal_length))

    @property
    def vertical_fov(self) -> float:
        return 2.0 * np.arctan(self.sensor_height / (2.0 * self.focal_length))

    def primary_ray(self, px: float, py: float, offset=(0.5, 0.5)) -> tuple[np.ndarray, np.ndarray]:
        """World-space primary ray through pixel (px, py) + sub-pixel offset."""
        w, h = self.resolution
        u = (px + offset[0] - w / 2.0) * (self.sensor_width / w)
        v = (h / 2.0 - (py + offset[1])) * (self.sensor_height / h)
        d_cam = np.array([u, v, self.focal_length])
        d_cam /= np.linalg.norm(d_cam)
        return self.position.copy(), self.rotation @ d_cam

    def primary_rays(self) -> tuple[np.ndarray, np.ndarray]:
        """Pixel-center rays for the whole frame: origins (H,W,3), dirs (H,W,3)."""
        w, h = self.resolution
        xs = (np.arange(w) + 0.5 - w / 2.0) * (self.sensor_width / w)
        ys = (h / 2.0 - (np.arange(h) + 0.5)) * (self.sensor_height / h)
        u, v = np.meshgrid(xs, ys)
        d = np.stack([u, v, np.full_like(u, self.focal_length)], axis=-1)
        d /= np.linalg.norm(d, axis=-1, keepdims=True)
        dirs = d @ self.rotation.T
        origins = np.broadcast_to(self.position, dirs.shape).copy()
        return origins, dirs


@dataclass(frozen=True, eq=False)
class SunLight:
    """Directional light; direction is the direction light travels."""

    direction: np.ndarray
    irradiance: np.ndarray

    def __post_init__(self):
        d = np.asarray(self.direction, dtype=np.float64).reshape(3)
        if abs(np.linalg.norm(d) - 1.0) > 1e-6:
            raise ParameterError("sun direction must be unit length")
        irr = np.asarray(self.irradiance, dtype=np.float64).reshape(3)
        if np.any(irr < 0):
            raise ParameterError("sun irradiance must be non-negative")
        object.__setattr__(self, "direction", _read_only(d))
        object.__setattr__(self, "irradiance", _read_only(irr))


@dataclass(frozen=True, eq=False)
class Skybox:
    """Equirectangular radiance map with a proper-rotation orientation."""

    map: np.ndarray
    orientation: np.ndarray = field(default_factory=lambda: np.eye(3))

    def __post_init__(self):
        m = np.asarray(self.map, dtype=np.float64)
        if m.ndim != 3 or m.shape[2] != 3 or m.shape[1] < 8 or m.shape[0] < 4:
            raise ParameterError("skybox map must be (H>=4, W>=8, 3)")
        rot = np.asarray(self.orientation, dtype=np.float64)
        if not is_rotation(rot, tol=1e-9):
            raise ParameterError("skybox orientation must be a proper rotation")
        object.__setattr__(self, "map", _read_only(m))
        object.__setattr__(self, "orientation", _read_only(rot))

    @cached_property
    def mean_radiance(self) -> np.ndarray:
        return self.map.reshape(-1, 3).mean(axis=0)

    @cached_property
    def map_digest(self) -> str:
        return hashlib.sha256(np.ascontiguousarray(self.map).tobytes()).hexdigest()


@dataclass(frozen=True, eq=False)
class SceneInstance:
    """One fully randomized scene, ready to render."""

    subject_pose: RigidTransform
    paint_index: int
    palette: tuple[Material, ...]
    sun: SunLight
    skybox: Skybox
    camera: PhysicalCamera
    seed: int
    domain_tag: str
    sensor_noise_std: float = 0.0

    def __post_init__(self):
        if not self.palette:
            raise ParameterError("palette must not be empty")
        if not 0 <= self.paint_index < len(self.palette):
            raise ParameterError("paint index outside palette")
        if self.domain_tag not in DOMAIN_TAGS:
            raise ParameterError(f"domain tag must be one of {DOMAIN_TAGS}")
        if self.sensor_noise_std < 0:
            raise ParameterError("sensor noise std must be non-negative")
        object.__setattr__(self, "palette", tuple(self.palette))

    @property
    def paint(self) -> Material:
        return self.palette[self.paint_index]

    def digest(self) -> str:
        """Hash of every attribute that affects rendered output."""
        h = hashlib.sha256()
        h.update(self.subject_pose.rotation.tobytes())
        h.update(self.subject_pose.translation.tobytes())
        h.update(self.paint_index.to_bytes(4, "little"))
        for m in self.palette:
            h.update(repr((m.kind, m.base_color, m.specular_reflectance, m.roughness, m.opacity)).encode())
        h.update(self.sun.direction.tobytes())
        h.update(self.sun.irradiance.tobytes())
        h.update(self.skybox.orientation.tobytes())
        h.update(self.skybox.map_digest.encode())
        cam = self.camera
        h.update(np.asarray([cam.focal_length, cam.sensor_width, cam.sensor_height]).tobytes())
        h.update(repr(cam.resolution).encode())
        h.update(cam.position.tobytes())
        h.update(cam.rotation.tobytes())
        h.update(int(self.seed).to_bytes(8, "little", signed=False))
        h.update(self.domain_tag.encode())
        h.update(np.float64(self.sensor_noise_std).tobytes())
        return h.hexdigest()
