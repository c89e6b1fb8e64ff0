"""Ray-traced beauty pass and multi-pass one-hot mask labeling.

Masks can be produced two ways that must agree pixel for pixel:

* ``per-class-pass`` re-renders the subject once per feature class with
  an unlit white/black recolor at 1 sample per pixel, no tone mapping,
  and a 0.5 threshold to binary;
* ``id-buffer`` casts one primary ray per pixel and writes the nearest
  hit's class directly.

Both preserve occlusion: a pixel belongs to class c iff the nearest hit
is a part group of class c.  All passes are tile-parallel over a
read-only scene and bit-identical for any worker count, including 1.
"""

from __future__ import annotations

import hashlib
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import _kernels, rng
from .bvh import SceneGeometry, build_bvh
from .errors import ParameterError
from .scene import FeatureClass, SceneInstance, SubjectModel, default_feature_classes

MASK_MODES = ("per-class-pass", "id-buffer")

# ambient irradiance approximation: this fraction of the sky's mean radiance
AMBIENT_SCALE = 0.55


@dataclass(frozen=True)
class RenderSettings:
    samples_per_pixel: int = 1
    max_reflection_depth: int = 2
    exposure: float = 1.0
    gamma: float = 2.2
    tile_size: int = 64

    def __post_init__(self):
        if self.samples_per_pixel < 1:
            raise ParameterError("samples_per_pixel must be >= 1")
        if self.max_reflection_depth < 1:
            raise ParameterError("max_reflection_depth must be >= 1")
        if self.tile_size < 8:
            raise ParameterError("tile_size must be >= 8")
        if self.exposure <= 0 or self.gamma <= 0:
            raise ParameterError("exposure and gamma must be positive")


@dataclass(frozen=True, eq=False)
class BeautyImage:
    pixels: np.ndarray  # (H, W, 3) uint8, sRGB

    def __post_init__(self):
        p = np.asarray(self.pixels)
        if p.ndim != 3 or p.shape[2] != 3 or p.dtype != np.uint8:
            raise ParameterError("beauty image must be (H, W, 3) uint8")
        object.__setattr__(self, "pixels", p)

    @property
    def width(self) -> int:
        return int(self.pixels.shape[1])

    @property
    def height(self) -> int:
        return int(self.pixels.shape[0])

    def digest(self) -> str:
        return hashlib.sha256(np.ascontiguousarray(self.pixels).tobytes()).hexdigest()


@dataclass(frozen=True, eq=False)
class ClassMask:
    feature_class: FeatureClass
    pixels: np.ndarray  # (H, W) bool

    def __post_init__(self):
        p = np.asarray(self.pixels)
        if p.ndim != 2 or p.dtype != np.bool_:
            raise ParameterError("class mask must be (H, W) bool")
        object.__setattr__(self, "pixels", p)

    @property
    def width(self) -> int:
        return int(self.pixels.shape[1])

    @property
    def height(self) -> int:
        return int(self.pixels.shape[0])

    @property
    def present(self) -> bool:
        return bool(self.pixels.any())


@dataclass(frozen=True)
class FrameProvenance:
    frame_index: int
    seed: int
    scene_digest: str
    config_digest: str
    domain_tag: str
    presence: dict[str, bool]


@dataclass(frozen=True, eq=False)
class LabeledFrame:
    beauty: BeautyImage
    masks: tuple[ClassMask, ...]
    provenance: FrameProvenance


def _tiles(width: int, height: int, tile_size: int):
    out = []
    for y0 in range(0, height, tile_size):
        for x0 in range(0, width, tile_size):
            out.append((x0, y0, min(x0 + tile_size, width), min(y0 + tile_size, height)))
    return out


def _run_tiles(fn, tiles, workers: int):
    if workers <= 1:
        for t in tiles:
            fn(t)
        return
    with ThreadPoolExecutor(max_workers=workers) as pool:
        list(pool.map(fn, tiles))


def _camera_args(scene: SceneInstance):
    cam = scene.camera
    w, h = cam.resolution
    return (w, h, float(cam.focal_length), float(cam.sensor_width), float(cam.sensor_height),
            np.ascontiguousarray(cam.position), np.ascontiguousarray(cam.rotation))


def _bvh_args(geom: SceneGeometry):
    return (geom.node_min, geom.node_max, geom.node_left, geom.node_right,
            geom.node_first, geom.node_count, geom.leaf_tris,
            geom.tv0, geom.te1, geom.te2)


def tone_map(hdr: np.ndarray, settings: RenderSettings, scene: SceneInstance | None = None) -> np.ndarray:
    """Exposure multiply, optional sensor noise, then gamma to 8-bit."""
    exposed = hdr * settings.exposure
    if scene is not None and scene.sensor_noise_std > 0:
        n = rng.gaussians(np.arange(exposed.size), scene.seed, rng.tag_hash("sensor.noise"))
        exposed = exposed + scene.sensor_noise_std * n.reshape(exposed.shape)
    x = np.clip(exposed, 0.0, None) ** (1.0 / settings.gamma)
    x = np.clip(x, 0.0, 1.0)
    return np.floor(x * 255.0 + 0.5).astype(np.uint8)


def render_beauty(scene: SceneInstance, subject: SubjectModel, settings: RenderSettings,
                  workers: int = 1, geometry: SceneGeometry | None = None) -> BeautyImage:
    """Render the fully shaded pass; misses show the oriented skybox."""
    geom = geometry if geometry is not None else build_bvh(subject, scene)
    w, h, f, sw, sh, cam_pos, cam_rot = _camera_args(scene)
    hdr = np.zeros((h, w, 3), dtype=np.float64)
    ambient = np.ascontiguousarray(AMBIENT_SCALE * scene.skybox.mean_radiance)
    sun_dir = np.ascontiguousarray(scene.sun.direction)
    sun_irr = np.ascontiguousarray(scene.sun.irradiance)
    sky_map = np.ascontiguousarray(scene.skybox.map)
    sky_rot = np.ascontiguousarray(scene.skybox.orientation)

    def tile(box):
        x0, y0, x1, y1 = box
        _kernels.render_tile_beauty(
            hdr, x0, y0, x1, y1, w, h, f, sw, sh, cam_pos, cam_rot,
            *_bvh_args(geom), geom.tn0, geom.tn1, geom.tn2, geom.tri_group,
            geom.group_albedo, geom.group_spec, geom.group_rough,
            geom.group_opacity, geom.group_kind,
            sun_dir, sun_irr, sky_map, sky_rot, ambient,
            settings.samples_per_pixel, settings.max_reflection_depth,
            np.uint64(scene.seed & (2**64 - 1)))

    _run_tiles(tile, _tiles(w, h, settings.tile_size), workers)
    return BeautyImage(tone_map(hdr, settings, scene))


def render_id_buffer(scene: SceneInstance, subject: SubjectModel, settings: RenderSettings,
                     workers: int = 1, geometry: SceneGeometry | None = None) -> np.ndarray:
    """Part-group id of the nearest hit per pixel; -1 where the subject is missed."""
    geom = geometry if geometry is not None else build_bvh(subject, scene)
    w, h, f, sw, sh, cam_pos, cam_rot = _camera_args(scene)
    ids = np.full((h, w), -1, dtype=np.int32)

    def tile(box):
        x0, y0, x1, y1 = box
        _kernels.render_tile_ids(ids, x0, y0, x1, y1, w, h, f, sw, sh, cam_pos, cam_rot,
                                 *_bvh_args(geom), geom.tri_group)

    _run_tiles(tile, _tiles(w, h, settings.tile_size), workers)
    return ids


def render_class_masks(scene: SceneInstance, subject: SubjectModel, settings: RenderSettings,
                       mode: str = "per-class-pass", workers: int = 1,
                       geometry: SceneGeometry | None = None) -> list[ClassMask]:
    """One binary mask per feature class, in class-id order."""
    if mode not in MASK_MODES:
        raise ParameterError(f"unknown mask mode {mode!r}; expected one of {MASK_MODES}")
    geom = geometry if geometry is not None else build_bvh(subject, scene)
    classes = default_feature_classes()
    w, h, f, sw, sh, cam_pos, cam_rot = _camera_args(scene)

    if mode == "id-buffer":
        ids = render_id_buffer(scene, subject, settings, workers=workers, geometry=geom)
        hit = ids >= 0
        class_img = np.full((h, w), -1, dtype=np.int32)
        class_img[hit] = geom.group_class[ids[hit]]
        return [ClassMask(c, class_img == c.id) for c in classes]

    masks = []
    for c in classes:
        white = (geom.group_class == c.id).astype(np.uint8)
        shade = np.zeros((h, w), dtype=np.float64)

        def tile(box, white=white, shade=shade):
            x0, y0, x1, y1 = box
            _kernels.render_tile_unlit(shade, x0, y0, x1, y1, w, h, f, sw, sh,
                                       cam_pos, cam_rot, *_bvh_args(geom),
                                       geom.tri_group, white)

        _run_tiles(tile, _tiles(w, h, settings.tile_size), workers)
        masks.append(ClassMask(c, shade >= 0.5))
    return masks


def render_labeled_frame(scene: SceneInstance, subject: SubjectModel, settings: RenderSettings,
                         mask_mode: str = "per-class-pass", workers: int = 1,
                         frame_index: int = 0, config_digest: str = "") -> LabeledFrame:
    """Beauty plus the 8 class masks plus a provenance record."""
    geom = build_bvh(subject, scene)
    beauty = render_beauty(scene, subject, settings, workers=workers, geometry=geom)
    masks = render_class_masks(scene, subject, settings, mode=mask_mode,
                               workers=workers, geometry=geom)
    presence = {m.feature_class.slug: m.present for m in masks}
    prov = FrameProvenance(frame_index=frame_index, seed=scene.seed,
                           scene_digest=scene.digest(), config_digest=config_digest,
                           domain_tag=scene.domain_tag, presence=presence)
    return LabeledFrame(beauty, tuple(masks), prov)
