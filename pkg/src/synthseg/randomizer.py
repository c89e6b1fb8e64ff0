"""Deterministic scene sampling from configured randomization ranges.

Each attribute draw is keyed by (master seed, frame index, attribute
tag) through the counter-based RNG, so a frame's sample is independent
of whether any other frame was drawn, and identical inputs always yield
an identical scene.  Two presets are built in: domain A ("synthetic":
vivid busy sky) and domain B ("pseudo-real": muted sky family, shifted
paint palette, sensor noise, slightly wider camera arc).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from . import rng
from .errors import ParameterError
from .geometry import RigidTransform, euler_xyz, look_at, rotation_y
from .scene import Material, PhysicalCamera, SceneInstance, Skybox, SunLight
from .sky import SKY_FAMILIES, busy_sky_map

Range = tuple[float, float]


def _check_range(r: Range, name: str, lo=None, hi=None) -> tuple[float, float]:
    a, b = float(r[0]), float(r[1])
    if a > b:
        raise ParameterError(f"{name} range has low > high: {r}")
    if lo is not None and a < lo or hi is not None and b > hi:
        raise ParameterError(f"{name} range {r} outside [{lo}, {hi}]")
    return (a, b)


@dataclass(frozen=True)
class CameraConfig:
    """Fixed intrinsics plus pose ranges; the camera orbits the subject."""

    focal_length: float = 35.0
    sensor_width: float = 36.0
    sensor_height: float = 24.0
    resolution: tuple[int, int] = (256, 256)
    distance_range: Range = (5.5, 9.0)
    azimuth_range: Range = (math.pi / 2 - 0.9, math.pi / 2 + 0.9)
    height_range: Range = (1.0, 2.2)
    target_height: float = 0.75

    def __post_init__(self):
        for name in ("focal_length", "sensor_width", "sensor_height"):
            if float(getattr(self, name)) <= 0:
                raise ParameterError(f"{name} must be positive")
        object.__setattr__(self, "resolution", tuple(int(v) for v in self.resolution))
        object.__setattr__(self, "distance_range", _check_range(self.distance_range, "camera distance", lo=0.0))
        object.__setattr__(self, "azimuth_range", _check_range(self.azimuth_range, "camera azimuth"))
        object.__setattr__(self, "height_range", _check_range(self.height_range, "camera height"))


@dataclass(frozen=True)
class SkyConfig:
    family: str = "vivid"
    width: int = 256
    height: int = 128
    seed: int = 11

    def __post_init__(self):
        if self.family not in SKY_FAMILIES:
            raise ParameterError(f"sky family must be one of {SKY_FAMILIES}")


@dataclass(frozen=True)
class RandomizationConfig:
    translation_ranges: tuple[Range, Range, Range] = ((-0.4, 0.4), (0.0, 0.0), (-0.4, 0.4))
    yaw_range: Range = (-0.35, 0.35)
    palette: tuple[Material, ...] = ()
    sun_azimuth_range: Range = (0.0, 2.0 * math.pi)
    sun_elevation_range: Range = (0.25, 1.25)
    sun_irradiance: tuple[float, float, float] = (3.2, 3.05, 2.85)
    sky_rotation_ranges: tuple[Range, Range, Range] = (
        (0.0, 2.0 * math.pi), (0.0, 2.0 * math.pi), (0.0, 2.0 * math.pi))
    sky: SkyConfig = field(default_factory=SkyConfig)
    camera: CameraConfig = field(default_factory=CameraConfig)
    domain_tag: str = "A"
    sensor_noise_std: float = 0.0

    def __post_init__(self):
        if not self.palette:
            raise ParameterError("paint palette must not be empty")
        object.__setattr__(self, "palette", tuple(self.palette))
        tr = tuple(_check_range(r, f"translation[{i}]") for i, r in enumerate(self.translation_ranges))
        object.__setattr__(self, "translation_ranges", tr)
        object.__setattr__(self, "yaw_range", _check_range(self.yaw_range, "yaw"))
        object.__setattr__(self, "sun_azimuth_range", _check_range(self.sun_azimuth_range, "sun azimuth"))
        object.__setattr__(self, "sun_elevation_range",
                           _check_range(self.sun_elevation_range, "sun elevation", lo=0.0, hi=math.pi / 2))
        sk = tuple(_check_range(r, f"sky rotation[{i}]") for i, r in enumerate(self.sky_rotation_ranges))
        object.__setattr__(self, "sky_rotation_ranges", sk)
        if self.domain_tag not in ("A", "B"):
            raise ParameterError("domain_tag must be 'A' or 'B'")
        if self.sensor_noise_std < 0:
            raise ParameterError("sensor_noise_std must be >= 0")


_PALETTE_A = (
    Material("painted-metal", (0.62, 0.06, 0.05), 0.45, 0.25),   # red
    Material("painted-metal", (0.05, 0.12, 0.45), 0.45, 0.25),   # blue
    Material("painted-metal", (0.70, 0.70, 0.72), 0.50, 0.20),   # silver
    Material("painted-metal", (0.04, 0.04, 0.05), 0.55, 0.15),   # black
    Material("painted-metal", (0.85, 0.85, 0.82), 0.40, 0.30),   # white
)

_PALETTE_B = (
    Material("painted-metal", (0.55, 0.25, 0.05), 0.40, 0.30),   # orange
    Material("painted-metal", (0.10, 0.30, 0.12), 0.40, 0.30),   # green
    Material("painted-metal", (0.35, 0.35, 0.38), 0.45, 0.25),   # gray
    Material("painted-metal", (0.30, 0.08, 0.25), 0.45, 0.25),   # plum
)


def preset(domain: str, resolution: tuple[int, int] = (256, 256)) -> RandomizationConfig:
    """Built-in randomization presets for domains A and B."""
    if domain == "A":
        return RandomizationConfig(
            palette=_PALETTE_A,
            sky=SkyConfig(family="vivid", seed=11),
            camera=CameraConfig(resolution=resolution),
            domain_tag="A")
    if domain == "B":
        return RandomizationConfig(
            palette=_PALETTE_B,
            sky=SkyConfig(family="muted", seed=23),
            camera=CameraConfig(resolution=resolution,
                                azimuth_range=(math.pi / 2 - 1.15, math.pi / 2 + 1.15)),
            domain_tag="B",
            sensor_noise_std=0.012)
    raise ParameterError(f"unknown preset domain {domain!r}")


def with_resolution(config: RandomizationConfig, resolution: tuple[int, int]) -> RandomizationConfig:
    return replace(config, camera=replace(config.camera, resolution=tuple(resolution)))


_sky_cache: dict[tuple, np.ndarray] = {}


def _cached_sky_map(sky: SkyConfig) -> np.ndarray:
    key = (sky.family, sky.width, sky.height, sky.seed)
    if key not in _sky_cache:
        m = busy_sky_map(sky.width, sky.height, sky.seed, sky.family)
        m.setflags(write=False)
        _sky_cache[key] = m
    return _sky_cache[key]


def _draw(config_range: Range, master_seed: int, frame_index: int, tag: str) -> float:
    return rng.uniform_in(config_range[0], config_range[1],
                          master_seed, frame_index, rng.tag_hash(tag))


def horizontal_side(config: RandomizationConfig, master_seed: int, frame_index: int) -> str:
    """Deterministic fair coin choosing which side of the subject is imaged."""
    return "left" if rng.fair_coin(master_seed, frame_index, rng.tag_hash("side")) else "right"


def frame_seed(master_seed: int, frame_index: int) -> int:
    return rng.fold(master_seed, frame_index, rng.tag_hash("frame.seed"))


def sample_scene(config: RandomizationConfig, master_seed: int, frame_index: int) -> SceneInstance:
    """Draw one fully randomized scene; a pure function of its arguments."""
    tx = _draw(config.translation_ranges[0], master_seed, frame_index, "pose.x")
    ty = _draw(config.translation_ranges[1], master_seed, frame_index, "pose.y")
    tz = _draw(config.translation_ranges[2], master_seed, frame_index, "pose.z")
    yaw = _draw(config.yaw_range, master_seed, frame_index, "pose.yaw")
    pose = RigidTransform(rotation_y(yaw), np.array([tx, ty, tz]))

    paint_index = rng.pick_index(len(config.palette), master_seed, frame_index, rng.tag_hash("paint"))

    sun_az = _draw(config.sun_azimuth_range, master_seed, frame_index, "sun.az")
    sun_el = _draw(config.sun_elevation_range, master_seed, frame_index, "sun.el")
    # direction light travels: downward from the sun position on the sky dome
    sun_dir = -np.array([math.cos(sun_el) * math.cos(sun_az),
                         math.sin(sun_el),
                         math.cos(sun_el) * math.sin(sun_az)])
    sun = SunLight(sun_dir, np.asarray(config.sun_irradiance, dtype=np.float64))

    rx = _draw(config.sky_rotation_ranges[0], master_seed, frame_index, "sky.rx")
    ry = _draw(config.sky_rotation_ranges[1], master_seed, frame_index, "sky.ry")
    rz = _draw(config.sky_rotation_ranges[2], master_seed, frame_index, "sky.rz")
    skybox = Skybox(_cached_sky_map(config.sky), euler_xyz(rx, ry, rz))

    cam_cfg = config.camera
    cam_az = _draw(cam_cfg.azimuth_range, master_seed, frame_index, "cam.az")
    cam_d = _draw(cam_cfg.distance_range, master_seed, frame_index, "cam.dist")
    cam_h = _draw(cam_cfg.height_range, master_seed, frame_index, "cam.h")
    target = np.array([tx, ty + cam_cfg.target_height, tz])
    cam_pos = target + np.array([cam_d * math.cos(cam_az), 0.0, cam_d * math.sin(cam_az)])
    cam_pos = cam_pos + np.array([0.0, cam_h - cam_cfg.target_height, 0.0])
    if horizontal_side(config, master_seed, frame_index) == "right":
        # mirror the camera across the subject's longitudinal plane
        local = pose.rotation.T @ (cam_pos - pose.translation)
        local[2] = -local[2]
        cam_pos = pose.rotation @ local + pose.translation
    camera = PhysicalCamera(
        focal_length=cam_cfg.focal_length, sensor_width=cam_cfg.sensor_width,
        sensor_height=cam_cfg.sensor_height, resolution=cam_cfg.resolution,
        position=cam_pos, rotation=look_at(cam_pos, target))

    return SceneInstance(
        subject_pose=pose, paint_index=paint_index, palette=config.palette,
        sun=sun, skybox=skybox, camera=camera,
        seed=frame_seed(master_seed, frame_index), domain_tag=config.domain_tag,
        sensor_noise_std=config.sensor_noise_std)
