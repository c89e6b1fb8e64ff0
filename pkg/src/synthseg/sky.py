"""Procedural environment maps and equirectangular sampling.

The default background is a deliberately busy high-frequency value-noise
map; two families are provided ("vivid" and "muted") so the two domain
presets get visibly different backgrounds and reflections.  Maps are a
pure function of (family, seed, size).  ``sample_sky`` mirrors the
renderer kernel's bilinear lookup operation for operation so numpy-side
predictions agree with rendered pixels bit for bit.
"""

from __future__ import annotations

import numpy as np

from . import rng
from .errors import ParameterError
from .scene import Skybox

SKY_FAMILIES = ("vivid", "muted")

_FAMILY_OCTAVES = {"vivid": 6, "muted": 5}


def _lattice_values(seed: int, channel: str, octave: int, ix: np.ndarray, iy: np.ndarray) -> np.ndarray:
    base = rng.fold(seed, rng.tag_hash("sky." + channel), octave)
    keys = rng._mix64_v(rng._mix64_v(np.uint64(base) ^ ix.astype(np.uint64)) ^ iy.astype(np.uint64))
    return (keys >> np.uint64(11)).astype(np.float64) * 2.0**-53


def _value_noise(seed: int, channel: str, u: np.ndarray, v: np.ndarray, octaves: int) -> np.ndarray:
    total = np.zeros_like(u)
    amp_sum = 0.0
    for o in range(octaves):
        fx = 4 * (1 << o)
        fy = 2 * (1 << o)
        x = u * fx
        y = v * fy
        x0 = np.floor(x).astype(np.int64)
        y0 = np.floor(y).astype(np.int64)
        ax = x - x0
        ay = y - y0
        ax = ax * ax * (3.0 - 2.0 * ax)
        ay = ay * ay * (3.0 - 2.0 * ay)
        x0w = x0 % fx
        x1w = (x0 + 1) % fx
        y0c = np.clip(y0, 0, fy)
        y1c = np.clip(y0 + 1, 0, fy)
        c00 = _lattice_values(seed, channel, o, x0w, y0c)
        c10 = _lattice_values(seed, channel, o, x1w, y0c)
        c01 = _lattice_values(seed, channel, o, x0w, y1c)
        c11 = _lattice_values(seed, channel, o, x1w, y1c)
        val = (c00 * (1 - ax) * (1 - ay) + c10 * ax * (1 - ay)
               + c01 * (1 - ax) * ay + c11 * ax * ay)
        amp = 0.55**o
        total += amp * val
        amp_sum += amp
    return total / amp_sum


def _hsv_to_rgb(h, s, v):
    h6 = (h % 1.0) * 6.0
    i = np.floor(h6)
    f = h6 - i
    p = v * (1 - s)
    q = v * (1 - s * f)
    t = v * (1 - s * (1 - f))
    i = i.astype(np.int64) % 6
    r = np.choose(i, [v, q, p, p, t, v])
    g = np.choose(i, [t, v, v, q, p, p])
    b = np.choose(i, [p, p, t, v, v, q])
    return np.stack([r, g, b], axis=-1)


def busy_sky_map(width: int = 256, height: int = 128, seed: int = 0,
                 family: str = "vivid") -> np.ndarray:
    """Generate an equirectangular HDR radiance map, values roughly [0, 1.8]."""
    if family not in SKY_FAMILIES:
        raise ParameterError(f"unknown sky family {family!r}")
    if width < 8 or height < 4:
        raise ParameterError("sky map must be at least 8x4")
    u = (np.arange(width) + 0.5) / width
    v = (np.arange(height) + 0.5) / height
    uu, vv = np.meshgrid(u, v)
    octaves = _FAMILY_OCTAVES[family]
    lum = _value_noise(seed, "lum", uu, vv, octaves)
    hue = _value_noise(seed, "hue", uu, vv, max(octaves - 2, 2))
    if family == "vivid":
        rgb = _hsv_to_rgb(hue, 0.55 + 0.35 * lum, 0.15 + 1.45 * lum)
    else:
        base = np.stack([0.30 + 0.06 * hue, 0.33 + 0.04 * hue, 0.38 + 0.03 * hue], axis=-1)
        rgb = base * (0.25 + 1.35 * lum)[..., None]
    # brighten toward the upper hemisphere so sky reads as sky
    tilt = (1.15 - 0.5 * vv)[..., None]
    return rgb * tilt


def sample_sky(skybox: Skybox, directions: np.ndarray) -> np.ndarray:
    """Bilinear equirectangular lookup; mirrors the render kernel exactly."""
    d = np.asarray(directions, dtype=np.float64)
    flat = d.reshape(-1, 3)
    rot = skybox.orientation
    sx = rot[0, 0] * flat[:, 0] + rot[1, 0] * flat[:, 1] + rot[2, 0] * flat[:, 2]
    sy = rot[0, 1] * flat[:, 0] + rot[1, 1] * flat[:, 1] + rot[2, 1] * flat[:, 2]
    sz = rot[0, 2] * flat[:, 0] + rot[1, 2] * flat[:, 1] + rot[2, 2] * flat[:, 2]
    sy = np.clip(sy, -1.0, 1.0)
    m = skybox.map
    H, W = m.shape[0], m.shape[1]
    u = (np.arctan2(sz, sx) + np.pi) / (2.0 * np.pi)
    v = np.arccos(sy) / np.pi
    fx = u * W - 0.5
    fy = v * H - 0.5
    x0 = np.floor(fx).astype(np.int64)
    y0 = np.floor(fy).astype(np.int64)
    ax = (fx - x0)[:, None]
    ay = (fy - y0)[:, None]
    x0i = x0 % W
    x1i = (x0 + 1) % W
    y0i = np.clip(y0, 0, H - 1)
    y1i = np.clip(y0 + 1, 0, H - 1)
    out = ((1.0 - ax) * (1.0 - ay) * m[y0i, x0i] + ax * (1.0 - ay) * m[y0i, x1i]
           + (1.0 - ax) * ay * m[y1i, x0i] + ax * ay * m[y1i, x1i])
    return out.reshape(d.shape)
