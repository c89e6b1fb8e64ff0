"""PNG reading and writing for beauty images and binary masks.

Beauty images are 8-bit sRGB PNG; masks are 8-bit grayscale PNG holding
only the values {0, 255}.  File naming follows
``frame_{index:06}.png`` / ``frame_{index:06}_mask_{class_slug}.png``.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np
from PIL import Image

from .errors import DataError


def frame_image_name(index: int) -> str:
    return f"frame_{index:06}.png"


def frame_mask_name(index: int, class_slug: str) -> str:
    return f"frame_{index:06}_mask_{class_slug}.png"


def save_beauty_png(pixels: np.ndarray, path) -> None:
    Image.fromarray(pixels, mode="RGB").save(Path(path), format="PNG")


def save_mask_png(mask: np.ndarray, path) -> None:
    Image.fromarray(np.where(mask, 255, 0).astype(np.uint8), mode="L").save(Path(path), format="PNG")


def load_beauty_png(path) -> np.ndarray:
    with Image.open(Path(path)) as im:
        return np.asarray(im.convert("RGB"), dtype=np.uint8)


def load_mask_png(path) -> np.ndarray:
    with Image.open(Path(path)) as im:
        if im.mode != "L":
            raise DataError(f"mask {path} is not 8-bit grayscale")
        arr = np.asarray(im, dtype=np.uint8)
    bad = ~np.isin(arr, (0, 255))
    if bad.any():
        raise DataError(f"mask {path} holds values outside {{0, 255}}")
    return arr == 255
