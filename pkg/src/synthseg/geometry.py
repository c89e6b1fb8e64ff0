"""Small 3D math utilities: rotations, camera frames, rigid transforms."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ParameterError


def normalize(v) -> np.ndarray:
    v = np.asarray(v, dtype=np.float64)
    n = float(np.linalg.norm(v))
    if n == 0.0:
        raise ParameterError("cannot normalize a zero vector")
    return v / n


def rotation_x(a: float) -> np.ndarray:
    c, s = np.cos(a), np.sin(a)
    return np.array([[1, 0, 0], [0, c, -s], [0, s, c]], dtype=np.float64)


def rotation_y(a: float) -> np.ndarray:
    c, s = np.cos(a), np.sin(a)
    return np.array([[c, 0, s], [0, 1, 0], [-s, 0, c]], dtype=np.float64)


def rotation_z(a: float) -> np.ndarray:
    c, s = np.cos(a), np.sin(a)
    return np.array([[c, -s, 0], [s, c, 0], [0, 0, 1]], dtype=np.float64)


def euler_xyz(rx: float, ry: float, rz: float) -> np.ndarray:
    """Rotation applied about x first, then y, then z."""
    return rotation_z(rz) @ rotation_y(ry) @ rotation_x(rx)


def is_rotation(m: np.ndarray, tol: float = 1e-9) -> bool:
    m = np.asarray(m, dtype=np.float64)
    if m.shape != (3, 3):
        return False
    if not np.allclose(m.T @ m, np.eye(3), atol=tol):
        return False
    return abs(float(np.linalg.det(m)) - 1.0) <= tol


def look_at(eye, target, up=(0.0, 1.0, 0.0)) -> np.ndarray:
    """World-from-camera rotation with columns (right, up, forward).

    Camera space is right-handed: +x right, +y up, +z forward.
    """
    eye = np.asarray(eye, dtype=np.float64)
    target = np.asarray(target, dtype=np.float64)
    forward = normalize(target - eye)
    up = np.asarray(up, dtype=np.float64)
    if abs(float(np.dot(forward, normalize(up)))) > 0.999999:
        up = np.array([1.0, 0.0, 0.0])
    right = normalize(np.cross(up, forward))
    cam_up = np.cross(forward, right)
    return np.column_stack([right, cam_up, forward])


def reflect(d: np.ndarray, n: np.ndarray) -> np.ndarray:
    return d - 2.0 * float(np.dot(d, n)) * n


def aabb_of(points: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    pts = np.asarray(points, dtype=np.float64).reshape(-1, 3)
    return pts.min(axis=0), pts.max(axis=0)


def _frozen(a, shape, name) -> np.ndarray:
    arr = np.asarray(a, dtype=np.float64)
    if arr.shape != shape:
        raise ParameterError(f"{name} must have shape {shape}, got {arr.shape}")
    arr = arr.copy()
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class RigidTransform:
    """Proper rotation plus translation."""

    rotation: np.ndarray = field(default_factory=lambda: np.eye(3))
    translation: np.ndarray = field(default_factory=lambda: np.zeros(3))

    def __post_init__(self):
        rot = _frozen(self.rotation, (3, 3), "rotation")
        if not is_rotation(rot):
            raise ParameterError("rotation must be proper (R^T R = I, det +1)")
        object.__setattr__(self, "rotation", rot)
        object.__setattr__(self, "translation", _frozen(self.translation, (3,), "translation"))

    def apply_points(self, pts: np.ndarray) -> np.ndarray:
        return np.asarray(pts, dtype=np.float64) @ self.rotation.T + self.translation

    def apply_vectors(self, vecs: np.ndarray) -> np.ndarray:
        return np.asarray(vecs, dtype=np.float64) @ self.rotation.T

    @staticmethod
    def identity() -> "RigidTransform":
        return RigidTransform()
