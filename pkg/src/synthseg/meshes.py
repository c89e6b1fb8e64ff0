"""Mesh builders and the procedural vehicle-like subject.

The subject is a composite of axis-aligned slabs: body and cabin, two
door panels per side with window insets, a rear window, door handles, a
single side mirror, and two tail lights.  Labeled parts sit slightly
proud of the surfaces beneath them so the nearest hit wins, and the
mirror/tail lights live at the subject's extremes so camera ranges
modulate how often they are seen.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ParameterError
from .scene import Material, Mesh, PartGroup, SubjectModel, feature_class_by_name

GLASS = Material("glass", (0.25, 0.32, 0.38), specular_reflectance=0.08, roughness=0.05, opacity=0.4)
RUBBER = Material("rubber", (0.04, 0.04, 0.04), specular_reflectance=0.0, roughness=0.9)
DARK_PLASTIC = Material("plastic", (0.08, 0.08, 0.09), specular_reflectance=0.05, roughness=0.5)
RED_PLASTIC = Material("plastic", (0.75, 0.05, 0.05), specular_reflectance=0.1, roughness=0.3)
BODY_METAL = Material("painted-metal", (0.62, 0.62, 0.64), specular_reflectance=0.4, roughness=0.25)


def quad_mesh(origin, edge_u, edge_v, detail: int = 0) -> Mesh:
    """Planar grid spanning origin + s*edge_u + t*edge_v, normal along u x v."""
    n = detail + 1
    origin = np.asarray(origin, dtype=np.float64)
    eu = np.asarray(edge_u, dtype=np.float64)
    ev = np.asarray(edge_v, dtype=np.float64)
    s = np.linspace(0.0, 1.0, n + 1)
    verts = origin + s[None, :, None] * eu + s[:, None, None] * ev
    verts = verts.reshape(-1, 3)
    normal = np.cross(eu, ev)
    norm = np.linalg.norm(normal)
    if norm == 0:
        raise ParameterError("degenerate quad edges")
    normal = normal / norm
    tris = []
    for j in range(n):
        for i in range(n):
            a = j * (n + 1) + i
            b = a + 1
            c = a + (n + 1)
            d = c + 1
            tris.append((a, b, d))
            tris.append((a, d, c))
    normals = np.tile(normal, (len(verts), 1))
    return Mesh(verts, np.asarray(tris, dtype=np.int32), normals)


def box_mesh(lo, hi, detail: int = 0) -> Mesh:
    """Axis-aligned box with outward flat normals; faces get their own vertices."""
    lo = np.asarray(lo, dtype=np.float64)
    hi = np.asarray(hi, dtype=np.float64)
    if np.any(hi <= lo):
        raise ParameterError("box needs hi > lo on every axis")
    dx, dy, dz = hi - lo
    # origin, edge_u, edge_v chosen so u x v points outward
    faces = [
        ([lo[0], lo[1], hi[2]], [dx, 0, 0], [0, dy, 0]),   # +z
        ([hi[0], lo[1], lo[2]], [-dx, 0, 0], [0, dy, 0]),  # -z
        ([hi[0], lo[1], hi[2]], [0, 0, -dz], [0, dy, 0]),  # +x
        ([lo[0], lo[1], lo[2]], [0, 0, dz], [0, dy, 0]),   # -x
        ([lo[0], hi[1], hi[2]], [dx, 0, 0], [0, 0, -dz]),  # +y
        ([lo[0], lo[1], lo[2]], [dx, 0, 0], [0, 0, dz]),   # -y
    ]
    verts, tris, normals = [], [], []
    offset = 0
    for origin, eu, ev in faces:
        q = quad_mesh(origin, eu, ev, detail)
        verts.append(q.vertices)
        tris.append(q.triangles + offset)
        normals.append(q.normals)
        offset += len(q.vertices)
    return Mesh(np.concatenate(verts), np.concatenate(tris), np.concatenate(normals))


def uv_sphere(center, radius: float, segments: int = 24, rings: int = 16) -> Mesh:
    """Sphere with smooth (exact) normals, for shading fixtures."""
    if radius <= 0:
        raise ParameterError("radius must be positive")
    center = np.asarray(center, dtype=np.float64)
    verts, normals = [], []
    for j in range(rings + 1):
        theta = np.pi * j / rings
        for i in range(segments):
            phi = 2 * np.pi * i / segments
            n = np.array([np.sin(theta) * np.cos(phi), np.cos(theta), np.sin(theta) * np.sin(phi)])
            verts.append(center + radius * n)
            normals.append(n)
    tris = []
    for j in range(rings):
        for i in range(segments):
            a = j * segments + i
            b = j * segments + (i + 1) % segments
            c = a + segments
            d = b + segments
            if j > 0:
                tris.append((a, b, c))
            if j < rings - 1:
                tris.append((b, d, c))
    return Mesh(np.asarray(verts), np.asarray(tris, dtype=np.int32), np.asarray(normals))


@dataclass(frozen=True)
class VehicleParams:
    length: float = 4.4
    width: float = 1.8
    height: float = 1.5
    detail: int = 0

    def __post_init__(self):
        if self.length <= 0 or self.width <= 0 or self.height <= 0:
            raise ParameterError("vehicle dimensions must be positive")
        if self.detail < 0:
            raise ParameterError("detail level must be >= 0")


def build_procedural_subject(params: VehicleParams = VehicleParams()) -> SubjectModel:
    """Vehicle-like subject covering all 8 feature classes.

    The subject sits on y=0, centered in x/z, nose toward +x; the mirror is
    mounted only on the +z side.
    """
    L, W, H, d = params.length, params.width, params.height, params.detail
    t = 0.012 * W  # proudness of panels over the surface beneath

    def slab(x0, x1, y0, y1, z_at, out, depth=None):
        depth = t if depth is None else depth
        if out > 0:
            return box_mesh((x0, y0, z_at), (x1, y1, z_at + depth))
        return box_mesh((x0, y0, z_at - depth), (x1, y1, z_at))

    groups: list[PartGroup] = []
    paintable: list[bool] = []

    def add(name, meshes, cls=None, material=BODY_METAL, paint=False):
        fc = feature_class_by_name(cls) if cls else None
        groups.append(PartGroup(name, tuple(meshes), fc, material))
        paintable.append(paint)

    body = box_mesh((-L / 2, 0.18 * H, -W / 2), (L / 2, 0.62 * H, W / 2), d)
    cabin = box_mesh((-0.34 * L, 0.62 * H, -0.42 * W), (0.26 * L, H, 0.42 * W), d)
    add("body", [body], paint=True)
    add("cabin", [cabin], paint=True)

    for side, sign in (("right", -1.0), ("left", 1.0)):
        zs = sign * W / 2
        zc = sign * 0.42 * W
        add(f"front_door_{side}", [slab(0.01 * L, 0.30 * L, 0.20 * H, 0.60 * H, zs, sign)],
            "front door", paint=True)
        add(f"back_door_{side}", [slab(-0.30 * L, -0.01 * L, 0.20 * H, 0.60 * H, zs, sign)],
            "back door", paint=True)
        add(f"front_window_{side}", [slab(0.01 * L, 0.24 * L, 0.66 * H, 0.96 * H, zc, sign)],
            "front window", material=GLASS)
        add(f"back_window_{side}", [slab(-0.28 * L, -0.01 * L, 0.66 * H, 0.96 * H, zc, sign)],
            "back window", material=GLASS)

    handles = []
    for sign in (-1.0, 1.0):
        zh = sign * (W / 2 + t)
        handles.append(slab(0.225 * L, 0.285 * L, 0.50 * H, 0.545 * H, zh, sign))
        handles.append(slab(-0.085 * L, -0.025 * L, 0.50 * H, 0.545 * H, zh, sign))
    add("door_handles", handles, "door handle", material=DARK_PLASTIC)

    rear_glass = box_mesh((-0.34 * L - t, 0.66 * H, -0.30 * W), (-0.34 * L, 0.95 * H, 0.30 * W))
    add("rear_window", [rear_glass], "rear window", material=GLASS)

    mirror = box_mesh((0.20 * L, 0.60 * H, 0.42 * W + t), (0.26 * L, 0.68 * H, 0.42 * W + 0.12 * W))
    add("mirror", [mirror], "mirror", material=DARK_PLASTIC)

    tails = [
        box_mesh((-L / 2 - t, 0.44 * H, -0.46 * W), (-L / 2, 0.58 * H, -0.28 * W)),
        box_mesh((-L / 2 - t, 0.44 * H, 0.28 * W), (-L / 2, 0.58 * H, 0.46 * W)),
    ]
    add("tail_lights", tails, "tail light", material=RED_PLASTIC)

    wheels = []
    for wx in (0.32 * L, -0.32 * L):
        for wz in (-W / 2, W / 2 - 0.1 * W):
            wheels.append(box_mesh((wx - 0.08 * L, 0.0, wz), (wx + 0.08 * L, 0.30 * H, wz + 0.1 * W)))
    add("wheels", wheels, material=RUBBER)

    return SubjectModel.build(groups, paintable)
