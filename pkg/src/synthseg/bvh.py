"""BVH construction over a posed subject, plus a brute-force reference.

The tree is built once per scene over world-space triangles (median
split on the longest centroid axis, small leaves).  Zero-area triangles
are skipped at build time and reported in the build summary.  Nearest
queries through the tree return exactly the same (triangle, distance,
part group) as a linear scan over all triangles: both paths share the
intersection epsilons and resolve distance ties to the lowest triangle
index.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .errors import ParameterError
from .scene import SceneInstance, SubjectModel

_LEAF_SIZE = 4
_PAD = 1e-9


@dataclass(frozen=True)
class BuildSummary:
    triangle_count: int
    skipped_degenerate: int


@dataclass(frozen=True, eq=False)
class SceneGeometry:
    """Flattened world-space geometry with per-group shading attributes."""

    node_min: np.ndarray
    node_max: np.ndarray
    node_left: np.ndarray
    node_right: np.ndarray
    node_first: np.ndarray
    node_count: np.ndarray
    leaf_tris: np.ndarray
    tv0: np.ndarray
    te1: np.ndarray
    te2: np.ndarray
    tn0: np.ndarray
    tn1: np.ndarray
    tn2: np.ndarray
    tri_group: np.ndarray
    group_names: tuple[str, ...]
    group_class: np.ndarray
    group_albedo: np.ndarray
    group_spec: np.ndarray
    group_rough: np.ndarray
    group_opacity: np.ndarray
    group_kind: np.ndarray
    summary: BuildSummary

    @property
    def world_bounds(self) -> tuple[np.ndarray, np.ndarray]:
        return self.node_min[0].copy(), self.node_max[0].copy()

    def nearest(self, origin, direction):
        """Nearest hit through the BVH: (t, tri index, u, v); index -1 on miss."""
        o = np.asarray(origin, dtype=np.float64)
        d = np.asarray(direction, dtype=np.float64)
        return _kernels.bvh_nearest(
            o[0], o[1], o[2], d[0], d[1], d[2],
            self.node_min, self.node_max, self.node_left, self.node_right,
            self.node_first, self.node_count, self.leaf_tris,
            self.tv0, self.te1, self.te2)

    def nearest_brute_force(self, origin, direction):
        """Linear-scan nearest hit with identical epsilons and tie rule."""
        o = np.asarray(origin, dtype=np.float64)
        d = np.asarray(direction, dtype=np.float64)
        e1, e2, v0 = self.te1, self.te2, self.tv0
        pv = np.empty_like(e2)
        pv[:, 0] = d[1] * e2[:, 2] - d[2] * e2[:, 1]
        pv[:, 1] = d[2] * e2[:, 0] - d[0] * e2[:, 2]
        pv[:, 2] = d[0] * e2[:, 1] - d[1] * e2[:, 0]
        det = np.einsum("ij,ij->i", e1, pv)
        with np.errstate(divide="ignore", invalid="ignore"):
            inv = 1.0 / det
            tv = o - v0
            u = np.einsum("ij,ij->i", tv, pv) * inv
            qv = np.cross(tv, e1)
            v = (d[0] * qv[:, 0] + d[1] * qv[:, 1] + d[2] * qv[:, 2]) * inv
            t = np.einsum("ij,ij->i", e2, qv) * inv
        ok = (np.abs(det) >= _kernels.DET_EPS) & (u >= 0.0) & (u <= 1.0) \
            & (v >= 0.0) & (u + v <= 1.0) & (t > _kernels.TMIN)
        if not ok.any():
            return -1.0, -1, 0.0, 0.0
        idx = np.flatnonzero(ok)
        tbest = t[idx].min()
        i = int(idx[t[idx] == tbest].min())
        return float(t[i]), i, float(u[i]), float(v[i])

    def group_id(self, name: str) -> int:
        return self.group_names.index(name)


def _resolve_materials(subject: SubjectModel, scene: SceneInstance):
    groups = subject.part_groups
    n = len(groups)
    albedo = np.zeros((n, 3))
    spec = np.zeros(n)
    rough = np.zeros(n)
    opacity = np.zeros(n)
    kind = np.zeros(n, dtype=np.int32)
    cls = np.full(n, -1, dtype=np.int32)
    for g, group in enumerate(groups):
        mat = scene.paint if subject.paintable[g] else group.material
        albedo[g] = mat.base_color
        spec[g] = mat.specular_reflectance
        rough[g] = mat.roughness
        opacity[g] = mat.opacity
        kind[g] = mat.kind_code
        if group.feature_class is not None:
            cls[g] = group.feature_class.id
    return albedo, spec, rough, opacity, kind, cls


def build_bvh(subject: SubjectModel, scene: SceneInstance) -> SceneGeometry:
    """Flatten the posed subject into world space and build the BVH."""
    if not subject.part_groups:
        raise ParameterError("subject has no part groups")
    pose = scene.subject_pose
    v0s, e1s, e2s, n0s, n1s, n2s, gids = [], [], [], [], [], [], []
    for g, group in enumerate(subject.part_groups):
        for mesh in group.meshes:
            verts = pose.apply_points(mesh.vertices)
            norms = pose.apply_vectors(mesh.normals)
            tris = mesh.triangles
            a, b, c = verts[tris[:, 0]], verts[tris[:, 1]], verts[tris[:, 2]]
            v0s.append(a)
            e1s.append(b - a)
            e2s.append(c - a)
            n0s.append(norms[tris[:, 0]])
            n1s.append(norms[tris[:, 1]])
            n2s.append(norms[tris[:, 2]])
            gids.append(np.full(len(tris), g, dtype=np.int32))
    v0 = np.concatenate(v0s)
    e1 = np.concatenate(e1s)
    e2 = np.concatenate(e2s)
    n0 = np.concatenate(n0s)
    n1 = np.concatenate(n1s)
    n2 = np.concatenate(n2s)
    gid = np.concatenate(gids)

    cross = np.cross(e1, e2)
    area2 = np.linalg.norm(cross, axis=1)
    diag = float(np.linalg.norm(v0.max(axis=0) - v0.min(axis=0))) or 1.0
    keep = area2 > 1e-12 * diag * diag
    skipped = int((~keep).sum())
    if not keep.any():
        raise ParameterError("all triangles are degenerate")
    v0, e1, e2, n0, n1, n2, gid = (a[keep] for a in (v0, e1, e2, n0, n1, n2, gid))

    tri_min = np.minimum(np.minimum(v0, v0 + e1), v0 + e2)
    tri_max = np.maximum(np.maximum(v0, v0 + e1), v0 + e2)
    cent = (tri_min + tri_max) * 0.5

    nmin, nmax, nleft, nright, nfirst, ncount = [], [], [], [], [], []
    leaf_tris: list[int] = []

    def emit(indices: np.ndarray) -> int:
        node = len(nmin)
        nmin.append(tri_min[indices].min(axis=0) - _PAD)
        nmax.append(tri_max[indices].max(axis=0) + _PAD)
        nleft.append(-1)
        nright.append(-1)
        nfirst.append(-1)
        ncount.append(0)
        extent = cent[indices].max(axis=0) - cent[indices].min(axis=0)
        if len(indices) <= _LEAF_SIZE or float(extent.max()) == 0.0:
            nfirst[node] = len(leaf_tris)
            ncount[node] = len(indices)
            leaf_tris.extend(int(i) for i in indices)
            return node
        axis = int(np.argmax(extent))
        order = indices[np.argsort(cent[indices, axis], kind="stable")]
        mid = len(order) // 2
        nleft[node] = emit(order[:mid])
        nright[node] = emit(order[mid:])
        return node

    emit(np.arange(len(v0)))  # median split: depth is O(log n)

    albedo, spec, rough, opacity, kind, cls = _resolve_materials(subject, scene)
    contig = lambda a, dt: np.ascontiguousarray(np.asarray(a, dtype=dt))
    return SceneGeometry(
        node_min=contig(nmin, np.float64), node_max=contig(nmax, np.float64),
        node_left=contig(nleft, np.int32), node_right=contig(nright, np.int32),
        node_first=contig(nfirst, np.int32), node_count=contig(ncount, np.int32),
        leaf_tris=contig(leaf_tris, np.int32),
        tv0=contig(v0, np.float64), te1=contig(e1, np.float64), te2=contig(e2, np.float64),
        tn0=contig(n0, np.float64), tn1=contig(n1, np.float64), tn2=contig(n2, np.float64),
        tri_group=contig(gid, np.int32),
        group_names=tuple(g.name for g in subject.part_groups),
        group_class=contig(cls, np.int32),
        group_albedo=contig(albedo, np.float64), group_spec=contig(spec, np.float64),
        group_rough=contig(rough, np.float64), group_opacity=contig(opacity, np.float64),
        group_kind=contig(kind, np.int32),
        summary=BuildSummary(int(len(v0)), skipped))
