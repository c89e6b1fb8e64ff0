"""Reader for a triangulated OBJ subset: v, vn, f, o/g records (ASCII).

Faces must be triangles and may use any of the index forms ``v``,
``v/vt``, ``v//vn``, ``v/vt/vn`` (texture indices are ignored).  Groups
named by ``o``/``g`` records become part groups; a ``group_map`` assigns
feature classes by group name.  Normals are taken from ``vn`` records
when every corner of a group provides one, otherwise generated as
area-weighted vertex normals.
"""

from __future__ import annotations

import numpy as np

from .errors import GroupMappingError, ObjParseError
from .meshes import BODY_METAL
from .scene import Mesh, PartGroup, SubjectModel, feature_class_by_name


def _parse_floats(parts, count, line_no, what):
    if len(parts) != count:
        raise ObjParseError(f"{what} record needs {count} values", line_no)
    try:
        return [float(p) for p in parts]
    except ValueError:
        raise ObjParseError(f"malformed {what} value", line_no) from None


def _parse_corner(token, n_verts, n_norms, line_no):
    fields = token.split("/")
    if len(fields) > 3 or not fields[0]:
        raise ObjParseError(f"malformed face corner {token!r}", line_no)
    try:
        v = int(fields[0])
        vn = int(fields[2]) if len(fields) == 3 and fields[2] else None
    except ValueError:
        raise ObjParseError(f"malformed face corner {token!r}", line_no) from None
    if v <= 0 or v > n_verts:
        raise ObjParseError(f"vertex index {v} out of range (indices are 1-based)", line_no)
    if vn is not None and (vn <= 0 or vn > n_norms):
        raise ObjParseError(f"normal index {vn} out of range", line_no)
    return v - 1, None if vn is None else vn - 1


def _group_mesh(vertices, normals, faces) -> Mesh:
    """Build a group-local mesh; corners with distinct normals split vertices."""
    have_all_normals = all(vn is not None for face in faces for _, vn in face)
    remap: dict[tuple[int, int | None], int] = {}
    verts, norms, tris = [], [], []
    for face in faces:
        tri = []
        for v, vn in face:
            key = (v, vn if have_all_normals else None)
            if key not in remap:
                remap[key] = len(verts)
                verts.append(vertices[v])
                norms.append(normals[vn] if have_all_normals else None)
            tri.append(remap[key])
        tris.append(tri)
    verts = np.asarray(verts, dtype=np.float64)
    tris = np.asarray(tris, dtype=np.int32)
    if have_all_normals:
        out = np.asarray(norms, dtype=np.float64)
        lengths = np.linalg.norm(out, axis=1, keepdims=True)
        lengths[lengths == 0] = 1.0
        out = out / lengths
    else:
        out = np.zeros_like(verts)
        for a, b, c in tris:
            fn = np.cross(verts[b] - verts[a], verts[c] - verts[a])  # area-weighted
            out[a] += fn
            out[b] += fn
            out[c] += fn
        lengths = np.linalg.norm(out, axis=1, keepdims=True)
        lengths[lengths == 0] = 1.0
        out = out / lengths
    return Mesh(verts, tris, out)


def load_obj_subject(path, group_map: dict[str, str] | None = None,
                     paintable_groups: set[str] | None = None) -> SubjectModel:
    """Load an OBJ file as a subject; ``group_map`` maps group name -> feature class name."""
    group_map = dict(group_map or {})
    vertices: list[np.ndarray] = []
    normals: list[np.ndarray] = []
    group_faces: dict[str, list] = {}
    order: list[str] = []
    current = "default"

    with open(path, "r", encoding="utf-8") as fh:
        for line_no, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split()
            rec, rest = parts[0], parts[1:]
            if rec == "v":
                vertices.append(np.asarray(_parse_floats(rest, 3, line_no, "vertex")))
            elif rec == "vn":
                normals.append(np.asarray(_parse_floats(rest, 3, line_no, "normal")))
            elif rec in ("o", "g"):
                current = rest[0] if rest else "default"
            elif rec == "f":
                if len(rest) != 3:
                    raise ObjParseError("faces must be triangles", line_no)
                face = [_parse_corner(tok, len(vertices), len(normals), line_no) for tok in rest]
                if current not in group_faces:
                    group_faces[current] = []
                    order.append(current)
                group_faces[current].append(face)
            elif rec in ("vt", "s", "mtllib", "usemtl"):
                continue
            else:
                raise ObjParseError(f"unsupported record {rec!r}", line_no)

    if not group_faces:
        raise ObjParseError("no faces found", line_no if vertices else 0)
    missing = set(group_map) - set(order)
    if missing:
        raise GroupMappingError(f"group_map names missing from file: {sorted(missing)}")

    groups, paint = [], []
    for name in order:
        cls = feature_class_by_name(group_map[name]) if name in group_map else None
        mesh = _group_mesh(vertices, normals, group_faces[name])
        groups.append(PartGroup(name, (mesh,), cls, BODY_METAL))
        paint.append(True if paintable_groups is None else name in paintable_groups)
    return SubjectModel.build(groups, paint)
