"""Numba kernels: BVH traversal, shading, and mask passes.

Every kernel is a pure function of its inputs and writes only to the
tile region it is handed, so output is identical for any tile schedule
or thread count.  All math is float64 without fastmath, and the camera
ray / sky lookup formulas mirror the numpy reference paths in scene.py
and sky.py operation for operation.
"""

from __future__ import annotations

import math

import numpy as np
from numba import njit

TMIN = 1e-7
OFFSET_EPS = 1e-5
DET_EPS = 1e-12

KIND_MATTE = 0
KIND_PAINTED_METAL = 1
KIND_GLASS = 2
KIND_RUBBER = 3
KIND_PLASTIC = 4

_U64_GAMMA = np.uint64(0x9E3779B97F4A7C15)
_U64_MIX1 = np.uint64(0xBF58476D1CE4E5B9)
_U64_MIX2 = np.uint64(0x94D049BB133111EB)
_TO_UNIT = 2.0**-53


@njit(cache=True, nogil=True, inline="always")
def _mix64(x):
    x = x + _U64_GAMMA
    x = (x ^ (x >> np.uint64(30))) * _U64_MIX1
    x = (x ^ (x >> np.uint64(27))) * _U64_MIX2
    return x ^ (x >> np.uint64(31))


@njit(cache=True, nogil=True, inline="always")
def _unit_float4(a, b, c, d):
    key = _mix64(np.uint64(0) ^ np.uint64(a))
    key = _mix64(key ^ np.uint64(b))
    key = _mix64(key ^ np.uint64(c))
    key = _mix64(key ^ np.uint64(d))
    return float(key >> np.uint64(11)) * _TO_UNIT


@njit(cache=True, nogil=True, inline="always")
def _tri_hit(i, ox, oy, oz, dx, dy, dz, tv0, te1, te2, tmin):
    e1x, e1y, e1z = te1[i, 0], te1[i, 1], te1[i, 2]
    e2x, e2y, e2z = te2[i, 0], te2[i, 1], te2[i, 2]
    pvx = dy * e2z - dz * e2y
    pvy = dz * e2x - dx * e2z
    pvz = dx * e2y - dy * e2x
    det = e1x * pvx + e1y * pvy + e1z * pvz
    if abs(det) < DET_EPS:
        return -1.0, 0.0, 0.0
    inv = 1.0 / det
    tvx = ox - tv0[i, 0]
    tvy = oy - tv0[i, 1]
    tvz = oz - tv0[i, 2]
    u = (tvx * pvx + tvy * pvy + tvz * pvz) * inv
    if u < 0.0 or u > 1.0:
        return -1.0, 0.0, 0.0
    qvx = tvy * e1z - tvz * e1y
    qvy = tvz * e1x - tvx * e1z
    qvz = tvx * e1y - tvy * e1x
    v = (dx * qvx + dy * qvy + dz * qvz) * inv
    if v < 0.0 or u + v > 1.0:
        return -1.0, 0.0, 0.0
    t = (e2x * qvx + e2y * qvy + e2z * qvz) * inv
    if t <= tmin:
        return -1.0, 0.0, 0.0
    return t, u, v


@njit(cache=True, nogil=True, inline="always")
def _aabb_hit(n, ox, oy, oz, dx, dy, dz, nmin, nmax, tmin, tmax):
    tlo = tmin
    thi = tmax
    for axis in range(3):
        o = ox if axis == 0 else (oy if axis == 1 else oz)
        d = dx if axis == 0 else (dy if axis == 1 else dz)
        lo = nmin[n, axis]
        hi = nmax[n, axis]
        if d == 0.0:
            if o < lo or o > hi:
                return False
        else:
            inv = 1.0 / d
            t1 = (lo - o) * inv
            t2 = (hi - o) * inv
            if t1 > t2:
                t1, t2 = t2, t1
            if t1 > tlo:
                tlo = t1
            if t2 < thi:
                thi = t2
            if tlo > thi:
                return False
    return True


@njit(cache=True, nogil=True)
def bvh_nearest(ox, oy, oz, dx, dy, dz,
                nmin, nmax, left, right, first, count, leaf_tris,
                tv0, te1, te2):
    """Nearest hit: (t, triangle index, u, v); index -1 on miss.

    Ties on t resolve to the lowest triangle index, matching a
    first-wins linear scan over the triangle list.
    """
    best_t = np.inf
    best_i = -1
    best_u = 0.0
    best_v = 0.0
    stack = np.empty(64, dtype=np.int32)
    sp = 1
    stack[0] = 0
    while sp > 0:
        sp -= 1
        node = stack[sp]
        if not _aabb_hit(node, ox, oy, oz, dx, dy, dz, nmin, nmax, TMIN, best_t):
            continue
        if count[node] > 0:
            for k in range(first[node], first[node] + count[node]):
                i = leaf_tris[k]
                t, u, v = _tri_hit(i, ox, oy, oz, dx, dy, dz, tv0, te1, te2, TMIN)
                if t > 0.0 and (t < best_t or (t == best_t and i < best_i)):
                    best_t = t
                    best_i = i
                    best_u = u
                    best_v = v
        else:
            stack[sp] = left[node]
            sp += 1
            stack[sp] = right[node]
            sp += 1
    if best_i < 0:
        return -1.0, -1, 0.0, 0.0
    return best_t, best_i, best_u, best_v


@njit(cache=True, nogil=True)
def bvh_any_hit(ox, oy, oz, dx, dy, dz,
                nmin, nmax, left, right, first, count, leaf_tris,
                tv0, te1, te2):
    stack = np.empty(64, dtype=np.int32)
    sp = 1
    stack[0] = 0
    while sp > 0:
        sp -= 1
        node = stack[sp]
        if not _aabb_hit(node, ox, oy, oz, dx, dy, dz, nmin, nmax, TMIN, np.inf):
            continue
        if count[node] > 0:
            for k in range(first[node], first[node] + count[node]):
                i = leaf_tris[k]
                t, u, v = _tri_hit(i, ox, oy, oz, dx, dy, dz, tv0, te1, te2, TMIN)
                if t > 0.0:
                    return True
        else:
            stack[sp] = left[node]
            sp += 1
            stack[sp] = right[node]
            sp += 1
    return False


@njit(cache=True, nogil=True, inline="always")
def _camera_ray(px, py, ox, oy, W, H, f, sw, sh, cam_pos, cam_rot):
    u = (px + ox - W / 2.0) * (sw / W)
    v = (H / 2.0 - (py + oy)) * (sh / H)
    l = math.sqrt(u * u + v * v + f * f)
    cx = u / l
    cy = v / l
    cz = f / l
    dx = cam_rot[0, 0] * cx + cam_rot[0, 1] * cy + cam_rot[0, 2] * cz
    dy = cam_rot[1, 0] * cx + cam_rot[1, 1] * cy + cam_rot[1, 2] * cz
    dz = cam_rot[2, 0] * cx + cam_rot[2, 1] * cy + cam_rot[2, 2] * cz
    return dx, dy, dz


@njit(cache=True, nogil=True, inline="always")
def _sky_sample(dx, dy, dz, sky_map, sky_rot):
    # look up in skybox-local frame: rotate by the orientation's transpose
    sx = sky_rot[0, 0] * dx + sky_rot[1, 0] * dy + sky_rot[2, 0] * dz
    sy = sky_rot[0, 1] * dx + sky_rot[1, 1] * dy + sky_rot[2, 1] * dz
    sz = sky_rot[0, 2] * dx + sky_rot[1, 2] * dy + sky_rot[2, 2] * dz
    if sy > 1.0:
        sy = 1.0
    elif sy < -1.0:
        sy = -1.0
    H = sky_map.shape[0]
    W = sky_map.shape[1]
    u = (math.atan2(sz, sx) + math.pi) / (2.0 * math.pi)
    v = math.acos(sy) / math.pi
    fx = u * W - 0.5
    fy = v * H - 0.5
    x0 = int(math.floor(fx))
    y0 = int(math.floor(fy))
    ax = fx - x0
    ay = fy - y0
    x0i = x0 % W
    x1i = (x0 + 1) % W
    y0i = min(max(y0, 0), H - 1)
    y1i = min(max(y0 + 1, 0), H - 1)
    r = ((1.0 - ax) * (1.0 - ay) * sky_map[y0i, x0i, 0] + ax * (1.0 - ay) * sky_map[y0i, x1i, 0]
         + (1.0 - ax) * ay * sky_map[y1i, x0i, 0] + ax * ay * sky_map[y1i, x1i, 0])
    g = ((1.0 - ax) * (1.0 - ay) * sky_map[y0i, x0i, 1] + ax * (1.0 - ay) * sky_map[y0i, x1i, 1]
         + (1.0 - ax) * ay * sky_map[y1i, x0i, 1] + ax * ay * sky_map[y1i, x1i, 1])
    b = ((1.0 - ax) * (1.0 - ay) * sky_map[y0i, x0i, 2] + ax * (1.0 - ay) * sky_map[y0i, x1i, 2]
         + (1.0 - ax) * ay * sky_map[y1i, x0i, 2] + ax * ay * sky_map[y1i, x1i, 2])
    return r, g, b


@njit(cache=True, nogil=True)
def render_tile_ids(out, x0, y0, x1, y1, W, H, f, sw, sh, cam_pos, cam_rot,
                    nmin, nmax, left, right, first, count, leaf_tris,
                    tv0, te1, te2, tri_group):
    """Primary-ray pass writing the nearest hit's part-group id (-1 on miss)."""
    for py in range(y0, y1):
        for px in range(x0, x1):
            dx, dy, dz = _camera_ray(px, py, 0.5, 0.5, W, H, f, sw, sh, cam_pos, cam_rot)
            t, i, u, v = bvh_nearest(cam_pos[0], cam_pos[1], cam_pos[2], dx, dy, dz,
                                     nmin, nmax, left, right, first, count, leaf_tris,
                                     tv0, te1, te2)
            out[py, px] = -1 if i < 0 else tri_group[i]


@njit(cache=True, nogil=True)
def render_tile_unlit(out, x0, y0, x1, y1, W, H, f, sw, sh, cam_pos, cam_rot,
                      nmin, nmax, left, right, first, count, leaf_tris,
                      tv0, te1, te2, tri_group, group_white):
    """Unlit pass: flagged groups render constant white, all else black."""
    for py in range(y0, y1):
        for px in range(x0, x1):
            dx, dy, dz = _camera_ray(px, py, 0.5, 0.5, W, H, f, sw, sh, cam_pos, cam_rot)
            t, i, u, v = bvh_nearest(cam_pos[0], cam_pos[1], cam_pos[2], dx, dy, dz,
                                     nmin, nmax, left, right, first, count, leaf_tris,
                                     tv0, te1, te2)
            if i >= 0 and group_white[tri_group[i]] != 0:
                out[py, px] = 1.0
            else:
                out[py, px] = 0.0


@njit(cache=True, nogil=True)
def render_tile_beauty(out, x0, y0, x1, y1, W, H, f, sw, sh, cam_pos, cam_rot,
                       nmin, nmax, left, right, first, count, leaf_tris,
                       tv0, te1, te2, tn0, tn1, tn2, tri_group,
                       g_albedo, g_spec, g_rough, g_opacity, g_kind,
                       sun_dir, sun_irr, sky_map, sky_rot, ambient,
                       spp, max_depth, frame_seed):
    """Whitted-style shading: sun + shadow rays, Fresnel environment
    reflections (recursing on glass/painted metal), ambient sky term."""
    for py in range(y0, y1):
        for px in range(x0, x1):
            accr = 0.0
            accg = 0.0
            accb = 0.0
            for s in range(spp):
                if spp == 1:
                    jx = 0.5
                    jy = 0.5
                else:
                    jx = _unit_float4(frame_seed, py * W + px, s, 11)
                    jy = _unit_float4(frame_seed, py * W + px, s, 13)
                dx, dy, dz = _camera_ray(px, py, jx, jy, W, H, f, sw, sh, cam_pos, cam_rot)
                ox, oy, oz = cam_pos[0], cam_pos[1], cam_pos[2]
                colr = 0.0
                colg = 0.0
                colb = 0.0
                thru = 1.0
                t, i, u, v = bvh_nearest(ox, oy, oz, dx, dy, dz,
                                         nmin, nmax, left, right, first, count, leaf_tris,
                                         tv0, te1, te2)
                if i < 0:
                    colr, colg, colb = _sky_sample(dx, dy, dz, sky_map, sky_rot)
                else:
                    depth = 0
                    while True:
                        gid = tri_group[i]
                        w0 = 1.0 - u - v
                        nx = w0 * tn0[i, 0] + u * tn1[i, 0] + v * tn2[i, 0]
                        ny = w0 * tn0[i, 1] + u * tn1[i, 1] + v * tn2[i, 1]
                        nz = w0 * tn0[i, 2] + u * tn1[i, 2] + v * tn2[i, 2]
                        nl = math.sqrt(nx * nx + ny * ny + nz * nz)
                        if nl > 0.0:
                            nx /= nl
                            ny /= nl
                            nz /= nl
                        if nx * dx + ny * dy + nz * dz > 0.0:
                            nx = -nx
                            ny = -ny
                            nz = -nz
                        hx = ox + t * dx
                        hy = oy + t * dy
                        hz = oz + t * dz
                        ar = g_albedo[gid, 0] * g_opacity[gid]
                        ag = g_albedo[gid, 1] * g_opacity[gid]
                        ab = g_albedo[gid, 2] * g_opacity[gid]
                        colr += thru * ambient[0] * ar
                        colg += thru * ambient[1] * ag
                        colb += thru * ambient[2] * ab
                        ndl = -(nx * sun_dir[0] + ny * sun_dir[1] + nz * sun_dir[2])
                        if ndl > 0.0:
                            sx = hx + nx * OFFSET_EPS
                            sy = hy + ny * OFFSET_EPS
                            sz = hz + nz * OFFSET_EPS
                            blocked = bvh_any_hit(sx, sy, sz, -sun_dir[0], -sun_dir[1], -sun_dir[2],
                                                  nmin, nmax, left, right, first, count, leaf_tris,
                                                  tv0, te1, te2)
                            if not blocked:
                                scale = thru * ndl / math.pi
                                colr += scale * ar * sun_irr[0]
                                colg += scale * ag * sun_irr[1]
                                colb += scale * ab * sun_irr[2]
                        f0 = g_spec[gid]
                        if f0 <= 0.0:
                            break
                        cosi = -(dx * nx + dy * ny + dz * nz)
                        if cosi < 0.0:
                            cosi = 0.0
                        fr = f0 + (1.0 - f0) * (1.0 - cosi) ** 5
                        wref = fr * (1.0 - g_rough[gid])
                        if wref <= 1e-6:
                            break
                        ddn = dx * nx + dy * ny + dz * nz
                        rx = dx - 2.0 * ddn * nx
                        ry = dy - 2.0 * ddn * ny
                        rz = dz - 2.0 * ddn * nz
                        kind = g_kind[gid]
                        recursive = kind == KIND_PAINTED_METAL or kind == KIND_GLASS
                        if not recursive or depth >= max_depth:
                            er, eg, eb = _sky_sample(rx, ry, rz, sky_map, sky_rot)
                            colr += thru * wref * er
                            colg += thru * wref * eg
                            colb += thru * wref * eb
                            break
                        o2x = hx + nx * OFFSET_EPS
                        o2y = hy + ny * OFFSET_EPS
                        o2z = hz + nz * OFFSET_EPS
                        t2, i2, u2, v2 = bvh_nearest(o2x, o2y, o2z, rx, ry, rz,
                                                     nmin, nmax, left, right, first, count,
                                                     leaf_tris, tv0, te1, te2)
                        if i2 < 0:
                            er, eg, eb = _sky_sample(rx, ry, rz, sky_map, sky_rot)
                            colr += thru * wref * er
                            colg += thru * wref * eg
                            colb += thru * wref * eb
                            break
                        thru *= wref
                        ox, oy, oz = o2x, o2y, o2z
                        dx, dy, dz = rx, ry, rz
                        t, i, u, v = t2, i2, u2, v2
                        depth += 1
                accr += colr
                accg += colg
                accb += colb
            out[py, px, 0] = accr / spp
            out[py, px, 1] = accg / spp
            out[py, px, 2] = accb / spp
