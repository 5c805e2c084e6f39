"""File formats: atomic writes, field dumps, PLY/OBJ meshes and JSON helpers."""
from __future__ import annotations

import json
import os
import struct
import tempfile
from pathlib import Path

import numpy as np

from .grid import DiscGrid, ScalarField


def atomic_write(path, data):
    """Write ``data`` (str or bytes) to ``path`` via a temporary file and rename."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    mode = "wb" if isinstance(data, (bytes, bytearray)) else "w"
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.")
    try:
        with os.fdopen(fd, mode) as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    return path


def dumps_json(obj):
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


# ---------------------------------------------------------------------------
# grid field dump

_MAGIC = b"HSFD"


def field_to_bytes(field):
    """Little-endian binary ``{h, nodes, re, im}`` for the active nodes of a field."""
    g = field.grid
    act = np.argwhere(g.active)
    vals = field.values[g.active]
    head = _MAGIC + struct.pack("<dq", g.h, act.shape[0])
    body = act.astype("<i4").tobytes() + vals.real.astype("<f8").tobytes() + vals.imag.astype("<f8").tobytes()
    return head + body


def field_from_bytes(data):
    if data[:4] != _MAGIC:
        raise ValueError("not a field dump")
    h, n = struct.unpack("<dq", data[4:20])
    off = 20
    idx = np.frombuffer(data, "<i4", 2 * n, off).reshape(n, 2)
    off += 8 * n
    re = np.frombuffer(data, "<f8", n, off)
    im = np.frombuffer(data, "<f8", n, off + 8 * n)
    grid = DiscGrid(h)
    vals = np.full(grid.shape, np.nan + 0j)
    vals[idx[:, 0], idx[:, 1]] = re + 1j * im
    return ScalarField(grid, vals)


def field_sidecar(field, **extra):
    g = field.grid
    meta = {
        "h": g.h,
        "nodes": int(g.active.sum()),
        "shape": list(g.shape),
        "origin": float(g.x[0]),
        "layout": "int32 (i, j) pairs, then float64 re, then float64 im; little-endian",
    }
    meta.update(extra)
    return meta


def write_field(path, field, **extra):
    path = Path(path)
    atomic_write(path, field_to_bytes(field))
    atomic_write(path.with_suffix(path.suffix + ".json"), dumps_json(field_sidecar(field, **extra)))
    return path


# ---------------------------------------------------------------------------
# meshes


def project(phi1, phi2, drop="im2"):
    """Map ``(x1, x2, x3, x4) = (Re Phi1, Im Phi1, Re Phi2, Im Phi2)`` to 3-D by dropping one coordinate."""
    coords = {"re1": phi1.real, "im1": phi1.imag, "re2": phi2.real, "im2": phi2.imag}
    if drop not in coords:
        raise ValueError(f"unknown coordinate {drop!r}")
    return np.stack([v for k, v in coords.items() if k != drop], axis=-1)


def grid_mesh(imm, drop="im2"):
    """Triangulate the grid cells whose four corners are sampled."""
    ok = np.isfinite(imm.phi1) & np.isfinite(imm.phi2) & imm.grid.inside
    ids = -np.ones(ok.shape, dtype=np.int64)
    ids[ok] = np.arange(int(ok.sum()))
    verts = project(imm.phi1[ok], imm.phi2[ok], drop)
    a, b, c, d = ids[:-1, :-1], ids[1:, :-1], ids[1:, 1:], ids[:-1, 1:]
    cell = (a >= 0) & (b >= 0) & (c >= 0) & (d >= 0)
    faces = np.concatenate([
        np.stack([a[cell], b[cell], c[cell]], axis=1),
        np.stack([a[cell], c[cell], d[cell]], axis=1),
    ])
    return verts, faces


def cone_mesh(desc, n_r=24, n_theta=96, drop="im2"):
    """Polar fan mesh of a cone; the apex is duplicated once per angular sector."""
    r = np.linspace(0, 1, n_r + 1)[1:]
    th = 2 * np.pi * np.arange(n_theta) / n_theta
    z = np.outer(r, np.exp(1j * th))
    f1, f2 = desc.phi(z)
    ring = project(f1, f2, drop).reshape(-1, 3)
    apex = np.zeros((n_theta, 3))
    verts = np.concatenate([apex, ring])
    rid = lambda i, j: n_theta + i * n_theta + (j % n_theta)
    faces = [(j, rid(0, j), rid(0, j + 1)) for j in range(n_theta)]
    for i in range(n_r - 1):
        for j in range(n_theta):
            faces.append((rid(i, j), rid(i + 1, j), rid(i + 1, j + 1)))
            faces.append((rid(i, j), rid(i + 1, j + 1), rid(i, j + 1)))
    return verts, np.array(faces, dtype=np.int64)


def ply_bytes(verts, faces, ascii=False):
    verts = np.asarray(verts, float)
    faces = np.asarray(faces, np.int64)
    fmt = "ascii 1.0" if ascii else "binary_little_endian 1.0"
    head = (
        f"ply\nformat {fmt}\nelement vertex {len(verts)}\nproperty double x\nproperty double y\n"
        f"property double z\nelement face {len(faces)}\nproperty list uchar int vertex_indices\nend_header\n"
    ).encode()
    if ascii:
        lines = [" ".join(repr(float(c)) for c in v) for v in verts]
        lines += ["3 " + " ".join(str(int(i)) for i in f) for f in faces]
        return head + ("\n".join(lines) + "\n").encode()
    body = verts.astype("<f8").tobytes()
    rec = np.zeros(len(faces), dtype=[("n", "u1"), ("i", "<i4", (3,))])
    rec["n"] = 3
    rec["i"] = faces
    return head + body + rec.tobytes()


def obj_text(verts, faces):
    lines = [f"v {v[0]!r} {v[1]!r} {v[2]!r}" for v in np.asarray(verts, float)]
    lines += [f"f {f[0] + 1} {f[1] + 1} {f[2] + 1}" for f in np.asarray(faces)]
    return "\n".join(lines) + "\n"


def read_ply_counts(data):
    """``(n_vertices, n_faces, format)`` from a PLY header."""
    head = data.split(b"end_header\n", 1)[0].decode()
    nv = nf = 0
    fmt = ""
    for line in head.splitlines():
        parts = line.split()
        if parts[:2] == ["element", "vertex"]:
            nv = int(parts[2])
        elif parts[:2] == ["element", "face"]:
            nf = int(parts[2])
        elif parts and parts[0] == "format":
            fmt = parts[1]
    return nv, nf, fmt
