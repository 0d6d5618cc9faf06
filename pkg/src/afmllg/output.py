"""Snapshot and trace files.

Snapshots are legacy VTK ``STRUCTURED_POINTS`` volumes carrying four point
vector fields (m_A, m_B, m_avg, l_staggered) at the cell centres.  A 1D mesh
is embedded as an (M, 1, 1) volume.  Traces are plain CSV with a header row.
"""

from __future__ import annotations

import csv
import math
from pathlib import Path

import numpy as np

from afmllg.core import Mesh
from afmllg.dynamics import order_parameters

ENERGY_COLUMNS = ("t_fs", "W_total", "W_aniso", "W_exch", "W_afm", "W_zeeman", "mean_m", "mean_l")
PHASE_COLUMNS = ("B_tesla", "mean_m_along_field", "steps_to_converge", "converged_flag")
FIELD_NAMES = ("m_A", "m_B", "m_avg", "l_staggered")


class OutputError(OSError):
    def __init__(self, path, reason):
        self.path = str(path)
        super().__init__(f"cannot write {self.path}: {reason}")


def _volume(values: np.ndarray, mesh: Mesh) -> np.ndarray:
    """(3, *dims) -> (npoints, 3) with x varying fastest."""
    v = values.reshape((3,) + _dims3(mesh))
    return np.ascontiguousarray(v.transpose(3, 2, 1, 0).reshape(-1, 3))


def _dims3(mesh: Mesh) -> tuple:
    return tuple(mesh.dims) + (1,) * (3 - mesh.ndim)


def snapshot_bytes(m_A, m_B, mesh: Mesh, t: float, binary: bool = False, L: float = 1.0) -> bytes:
    """Encode a snapshot.  Coordinates are multiplied by ``L`` (1 keeps them dimensionless)."""
    m_A = np.asarray(getattr(m_A, "values", m_A), dtype=float)
    m_B = np.asarray(getattr(m_B, "values", m_B), dtype=float)
    m, l = order_parameters(m_A, m_B)
    dims = _dims3(mesh)
    h = tuple(mesh.spacing) + (1.0,) * (3 - mesh.ndim)
    head = [
        "# vtk DataFile Version 3.0",
        f"afmllg snapshot t={t!r}",
        "BINARY" if binary else "ASCII",
        "DATASET STRUCTURED_POINTS",
        "DIMENSIONS {} {} {}".format(*dims),
        "ORIGIN {!r} {!r} {!r}".format(*(0.5 * x * L for x in h)),
        "SPACING {!r} {!r} {!r}".format(*(x * L for x in h)),
        f"POINT_DATA {int(np.prod(dims))}",
    ]
    out = ["\n".join(head).encode() + b"\n"]
    for name, arr in zip(FIELD_NAMES, (m_A, m_B, m, l)):
        out.append(f"VECTORS {name} double\n".encode())
        pts = _volume(arr, mesh)
        if binary:
            # legacy VTK binary sections are big-endian by definition
            out.append(pts.astype(">f8").tobytes() + b"\n")
        else:
            out.append("".join(f"{a!r} {b!r} {c!r}\n" for a, b, c in pts.tolist()).encode())
    return b"".join(out)


def write_snapshot(m_A, m_B, mesh: Mesh, t: float, path, binary: bool = False, L: float = 1.0) -> Path:
    path = Path(path)
    data = snapshot_bytes(m_A, m_B, mesh, t, binary, L)
    try:
        path.write_bytes(data)
    except OSError as exc:
        raise OutputError(path, exc.strerror or exc) from exc
    return path


def read_snapshot(path) -> dict:
    """Read a file written by ``write_snapshot``.

    Returns a dict with ``dims``, ``origin``, ``spacing``, ``t`` and one
    (3, nx, ny, nz) array per vector field.
    """
    raw = Path(path).read_bytes()
    pos = 0

    def line():
        nonlocal pos
        end = raw.index(b"\n", pos)
        text = raw[pos:end].decode()
        pos = end + 1
        return text

    line()
    title = line()
    binary = line().strip() == "BINARY"
    line()
    dims = tuple(int(x) for x in line().split()[1:])
    origin = tuple(float(x) for x in line().split()[1:])
    spacing = tuple(float(x) for x in line().split()[1:])
    n = int(line().split()[1])
    out = {"dims": dims, "origin": origin, "spacing": spacing,
           "t": float(title.split("t=", 1)[1]) if "t=" in title else math.nan}
    while pos < len(raw):
        head = line().split()
        if not head:
            continue
        name = head[1]
        if binary:
            pts = np.frombuffer(raw, dtype=">f8", count=3 * n, offset=pos).astype(float)
            pos += 24 * n + 1
        else:
            pts = np.array([[float(x) for x in line().split()] for _ in range(n)])
        pts = pts.reshape(dims[2], dims[1], dims[0], 3)
        out[name] = pts.transpose(3, 2, 1, 0).copy()
    return out


def write_trace(records, path, columns=None) -> Path:
    """CSV with a header row; ``columns`` defaults to the first record's keys."""
    records = list(records)
    if not records:
        raise ValueError("write_trace needs at least one record")
    columns = tuple(columns or records[0].keys())
    path = Path(path)
    try:
        with path.open("w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(columns)
            for r in records:
                w.writerow([_fmt(r[c]) for c in columns])
    except OSError as exc:
        raise OutputError(path, exc.strerror or exc) from exc
    return path


def _fmt(v):
    if isinstance(v, (bool, np.bool_)):
        return int(v)
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return v


def read_trace(path) -> list:
    with Path(path).open(newline="") as fh:
        return [{k: float(v) for k, v in row.items()} for row in csv.DictReader(fh)]
