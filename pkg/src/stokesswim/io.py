"""Output writers: legacy ASCII VTK fields and CSV tables.

Every float is written with ``%.17g`` so files round-trip exactly and identical
inputs give identical bytes. VTK export samples finite element fields at mesh
vertices only; edge and interior nodes of P2 fields are dropped.
"""
from __future__ import annotations

import csv
import io as _io
from pathlib import Path

import numpy as np

from .fem import FemField
from .mesh import Mesh

FLOAT = "%.17g"


def _fmt(x):
    return FLOAT % float(x)


def _vertex_values(mesh: Mesh, name, field):
    if isinstance(field, FemField):
        if field.mesh is not mesh:
            raise ValueError(f"field {name!r} lives on a different mesh")
        vals = field.components()[:, : mesh.n_vertices].T
    else:
        vals = np.asarray(field, dtype=float)
        if vals.ndim == 1:
            vals = vals[:, None]
        if vals.shape[0] != mesh.n_vertices:
            raise ValueError(f"field {name!r} has {vals.shape[0]} rows, mesh has {mesh.n_vertices} vertices")
    if vals.shape[1] not in (1, 2, 3):
        raise ValueError(f"field {name!r} must have 1, 2 or 3 components")
    return vals


def write_vtk(mesh: Mesh, fields, path, title="stokesswim"):
    """Write ``mesh`` and vertex-sampled ``fields`` as a legacy ASCII unstructured grid.

    ``fields`` maps names to :class:`FemField` objects or per-vertex arrays.
    One-component fields become SCALARS, two- and three-component fields VECTORS.
    """
    fields = dict(fields or {})
    data = {name: _vertex_values(mesh, name, f) for name, f in fields.items()}
    buf = _io.StringIO()
    w = buf.write
    w("# vtk DataFile Version 3.0\n")
    w(title.replace("\n", " ")[:255] + "\n")
    w("ASCII\nDATASET UNSTRUCTURED_GRID\n")
    nv, nt = mesh.n_vertices, mesh.n_triangles
    w(f"POINTS {nv} double\n")
    for x, y in mesh.vertices:
        w(f"{_fmt(x)} {_fmt(y)} 0\n")
    w(f"CELLS {nt} {4 * nt}\n")
    for a, b, c in mesh.triangles:
        w(f"3 {a} {b} {c}\n")
    w(f"CELL_TYPES {nt}\n")
    w("5\n" * nt)
    if data:
        w(f"POINT_DATA {nv}\n")
    for name, vals in data.items():
        key = name.replace(" ", "_")
        if vals.shape[1] == 1:
            w(f"SCALARS {key} double 1\nLOOKUP_TABLE default\n")
            for v in vals[:, 0]:
                w(_fmt(v) + "\n")
        else:
            w(f"VECTORS {key} double\n")
            for row in vals:
                comps = list(row) + [0.0] * (3 - len(row))
                w(" ".join(_fmt(c) for c in comps) + "\n")
    _write_text(path, buf.getvalue())


def read_vtk_point_data(path):
    """Parse the POINT_DATA arrays of a file written by :func:`write_vtk`."""
    lines = Path(path).read_text().splitlines()
    out = {}
    i = 0
    nv = None
    while i < len(lines):
        parts = lines[i].split()
        if parts and parts[0] == "POINT_DATA":
            nv = int(parts[1])
        elif parts and parts[0] == "SCALARS":
            out[parts[1]] = np.array([float(s) for s in lines[i + 2 : i + 2 + nv]])
            i += 1 + nv
        elif parts and parts[0] == "VECTORS":
            out[parts[1]] = np.array([[float(s) for s in ln.split()] for ln in lines[i + 1 : i + 1 + nv]])
            i += nv
        i += 1
    return out


def _write_text(path, text):
    path = Path(path)
    try:
        with open(path, "w", newline="", encoding="utf-8") as fh:
            fh.write(text)
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc.strerror or exc}") from exc


def write_csv(path, header, rows):
    """Header line then one line per row; floats at full precision."""
    buf = _io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([_fmt(v) if isinstance(v, (float, np.floating)) else v for v in row])
    _write_text(path, buf.getvalue())


def write_csv_trajectory(trajectory, path):
    """One line per record of a :class:`~stokesswim.swimmer.SimulationTrajectory`."""
    records = list(trajectory.records if hasattr(trajectory, "records") else trajectory)
    if not records:
        raise ValueError("trajectory has no records")
    header = [
        "step", "t", "centroid_x", "centroid_y", "hinge_x", "hinge_y", "theta", "alpha",
        "V_x", "V_y", "omega", "balance_residual", "symmetry_defect", "n_triangles",
    ]
    rows = [
        [r.step, float(r.t), float(r.centroid[0]), float(r.centroid[1]), float(r.hinge[0]), float(r.hinge[1]),
         float(r.theta), float(r.alpha), float(r.V[0]), float(r.V[1]), float(r.omega),
         float(r.balance_residual), float(r.symmetry_defect), int(r.n_triangles)]
        for r in records
    ]
    write_csv(path, header, rows)


def write_convergence_table(table, path):
    """Mesh sizes, error norms and observed orders; the first row has empty orders."""
    rows = list(table.rows)
    if not rows:
        raise ValueError("convergence table has no rows")
    eocs = [table.eoc_u_l2, table.eoc_u_h1, table.eoc_p_l2]
    out = []
    for i, r in enumerate(rows):
        orders = ["", "", ""] if i == 0 else [float(e[i - 1]) for e in eocs]
        out.append([float(r.h), float(r.h_min), float(r.h_max), float(r.e_u_l2), float(r.e_u_h1), float(r.e_p_l2),
                    *orders])
    write_csv(path, ["h", "h_min", "h_max", "err_u_l2", "err_u_h1", "err_p_l2",
                     "eoc_u_l2", "eoc_u_h1", "eoc_p_l2"], out)


def write_rotation_trace(trace, path):
    """Time, quaternion, body angular velocity and Euler angles of a rotation run."""
    e = trace.euler()
    rows = [
        [float(t), *map(float, q), *map(float, w), *map(float, a)]
        for t, q, w, a in zip(trace.t, trace.q, trace.omega, e)
    ]
    write_csv(path, ["t", "q0", "q1", "q2", "q3", "omega_x", "omega_y", "omega_z", "phi_x", "phi_y", "phi_z"], rows)


def write_resistance_csv(trajectory, path):
    """Per step: the resistance matrix row-major, its right-hand side and the solved rigid velocity."""
    records = list(trajectory.records if hasattr(trajectory, "records") else trajectory)
    if not records:
        raise ValueError("trajectory has no records")
    header = ["step", *[f"M{i}{j}" for i in range(1, 4) for j in range(1, 4)], "N1", "N2", "N3", "V_x", "V_y", "omega"]
    rows = [
        [r.step, *map(float, np.ravel(r.M)), *map(float, r.N), float(r.V[0]), float(r.V[1]), float(r.omega)]
        for r in records
    ]
    write_csv(path, header, rows)
