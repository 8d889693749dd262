"""Wavefront OBJ export through space-form charts.

The chart turns lifts into R^3 coordinates: an affine chart for a flat
ambient vector, the unit ball for hyperbolic ambients, and stereographic
projection for spherical ones.  Vertices that the chart cannot place
(infinity boundary, far sheet, projection pole) are clamped and listed in
a sidecar report next to the OBJ file.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ModelMismatch
from .minkowski import (
    METRIC,
    SIGNATURE,
    minkowski_inner,
    norm2,
    orthonormal_complement,
)
from .nets import IsothermicNet
from .netfile import format_float
from .tolerances import tol

MODELS = ("euclidean", "poincare", "stereographic")


def _euclidean_chart(Q, lifts):
    """Affine coordinates in the flat quadric of a lightlike Q."""
    # lightlike partner with <Q, partner> = -1
    scores = METRIC @ Q
    k = int(np.argmax(np.abs(scores)))
    V = np.zeros(5)
    V[k] = -1.0 / scores[k]
    partner = V + (float(norm2(V)) / 2.0) * Q

    def null_project(w):
        # Minkowski projection onto the complement of the null pair
        return (w + float(minkowski_inner(w, partner)) * Q
                + float(minkowski_inner(w, Q)) * partner)

    basis = []
    for col in np.eye(5):
        w = null_project(col)
        for b in basis:
            w -= float(minkowski_inner(w, b)) * b
        w2 = float(norm2(w))
        if w2 > 1e-12:
            basis.append(w / np.sqrt(w2))
        if len(basis) == 3:
            break
    E = np.stack(basis)
    w = -minkowski_inner(lifts, Q)
    ok = np.abs(w) > tol(float(np.abs(lifts).max()) * float(np.abs(Q).max()))
    wsafe = np.where(ok, w, 1.0)
    return (lifts @ (E * SIGNATURE).T) / wsafe[..., None], ok


def _curved_chart(Q, lifts, model, pole_tol):
    q2 = float(norm2(Q))
    sigma = np.sqrt(abs(q2))
    dirs = orthonormal_complement(Q)
    w = minkowski_inner(lifts, Q)
    ok = np.abs(w) > tol(float(np.abs(lifts).max()))
    wsafe = np.where(ok, w, 1.0)
    Y = lifts / (-wsafe[..., None])
    Yperp = Y - (minkowski_inner(Y, Q) / q2)[..., None] * Q
    coords = sigma * (Yperp @ (dirs * SIGNATURE).T)
    if model == "poincare":
        # dirs[0] is timelike, so <w, t> = -w0; flip to the honest time slot
        coords[..., 0] *= -1.0
        # pick the sheet holding the majority of the vertices
        t = coords[..., 0]
        if np.sum(t[ok] > 0) < np.sum(t[ok] < 0):
            coords = -coords
            t = coords[..., 0]
        den = 1.0 + t
        good = ok & (den > pole_tol)
        den = np.where(good, den, 1.0)
        return coords[..., 1:4] / den[..., None], good
    # stereographic: all four directions spacelike; project from the pole
    # opposite the last coordinate
    den = 1.0 + coords[..., 3]
    good = ok & (np.abs(den) > pole_tol)
    den = np.where(good, den, 1.0)
    return coords[..., 0:3] / den[..., None], good


@dataclass
class ExportReport:
    path: str
    vertex_count: int
    face_count: int
    flagged: list  # [(vertex, reason)]


def export_obj(net: IsothermicNet, Q, model: str, path, clamp: float = 1e6,
               pole_tol: float = 1e-9) -> ExportReport:
    """Write the net as an OBJ quad mesh in the requested chart.

    ``model`` must match the curvature sign of Q: "euclidean" needs
    |Q|^2 = 0, "poincare" |Q|^2 > 0 (negative ambient curvature),
    "stereographic" |Q|^2 < 0.  Unplaceable vertices are clamped to
    ``clamp`` times their direction and reported in the sidecar file
    ``<path>.report.txt``.

    Raises
    ------
    ModelMismatch
    """
    Q = np.asarray(Q, dtype=float)
    q2 = float(norm2(Q))
    qscale = float(np.dot(Q, Q))
    if model not in MODELS:
        raise ModelMismatch(f"unknown model '{model}'")
    if model == "euclidean" and abs(q2) > tol(qscale):
        raise ModelMismatch("euclidean chart needs a lightlike ambient vector")
    if model == "poincare" and q2 <= tol(qscale):
        raise ModelMismatch("poincare chart needs |Q|^2 > 0 (kappa < 0)")
    if model == "stereographic" and q2 >= -tol(qscale):
        raise ModelMismatch("stereographic chart needs |Q|^2 < 0 (kappa > 0)")

    lifts = net.lifts.data
    if model == "euclidean":
        coords, good = _euclidean_chart(Q, lifts)
    else:
        coords, good = _curved_chart(Q, lifts, model, pole_tol)

    dom = net.domain
    flagged = []
    lines = []
    for m in range(dom.rows):
        for n in range(dom.cols):
            xyz = coords[m, n]
            if not good[m, n]:
                norm = np.linalg.norm(xyz)
                direction = xyz / norm if norm > 0 else np.array([1.0, 0.0, 0.0])
                xyz = clamp * direction
                flagged.append(((m + dom.m1, n + dom.n1), "unplaceable in chart"))
            lines.append("v " + " ".join(format_float(c) for c in xyz))
    if model == "poincare":
        radii = np.linalg.norm(coords, axis=-1)
        for m in range(dom.rows):
            for n in range(dom.cols):
                if good[m, n] and radii[m, n] >= 1.0 - pole_tol:
                    flagged.append(((m + dom.m1, n + dom.n1), "on or past the ideal boundary"))

    for face in dom.faces():
        ids = [1 + (v[0] - dom.m1) * dom.cols + (v[1] - dom.n1) for v in face]
        lines.append("f " + " ".join(str(i) for i in ids))
    with open(path, "w", encoding="ascii") as fh:
        fh.write("\n".join(lines) + "\n")

    report_path = str(path) + ".report.txt"
    with open(report_path, "w", encoding="ascii") as fh:
        fh.write(f"model: {model}\n")
        fh.write(f"vertices: {dom.rows * dom.cols}\n")
        fh.write(f"faces: {(dom.rows - 1) * (dom.cols - 1)}\n")
        fh.write(f"flagged: {len(flagged)}\n")
        for v, reason in flagged:
            fh.write(f"  vertex {v}: {reason}\n")
    return ExportReport(str(path), dom.rows * dom.cols,
                        (dom.rows - 1) * (dom.cols - 1), flagged)
