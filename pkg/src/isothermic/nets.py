"""Discrete isothermic nets: verification, Moutard normalization, the
family of edge connections, and Calapso transformations.

A net is a grid of isotropic lifts together with a symmetric edge weight
function, equal on opposite face edges, whose ratio across each face equals
the face cross ratio.  Everything here is lift-scaling invariant except
where a specific normalization is the point (:func:`moutard_lift`).

Nets are treated as immutable values: every operation returns fresh data,
so nets can be shared freely across threads.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import (
    DegenerateEdge,
    FactorizationFailure,
    GeometryError,
    NonConcircularFace,
    NotFlat,
    PoleParameter,
)
from .grids import EdgeFunction, GridDomain, VertexField, propagation_order
from .minkowski import (
    cross_ratio,
    cross_ratio_matrix,
    minkowski_inner,
    norm2,
)
from .tolerances import tol


class IsothermicNet:
    """Grid of isotropic lifts with a cross-ratio factorizing edge function."""

    def __init__(self, domain: GridDomain, lifts: VertexField, weights: EdgeFunction,
                 revolution=None):
        if lifts.domain != domain or weights.domain != domain:
            raise ValueError("lifts/weights domain mismatch")
        if lifts.data.shape[2:] != (5,):
            raise ValueError("lifts must be 5-vectors")
        self.domain = domain
        self.lifts = lifts
        self.weights = weights
        #: Optional rotational structure set by the revolution builders.
        self.revolution = revolution

    def lift(self, v):
        return self.lifts[v]

    def weight(self, edge) -> float:
        return self.weights.value(edge)

    def edge_inner(self, edge) -> float:
        i, j = edge
        return float(minkowski_inner(self.lifts[i], self.lifts[j]))

    def lift_scale(self) -> float:
        return float(np.abs(self.lifts.data).max())

    def with_weights(self, weights: EdgeFunction) -> "IsothermicNet":
        return IsothermicNet(self.domain, self.lifts.copy(), weights,
                             revolution=self.revolution)

    def with_lifts(self, lifts: VertexField) -> "IsothermicNet":
        return IsothermicNet(self.domain, lifts, self.weights)

    def face_cross_ratio(self, face) -> complex:
        i, j, k, l = face
        return cross_ratio(self.lifts[i], self.lifts[j], self.lifts[k], self.lifts[l])

    def validate(self) -> float:
        """Check lightlike lifts and that weight ratios match face cross
        ratios; returns the worst residual."""
        scale = self.lift_scale() ** 2
        worst = 0.0
        for v in self.domain.vertices():
            F = self.lifts[v]
            worst = max(worst, abs(float(norm2(F))) / max(scale, 1e-300))
        for face in self.domain.faces():
            q = self.face_cross_ratio(face)
            i, j, k, l = face
            expected = self.weight((i, j)) / self.weight((i, l))
            worst = max(worst, abs(q - expected) / (1.0 + abs(expected)))
        if worst > tol(1.0):
            raise GeometryError(f"net fails validation (residual {worst:.3g})")
        return worst


@dataclass
class IsothermicReport:
    ok: bool
    weights: EdgeFunction | None
    max_imag: float
    max_grid_residual: float
    max_factor_residual: float
    min_regularity: float = np.inf
    reason: str = ""


def verify_isothermic(lifts: VertexField, *, strict: bool = True) -> IsothermicReport:
    """Verify that a grid of isotropic lifts is a discrete isothermic net and
    reconstruct its edge weight function.

    Checks regularity (three-point general position on every face), then,
    face by face, that the four points are concircular (real cross ratio)
    and that the cross ratios satisfy the product-one condition on every
    3x3 subgrid, and finally rebuilds the two one-variable weight arrays.
    The reconstruction is unique up to one global factor; the gauge fixes
    the first vertical value to -1 when every face cross ratio is negative
    (embedded faces) and to +1 otherwise.

    Raises (in strict mode)
    -----------------------
    GeometryError, NonConcircularFace, FactorizationFailure
    """
    domain = lifts.domain
    if domain.rows < 2 or domain.cols < 2:
        raise ValueError("need at least one face")
    regularity = face_regularity(lifts)
    if regularity <= tol(1.0):
        report = IsothermicReport(False, None, np.inf, np.inf, np.inf, regularity,
                                  "a face has three nearly dependent lifts")
        if strict:
            raise GeometryError(report.reason + f" (regularity {regularity:.3g})")
        return report
    ratios = np.zeros((domain.rows - 1, domain.cols - 1))
    max_imag = 0.0
    for face in domain.faces():
        i = face[0]
        q = cross_ratio(lifts[face[0]], lifts[face[1]], lifts[face[2]], lifts[face[3]])
        max_imag = max(max_imag, abs(q.imag) / (1.0 + abs(q)))
        ratios[i[0] - domain.m1, i[1] - domain.n1] = q.real
    if max_imag > tol(1.0):
        report = IsothermicReport(False, None, max_imag, np.inf, np.inf, regularity,
                                  "a face has a complex cross ratio")
        if strict:
            raise NonConcircularFace(report.reason + f" (imag {max_imag:.3g})")
        return report

    # product-one condition on all 3x3 subgrids
    max_grid = 0.0
    for mi in range(1, domain.rows - 1):
        for ni in range(1, domain.cols - 1):
            prod = (ratios[mi, ni - 1] / ratios[mi, ni]) * (
                ratios[mi - 1, ni] / ratios[mi - 1, ni - 1])
            max_grid = max(max_grid, abs(prod - 1.0))
    if max_grid > tol(1.0):
        report = IsothermicReport(False, None, max_imag, max_grid, np.inf, regularity,
                                  "cross ratios fail the 3x3 product-one condition")
        if strict:
            raise FactorizationFailure(report.reason + f" (residual {max_grid:.3g})")
        return report

    v0 = -1.0 if np.all(ratios < 0.0) else 1.0
    u = ratios[:, 0] * v0
    v = np.empty(domain.cols - 1)
    v[0] = v0
    v[1:] = u[0] / ratios[0, 1:]
    weights = EdgeFunction(domain, u, v)
    max_factor = float(np.abs(u[:, None] / v[None, :] - ratios).max())
    ok = max_factor <= tol(1.0 + float(np.abs(ratios).max()))
    report = IsothermicReport(ok, weights, max_imag, max_grid, max_factor, regularity)
    if not ok:
        report.reason = "reconstructed weights do not reproduce the cross ratios"
        if strict:
            raise FactorizationFailure(report.reason + f" (residual {max_factor:.3g})")
    return report


def face_regularity(lifts: VertexField) -> float:
    """Smallest relative third singular value over all face triples (of the
    unit representatives, so the measure is scaling invariant); a regular
    net keeps this well above tolerance."""
    worst = np.inf
    for face in lifts.domain.faces():
        V = np.stack([lifts[v] / np.linalg.norm(lifts[v]) for v in face])
        for drop in range(4):
            sub = np.delete(V, drop, axis=0)
            s = np.linalg.svd(sub, compute_uv=False)
            worst = min(worst, s[2] / s[0])
    return float(worst)


def moutard_lift(lifts: VertexField, weights: EdgeFunction) -> VertexField:
    """Rescale lifts so that every edge satisfies <F_i, F_j> = a_ij.

    The corner lift is kept as given; the first row and column are fixed by
    one scalar condition per edge, and each face is then filled through

        F_k = F_i + (a_ij - a_il) / <F_j, F_l> * (F_j - F_l),

    which also forces the diagonals of every face to be parallel.  The
    input must be an isothermic net whose weight function is ``weights``
    (any global rescaling of a factorizer works, with the corresponding
    rescaled lifts).

    Raises
    ------
    DegenerateEdge
        If a required inner product vanishes.
    """
    domain = lifts.domain
    out = VertexField.zeros(domain, (5,))
    base = (domain.m1, domain.n1)
    out[base] = lifts[base]
    scale2 = float(np.abs(lifts.data).max()) ** 2

    def rescale_to(prev, cur):
        g = float(minkowski_inner(out[prev], lifts[cur]))
        if abs(g) <= tol(scale2):
            raise DegenerateEdge(f"vanishing inner product on edge {(prev, cur)}")
        out[cur] = lifts[cur] * (weights.value((prev, cur)) / g)

    for m in range(domain.m1 + 1, domain.m2 + 1):
        rescale_to((m - 1, domain.n1), (m, domain.n1))
    for n in range(domain.n1 + 1, domain.n2 + 1):
        rescale_to((domain.m1, n - 1), (domain.m1, n))

    for face in domain.faces():
        i, j, k, l = face
        g = float(minkowski_inner(out[j], out[l]))
        if abs(g) <= tol(scale2):
            raise DegenerateEdge(f"vanishing diagonal product on face {face}")
        aij = weights.value((i, j))
        ail = weights.value((i, l))
        out[k] = out[i] + ((aij - ail) / g) * (out[j] - out[l])

    worst = 0.0
    for e in domain.edges():
        worst = max(worst, abs(float(minkowski_inner(out[e[0]], out[e[1]]))
                               - weights.value(e)))
    if worst > tol(1.0 + weights.max_abs() + float(np.abs(out.data).max()) ** 2):
        raise DegenerateEdge(
            f"normalized lifts miss the prescribed edge products by {worst:.3g}; "
            "the weights are not a factorizer of this net")
    return out


def moutard_check(lifts: VertexField):
    """Whether the diagonals F_k - F_i and F_j - F_l are parallel on every
    face; returns (ok, worst relative second singular value)."""
    worst = 0.0
    for face in lifts.domain.faces():
        i, j, k, l = face
        D = np.stack([lifts[k] - lifts[i], lifts[j] - lifts[l]])
        s = np.linalg.svd(D, compute_uv=False)
        if s[0] > 0:
            worst = max(worst, float(s[1] / s[0]))
    return worst <= tol(1.0), worst


@dataclass
class StarReport:
    diagonal_cospherical: bool
    axis_cospherical: bool
    central_sphere: np.ndarray | None
    diagonal_gap: float
    axis_gap: float


def vertex_star_cospherical(lifts: VertexField, center) -> StarReport:
    """Cosphericity of the diagonal and axis vertex stars of an interior
    vertex, and the central sphere spanned by the diagonal star.

    A five-point star is cospherical when its lifts span at most four
    dimensions; in that case the unit spacelike normal of the span encodes
    the sphere through the five points.
    """
    m, n = center
    domain = lifts.domain
    diag = [(m, n), (m + 1, n + 1), (m - 1, n + 1), (m - 1, n - 1), (m + 1, n - 1)]
    axis = [(m, n), (m + 1, n), (m, n + 1), (m - 1, n), (m, n - 1)]
    for v in diag + axis:
        if not domain.contains(v):
            raise KeyError(f"{center} is not interior")

    def span_gap(vs):
        V = np.stack([lifts[v] / np.linalg.norm(lifts[v]) for v in vs])
        s = np.linalg.svd(V, compute_uv=False)
        return float(s[4] / s[0]), V

    dgap, Vd = span_gap(diag)
    agap, _ = span_gap(axis)
    dia_ok = dgap <= tol(1.0)
    axi_ok = agap <= tol(1.0)
    sphere = None
    if dia_ok:
        s = np.linalg.svd(Vd, compute_uv=False)
        if s[3] / s[0] > tol(1.0):  # span is exactly 4-dimensional
            # unit spacelike Minkowski normal of the span
            from .minkowski import SIGNATURE

            _, _, vt = np.linalg.svd(Vd * SIGNATURE)
            normal = vt[-1]
            nn = float(norm2(normal))
            if nn > tol(1.0):
                sphere = normal / np.sqrt(nn)
                k = int(np.argmax(np.abs(sphere)))
                if sphere[k] < 0:
                    sphere = -sphere
    return StarReport(dia_ok, axi_ok, sphere, dgap, agap)


def edge_connection(net: IsothermicNet, lam: float, edge) -> np.ndarray:
    """Matrix of the edge connection at spectral parameter ``lam``: the
    circle transform with parameter 1 - lam * a_ij anchored at the edge
    endpoints, mapping the fiber over j to the fiber over i.

    Raises
    ------
    PoleParameter
        If 1 - lam * a_ij vanishes.
    """
    i, j = edge
    a = net.weight(edge)
    q = 1.0 - lam * a
    if abs(q) <= tol(1.0 + abs(lam * a)):
        raise PoleParameter(f"parameter {lam} is a pole of edge {edge}")
    return cross_ratio_matrix(q, net.lifts[i], net.lifts[j])


def face_holonomy(net: IsothermicNet, lam: float, face) -> np.ndarray:
    (i, j), (j2, k), (k2, l), (l2, i2) = GridDomain.face_edges(face)
    M = edge_connection(net, lam, (i, j))
    M = M @ edge_connection(net, lam, (j2, k))
    M = M @ edge_connection(net, lam, (k2, l))
    M = M @ edge_connection(net, lam, (l2, i2))
    return M


def holonomy_residual(net: IsothermicNet, lams) -> float:
    """Largest deviation of any face holonomy from the identity over the
    given spectral parameters.  Zero (within tolerance) iff the net is
    isothermic with the stored weights."""
    worst = 0.0
    eye = np.eye(5)
    for lam in np.atleast_1d(lams):
        for face in net.domain.faces():
            worst = max(worst, float(np.abs(face_holonomy(net, float(lam), face) - eye).max()))
    return worst


def circle_identity_check(P1, P2, P3, P4, a: float, b: float, lam: float) -> float:
    """Residual of the four-point circle identity

        C(1-a*lam; p1,p2) C(1-b*lam; p2,p3) = C(1-b*lam; p1,p4) C(1-a*lam; p4,p3)

    for concircular points with cross ratio a/b."""
    qa = 1.0 - a * lam
    qb = 1.0 - b * lam
    if abs(qa) <= tol(1.0) or abs(qb) <= tol(1.0):
        raise PoleParameter("parameter hits a pole of the identity")
    left = cross_ratio_matrix(qa, P1, P2) @ cross_ratio_matrix(qb, P2, P3)
    right = cross_ratio_matrix(qb, P1, P4) @ cross_ratio_matrix(qa, P4, P3)
    return float(np.abs(left - right).max())


@dataclass
class CalapsoFrame:
    """Propagated gauge frames trivializing the edge connections at ``mu``."""

    mu: float
    frames: VertexField  # (rows, cols, 5, 5)
    net: IsothermicNet
    transformed: IsothermicNet
    basepoint: tuple
    max_residual: float = field(default=0.0)

    def frame(self, v) -> np.ndarray:
        return self.frames[v]


def calapso(net: IsothermicNet, mu: float, basepoint=None) -> tuple[CalapsoFrame, IsothermicNet]:
    """Calapso transform of an isothermic net.

    Propagates frames T with T_j = T_i * C_ij(mu) breadth-first from the
    basepoint (identity there); flatness of the connection makes the result
    path independent, and the residual over the redundant edges is reported.
    The transformed net has lifts T_i F_i and edge weights a / (1 - mu*a).

    Raises
    ------
    PoleParameter, NotFlat
    """
    domain = net.domain
    if basepoint is None:
        basepoint = (domain.m1, domain.n1)
    frames = VertexField.zeros(domain, (5, 5))
    frames[basepoint] = np.eye(5)
    tree, cross = propagation_order(domain, basepoint)
    for parent, child in tree:
        frames[child] = frames[parent] @ edge_connection(net, mu, (parent, child))
    worst = 0.0
    for i, j in cross:
        resid = frames[j] - frames[i] @ edge_connection(net, mu, (i, j))
        worst = max(worst, float(np.abs(resid).max()))
    if worst > tol(10.0 + float(np.abs(frames.data).max())):
        raise NotFlat(f"path dependence {worst:.3g}; input net is not isothermic")

    new_lifts = VertexField(domain, np.einsum("mnij,mnj->mni", frames.data, net.lifts.data))
    transformed = IsothermicNet(domain, new_lifts, net.weights.calapso_shifted(mu),
                                revolution=None)
    frame = CalapsoFrame(mu, frames, net, transformed, basepoint, worst)
    return frame, transformed
