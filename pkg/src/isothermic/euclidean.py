"""Euclidean specializations: Christoffel duals, the parallel-net linear
quantity, per-vertex mean curvature spheres, and cmc classification."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .conserved import ConservedQuantity
from .errors import NotChristoffel, NotClosed, NotParallel
from .grids import EdgeFunction, GridDomain, VertexField, closedness_check, propagation_order
from .minkowski import (
    Q_EUCLIDEAN,
    euclidean_lift,
    euclidean_point,
    minkowski_inner,
)
from .nets import IsothermicNet
from .tolerances import tol


class EuclideanNet:
    """Isothermic net presented by points of R^3 plus edge weights."""

    def __init__(self, domain: GridDomain, points: VertexField, weights: EdgeFunction):
        if points.data.shape[2:] != (3,):
            raise ValueError("points must be 3-vectors")
        self.domain = domain
        self.points = points
        self.weights = weights

    @classmethod
    def from_isothermic(cls, net: IsothermicNet, Q=None) -> "EuclideanNet":
        """Read off R^3 points from the lifts in a flat space-form gauge."""
        if Q is None:
            Q = Q_EUCLIDEAN
        w = -minkowski_inner(net.lifts.data, Q)
        pts = net.lifts.data[:, :, 1:4] / w[:, :, None]
        return cls(net.domain, VertexField(net.domain, pts), net.weights)

    def to_isothermic(self) -> IsothermicNet:
        lifts = VertexField(self.domain, euclidean_lift(self.points.data))
        return IsothermicNet(self.domain, lifts, self.weights)

    def point(self, v):
        return self.points[v]

    def edge_vector(self, edge):
        i, j = edge
        return self.points[j] - self.points[i]


def christoffel(net: EuclideanNet, basepoint=None) -> EuclideanNet:
    """Dual net integrated from the edge form

        w_ij = -( a_ij / |df_ij|^2 ) df_ij,

    anchored at 0 on the basepoint.  Closedness of the form is exactly the
    isothermic property for the stored weights.

    Raises
    ------
    NotClosed
    """
    dom = net.domain
    if basepoint is None:
        basepoint = (dom.m1, dom.n1)

    def omega(edge):
        df = net.edge_vector(edge)
        d2 = float(np.dot(df, df))
        if d2 <= tol(1.0) ** 2:
            raise NotClosed(f"degenerate edge {edge}")
        return -(net.weights.value(edge) / d2) * df

    report = closedness_check(omega, dom)
    if not report.ok:
        raise NotClosed(
            f"dual edge form is not closed (residual {report.max_residual:.3g} "
            f"at face {report.worst_face})")
    dual = VertexField.zeros(dom, (3,))
    tree, _ = propagation_order(dom, basepoint)
    for parent, child in tree:
        dual[child] = dual[parent] + omega((parent, child))
    return EuclideanNet(dom, dual, net.weights)


def parallel_lcq(net: EuclideanNet, dual: EuclideanNet, H: float) -> ConservedQuantity:
    """Normalized linear conserved quantity of a Euclidean cmc net given its
    parallel dual at constant distance 1/H.

    Requires |f* - f| = 1/H on all vertices and the canonical weight
    scaling a_ij = -(H/2) <df_ij, df*_ij>; the quantity is

        lam * ( H F* - Q/(2H) ) + Q,    Q = (1, 0, 0, 0, -1),

    with kappa = 0 and mean curvature H.

    Raises
    ------
    NotParallel, NotChristoffel
    """
    if H == 0.0:
        raise ValueError("parallel net characterization needs H != 0")
    dom = net.domain
    gap = np.linalg.norm(dual.points.data - net.points.data, axis=-1) - 1.0 / H
    if float(np.abs(gap).max()) > tol(1.0 + 1.0 / abs(H)):
        raise NotParallel(
            f"|f* - f| deviates from 1/H by {float(np.abs(gap).max()):.3g}")
    worst = 0.0
    for e in dom.edges():
        df = net.edge_vector(e)
        dfs = dual.edge_vector(e)
        target = -(H / 2.0) * float(np.dot(df, dfs))
        worst = max(worst, abs(net.weights.value(e) - target))
    if worst > tol(1.0 + net.weights.max_abs()):
        raise NotChristoffel(
            f"weights miss the canonical dual scaling by {worst:.3g}")

    dual_lifts = euclidean_lift(dual.points.data)
    coeffs = np.zeros((dom.rows, dom.cols, 2, 5))
    coeffs[:, :, 0, :] = Q_EUCLIDEAN
    coeffs[:, :, 1, :] = H * dual_lifts - Q_EUCLIDEAN / (2.0 * H)
    return ConservedQuantity(net.to_isothermic(), coeffs)


def extract_parallel(cq: ConservedQuantity) -> EuclideanNet:
    """Inverse of :func:`parallel_lcq`: the dual net ( 2H Z + Q ) / (2 H^2)."""
    H, kappa = _curvatures(cq)
    if abs(kappa) > tol(1.0) or H == 0.0:
        raise ValueError("parallel net extraction needs kappa = 0 and H != 0")
    Z = cq.coeffs[:, :, 1, :]
    Q = cq.constant
    lifts = (2.0 * H * Z + Q) / (2.0 * H * H)
    pts = euclidean_point(lifts)
    return EuclideanNet(cq.net.domain, VertexField(cq.net.domain, pts), cq.net.weights)


def _curvatures(cq: ConservedQuantity):
    from .conserved import mean_curvature_data

    return mean_curvature_data(cq)


@dataclass
class MeanCurvatureSphere:
    kind: str  # "sphere" | "plane"
    center: np.ndarray | None
    radius: float | None
    normal: np.ndarray | None
    offset: float | None
    residual_equal_distances: float
    residual_power: float
    residual_radius: float


def bp_sphere(cq: ConservedQuantity, vertex) -> MeanCurvatureSphere:
    """Decode the mean curvature sphere at an interior vertex of a Euclidean
    (kappa = 0, ambient Q = (1,0,0,0,-1)) cmc net, and verify it.

    A unit sphere vector splits as

        Z = ( (1+|c|^2-r^2)/(2r), c/r, (1-|c|^2+r^2)/(2r) ),

    so r = 1/(Z_0 + Z_4) and c = r * (Z_1, Z_2, Z_3); when Z_0 + Z_4
    vanishes the congruence member is the plane {x : <n, x> = d} with
    n = (Z_1, Z_2, Z_3), d = Z_0.  The verification residuals are the
    equal-distance conditions of the axis neighbors per direction, the
    weight-scaled power identity <Z, F_nbr> = a_{c,nbr}, and |f - c| = |r|.
    """
    H, kappa = _curvatures(cq)
    Q = cq.constant
    if abs(kappa) > tol(1.0) or float(np.abs(Q - Q_EUCLIDEAN).max()) > tol(1.0):
        raise ValueError("mean curvature spheres need the flat gauge Q = (1,0,0,0,-1)")
    net = cq.net
    dom = net.domain
    m, n = vertex
    for w in ((m + 1, n), (m - 1, n), (m, n + 1), (m, n - 1)):
        if not dom.contains(w):
            raise KeyError(f"{vertex} is not interior")

    Z = cq.coeffs[dom.index(vertex)][1]
    pts = euclidean_point(net.lifts.data)
    f = pts[dom.index(vertex)]
    lift_slope = float(Z[0] + Z[4])

    def neighbor_residuals(center):
        pairs = (((m + 1, n), (m - 1, n)), ((m, n + 1), (m, n - 1)))
        worst_eq = 0.0
        for a, b in pairs:
            da = np.linalg.norm(pts[dom.index(a)] - center)
            db = np.linalg.norm(pts[dom.index(b)] - center)
            worst_eq = max(worst_eq, abs(da - db) / (1.0 + da))
        return worst_eq

    scale = 1.0 + float(np.abs(Z).max())
    if abs(lift_slope) <= tol(scale):
        normal = Z[1:4].copy()
        offset = float(Z[0])
        worst_power = 0.0
        for w in ((m + 1, n), (m - 1, n), (m, n + 1), (m, n - 1)):
            a = net.weight((vertex, w))
            lhs = float(np.dot(normal, pts[dom.index(w)] - f))
            worst_power = max(worst_power, abs(lhs - a) / (1.0 + abs(a)))
        r_inc = abs(float(np.dot(normal, f)) - offset) / (1.0 + abs(offset))
        return MeanCurvatureSphere("plane", None, None, normal, offset,
                                   0.0, worst_power, r_inc)

    r = 1.0 / lift_slope
    center = r * Z[1:4]
    worst_eq = neighbor_residuals(center)
    worst_power = 0.0
    for w in ((m + 1, n), (m - 1, n), (m, n + 1), (m, n - 1)):
        a = net.weight((vertex, w))
        power = float(np.dot(pts[dom.index(w)] - center, pts[dom.index(w)] - center)) - r * r
        worst_power = max(worst_power, abs(power / (-2.0 * r) - a) / (1.0 + abs(a)))
    r_resid = abs(np.linalg.norm(f - center) - abs(r)) / (1.0 + abs(r))
    return MeanCurvatureSphere("sphere", center, abs(r), None, None,
                               worst_eq, worst_power, r_resid)


@dataclass
class CmcLabel:
    label: str
    H: float
    kappa: float
    lawson_invariant: float


def classify_cmc(cq: ConservedQuantity) -> CmcLabel:
    """Label a normalized linear quantity by its curvature pair:
    minimal-euclidean (H = kappa = 0), horospherical (H^2 + kappa = 0 with
    kappa < 0), cmc-euclidean (kappa = 0), or cmc-spaceform."""
    H, kappa = _curvatures(cq)
    inv = H * H + kappa
    flat = abs(kappa) <= tol(1.0)
    if flat and abs(H) <= tol(1.0):
        label = "minimal-euclidean"
    elif abs(inv) <= tol(1.0 + H * H) and kappa < 0:
        label = "horospherical"
    elif flat:
        label = "cmc-euclidean"
    else:
        sign = "+" if inv > tol(1.0) else ("-" if inv < -tol(1.0) else "0")
        label = f"cmc-spaceform({sign})"
    return CmcLabel(label, H, kappa, inv)
